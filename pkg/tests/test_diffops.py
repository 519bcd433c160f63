
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equivlab import diffops as d
from equivlab.errors import DomainError
from equivlab.funcspace import Interval, make_cos, make_exp, make_monomial, make_sin, sup_norm

UNIT = Interval(0.0, 1.0)


def test_operator_validation():
    with pytest.raises(DomainError):
        d.DifferenceOperator("upwind", 0.1)
    with pytest.raises(DomainError):
        d.DifferenceOperator("forward", 0.0)
    with pytest.raises(DomainError):
        d.DifferenceOperator("central", 0.6)


def test_valid_intervals():
    assert d.DifferenceOperator("forward", 0.25).valid_interval == Interval(0.0, 0.75)
    assert d.DifferenceOperator("backward", 0.25).valid_interval == Interval(0.25, 1.0)
    assert d.DifferenceOperator("central", 0.25).valid_interval == Interval(0.25, 0.75)


@pytest.mark.parametrize("stencil,exact_deg", [("forward", 1), ("backward", 1), ("central", 2), ("second_central", 3)])
def test_stencils_exact_on_low_degree_polynomials(stencil, exact_deg):
    op = d.DifferenceOperator(stencil, 0.125)
    for deg in range(exact_deg + 1):
        f = make_monomial(deg, UNIT)
        approx = d.apply_diff(op, f)
        exact = f.derivative(op.order).restrict(op.valid_interval)
        assert sup_norm(approx - exact).value < 1e-12


@pytest.mark.parametrize("stencil,order", [("forward", 1), ("backward", 1), ("central", 2), ("second_central", 2)])
def test_observed_order(stencil, order):
    rows = d.convergence_study(stencil, make_exp(UNIT), [0.04, 0.02, 0.01])
    for r in rows[1:]:
        assert r.ratio_prev == pytest.approx(2.0**order, rel=0.1)


def test_certificates():
    assert d.c1_norm_certificate(d.DifferenceOperator("forward", 0.1)).value == 1.0
    cen = d.c1_norm_certificate(d.DifferenceOperator("central", 0.1))
    assert cen.value == 1.0 and "extension" in cen.method
    assert d.c2_norm_certificate(d.DifferenceOperator("second_central", 0.1)).value == 1.0
    with pytest.raises(DomainError):
        d.c1_norm_certificate(d.DifferenceOperator("second_central", 0.1))
    with pytest.raises(DomainError):
        d.c2_norm_certificate(d.DifferenceOperator("forward", 0.1))


@given(h=st.floats(0.01, 0.3))
@settings(max_examples=25, deadline=None)
def test_certificate_dominates_c1_ratio(h):
    # ||D_h f||_inf <= ||f'||_inf <= ||f||_{C^1}
    op = d.DifferenceOperator("forward", h)
    for f in (make_sin(), make_cos(), make_exp(UNIT, rate=-2.0)):
        lhs = sup_norm(d.apply_diff(op, f)).value
        rhs = sup_norm(f).value + sup_norm(f.derivative(1)).value
        assert lhs <= d.c1_norm_certificate(op).value * rhs + 1e-12


@pytest.mark.parametrize("h", [0.2, 0.1, 0.05, 0.02, 0.01])
def test_blowup_witness_reaches_two_over_h(h):
    w, ratio = d.sup_norm_blowup(h)
    assert sup_norm(w).value == pytest.approx(1.0, abs=1e-12)
    assert ratio * h == pytest.approx(2.0, rel=1e-9)


def test_probe_norm_is_lower_bound_kind():
    est = d.forward_difference_probe_norm(0.05)
    assert est.kind == "lower_bound"
    # the sup-to-sup norm of D_h is at most 2/h
    assert est.value <= 2 / 0.05 * (1 + 1e-12)


@given(a=st.floats(-5, 5), b=st.floats(-5, 5))
@settings(max_examples=30, deadline=None)
def test_difference_is_linear(a, b):
    op = d.DifferenceOperator("second_central", 0.05)
    f, g = make_sin(), make_exp(UNIT)
    x = np.linspace(0.05, 0.95, 9)
    lhs = d.apply_diff(op, f.combine(a, g, b))(x)
    rhs = a * d.apply_diff(op, f)(x) + b * d.apply_diff(op, g)(x)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


def test_study_requires_known_stencil():
    with pytest.raises(DomainError):
        d.convergence_study("upwind", make_sin(), [0.1])
