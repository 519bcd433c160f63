import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equivlab import interp as ip
from equivlab.errors import DomainError
from equivlab.funcspace import Interval, make_monomial, make_runge, make_sin

I = Interval(-1.0, 1.0)


def test_node_families():
    np.testing.assert_allclose(ip.equispaced_nodes(4, I), [-1, -0.5, 0, 0.5, 1])
    x = ip.chebyshev_nodes(4, I)
    np.testing.assert_allclose(x, [-1, -math.sqrt(0.5), 0, math.sqrt(0.5), 1], atol=1e-15)
    np.testing.assert_array_equal(x, -x[::-1])
    assert ip.equispaced_nodes(0, I).tolist() == [0.0]


@pytest.mark.parametrize("kind", ["equispaced", "chebyshev"])
@pytest.mark.parametrize("n", [1, 5, 12])
def test_closed_form_weights_proportional_to_generic(kind, n):
    fam = ip.NodeFamily(kind, I)
    w_closed = fam.barycentric_weights(n)
    w_generic = ip.barycentric_weights(fam.nodes(n))
    ratio = w_generic / w_closed
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)


def test_interpolant_hits_nodes_exactly():
    x = ip.chebyshev_nodes(9, I)
    p = ip.interpolate(make_runge(), x)
    np.testing.assert_array_equal(p(x), make_runge()(x))


def test_interpolant_rejects_duplicates():
    with pytest.raises(DomainError):
        ip.interpolate(make_sin(I), [0.0, 0.0, 0.5])


def test_lebesgue_constant_small_cases():
    # two nodes: the hat functions sum to 1
    assert ip.lebesgue_constant([-1.0, 1.0], 100, I).value == pytest.approx(1.0, abs=1e-14)
    # three equispaced nodes on [-1, 1]: max is 5/4
    assert ip.lebesgue_constant([-1.0, 0.0, 1.0], 1000, I).value == pytest.approx(1.25, abs=1e-10)
    with pytest.raises(DomainError):
        ip.lebesgue_constant(ip.equispaced_nodes(20, I), 50, I)


def test_lebesgue_bounds_interpolation_error():
    # ||f - P f|| <= (1 + Lambda) dist(f, P_n); with dist <= ||f|| this bounds ||P f||
    x = ip.equispaced_nodes(12, I)
    lam = ip.lebesgue_constant(x, interval=I).value
    f = make_runge()
    p = ip.interpolate(f, x).as_function()
    grid = np.linspace(-1, 1, 2001)
    assert np.max(np.abs(p(grid))) <= lam * 1.0 + 1e-12


def test_error_bound_formula():
    x = ip.chebyshev_nodes(6, I)
    f = make_sin(I)
    p = ip.interpolate(f, x)
    t = np.linspace(-1, 1, 501)
    bound = ip.interp_error_bound(1.0, x, t)
    assert np.all(np.abs(f(t) - p(t)) <= bound + 1e-15)


def test_interpolant_dict_round_trip():
    p = ip.interpolate(make_runge(), ip.chebyshev_nodes(8, I))
    back = ip.Interpolant.from_dict(json.loads(json.dumps(p.to_dict())), I)
    t = np.linspace(-1, 1, 33)
    np.testing.assert_array_equal(back(t), p(t))


@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
@settings(max_examples=30, deadline=None)
def test_interpolation_is_linear(a, b):
    x = ip.chebyshev_nodes(10, I)
    f, g = make_runge(), make_sin(I)
    t = np.linspace(-1, 1, 17)
    lhs = ip.interpolate(f.combine(a, g, b), x)(t)
    rhs = a * ip.interpolate(f, x)(t) + b * ip.interpolate(g, x)(t)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-11, atol=1e-11)


@given(n=st.integers(1, 20), d=st.integers(0, 20))
@settings(max_examples=40, deadline=None)
def test_reproduces_polynomials_chebyshev(n, d):
    if d > n:
        d = n
    f = make_monomial(d, I)
    p = ip.interpolate(f, ip.chebyshev_nodes(n, I))
    t = np.linspace(-1, 1, 257)
    assert np.max(np.abs(p(t) - f(t))) < 1e-12


def test_runge_study_rows():
    rows = ip.runge_study(ip.NodeFamily("chebyshev", I), [4, 8])
    assert [r.n for r in rows] == [4, 8]
    assert rows[1].max_error < rows[0].max_error
