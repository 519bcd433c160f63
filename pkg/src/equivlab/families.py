"""The eight built-in operator families and the audit thresholds they run with."""

from __future__ import annotations

from functools import lru_cache, partial

import numpy as np

from equivlab import diffops, interp, montecarlo, quadrature
from equivlab.audit import AuditConfig, FamilyUnderTest
from equivlab.errors import DomainError
from equivlab.funcspace import (
    RUNGE_DOMAIN,
    Interval,
    ScalarFunction,
    make_cos,
    make_exp,
    make_kink,
    make_monomial,
    make_piecewise_linear,
    make_runge,
    make_sign,
    make_sin,
)
from equivlab.rng import SEED_PANEL

UNIT = Interval(0.0, 1.0)


def _integral(f: ScalarFunction) -> float | None:
    return f.exact_integral


def _smooth_corpus(domain: Interval) -> tuple[ScalarFunction, ...]:
    return (make_exp(domain), make_sin(domain), make_cos(domain))


def _quadrature_family(family_id, builder, schedule, notes=(), extra_dense=()):
    rules = {}

    def rule(n):
        if n not in rules:
            rules[n] = builder(n, RUNGE_DOMAIN)
        return rules[n]

    return FamilyUnderTest(
        family_id=family_id,
        index_kind="by_n",
        discrete_apply=lambda n, f: quadrature.apply(rule(n), f),
        reference_apply=_integral,
        norm_of=lambda n: quadrature.operator_norm(rule(n)),
        index_schedule=tuple(schedule),
        dense_generator=partial(make_monomial, domain=RUNGE_DOMAIN),
        extra_dense=tuple(extra_dense),
        corpus=(make_runge(),) + _smooth_corpus(RUNGE_DOMAIN),
        notes=tuple(notes),
    )


def gauss_family() -> tuple[FamilyUnderTest, AuditConfig]:
    fut = _quadrature_family("gauss", quadrature.gauss_legendre_rule, range(5, 41, 5))
    return fut, AuditConfig(consistency_tol=1e-10, convergence_tol=1e-5)


def trapezoid_family() -> tuple[FamilyUnderTest, AuditConfig]:
    # the natural dense class: piecewise-linear functions, with knots on
    # and off the panel grid
    pl = (
        make_piecewise_linear([(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]),
        make_piecewise_linear([(-1.0, 1.0), (1.0 / 3.0, -1.0), (1.0, 0.5)]),
    )
    fut = _quadrature_family(
        "trapezoid",
        quadrature.composite_trapezoid_rule,
        [2**k for k in range(4, 13)],
        extra_dense=pl,
    )
    return fut, AuditConfig(consistency_tol=1e-5, convergence_tol=1e-5)


def newton_cotes_family() -> tuple[FamilyUnderTest, AuditConfig]:
    fut = _quadrature_family(
        "newton-cotes",
        quadrature.newton_cotes_rule,
        (10, 20, 30, 40),
        notes=("weights in exact rational arithmetic; node counts are num_nodes",),
    )
    return fut, AuditConfig(consistency_tol=1e-6, convergence_tol=1e-5)


# ---------------------------------------------------------------------------
# difference operators


def _diff_roundoff(h: float) -> float:
    # cancellation in (f(x+h) - f(x))/h loses about |f|/h
    return 4.0 / h


def _forward_family(family_id, norm_of, corpus, reference, notes) -> FamilyUnderTest:
    return FamilyUnderTest(
        family_id=family_id,
        index_kind="by_h",
        discrete_apply=lambda h, f: diffops.apply_diff(diffops.DifferenceOperator("forward", h, UNIT), f),
        reference_apply=reference,
        norm_of=norm_of,
        index_schedule=tuple(2.0**-k for k in range(3, 15)),
        dense_generator=partial(make_monomial, domain=UNIT),
        corpus=corpus,
        roundoff_scale=_diff_roundoff,
        notes=tuple(notes),
    )


def forward_diff_c1_family() -> tuple[FamilyUnderTest, AuditConfig]:
    fut = _forward_family(
        "forward-diff-c1",
        norm_of=lambda h: diffops.c1_norm_certificate(diffops.DifferenceOperator("forward", h, UNIT)),
        corpus=_smooth_corpus(UNIT),
        reference=lambda f: f.exact_derivative,
        notes=("operator norm under the C^1 norm: analytic certificate",),
    )
    return fut, AuditConfig(consistency_tol=1e-2, convergence_tol=1e-3)


def forward_diff_sup_family() -> tuple[FamilyUnderTest, AuditConfig]:
    kink = make_kink(0.5, UNIT)
    weak = {kink.id: make_sign(0.5, UNIT)}
    fut = _forward_family(
        "forward-diff-sup",
        norm_of=lambda h: diffops.forward_difference_probe_norm(h, UNIT),
        corpus=_smooth_corpus(UNIT) + (kink,),
        reference=lambda f: weak.get(f.id) or f.exact_derivative,
        notes=(
            "operator norm under the sup norm: sampled half-wave probe lower bound",
            "corpus includes |x-1/2|, a limit of C^1 functions in sup norm, against its a.e. derivative",
        ),
    )
    return fut, AuditConfig(consistency_tol=1e-2, convergence_tol=1e-3)


# ---------------------------------------------------------------------------
# interpolation


def _interp_family(family_id, kind, schedule) -> FamilyUnderTest:
    fam = interp.NodeFamily(kind, RUNGE_DOMAIN)

    @lru_cache(maxsize=None)
    def nodes_and_weights(n):
        return fam.nodes(n), fam.barycentric_weights(n)

    def apply(n, f):
        x, w = nodes_and_weights(n)
        return interp.interpolate(f, x, w).as_function(f"P_{n}[{f.id}]")

    @lru_cache(maxsize=None)
    def norm(n):
        x, w = nodes_and_weights(n)
        return interp.lebesgue_constant(x, interval=RUNGE_DOMAIN, weights=w)

    return FamilyUnderTest(
        family_id=family_id,
        index_kind="by_n",
        discrete_apply=apply,
        reference_apply=lambda f: f,
        norm_of=norm,
        index_schedule=tuple(schedule),
        dense_generator=partial(make_monomial, domain=RUNGE_DOMAIN),
        corpus=(make_runge(),) + _smooth_corpus(RUNGE_DOMAIN),
        notes=("||P_n|| realized as the sampled Lebesgue constant (finite-range proxy)",),
    )


def equispaced_interp_family() -> tuple[FamilyUnderTest, AuditConfig]:
    fut = _interp_family("equispaced-interp", "equispaced", range(4, 41, 4))
    return fut, AuditConfig(consistency_tol=1e-4, convergence_tol=1e-2)


def chebyshev_interp_family() -> tuple[FamilyUnderTest, AuditConfig]:
    fut = _interp_family("chebyshev-interp", "chebyshev", range(10, 41, 5))
    return fut, AuditConfig(consistency_tol=1e-10, convergence_tol=1e-2)


# ---------------------------------------------------------------------------
# Monte Carlo


def sample_mean_family(seeds=SEED_PANEL) -> tuple[FamilyUnderTest, AuditConfig]:
    pdf = montecarlo.uniform_pdf(RUNGE_DOMAIN)
    schedule = (100, 1000, 10000, 100000)
    cache: dict[str, dict[int, float]] = {}

    def estimates(f: ScalarFunction) -> dict[int, np.ndarray]:
        if f.id not in cache:
            per_n = {n: np.empty(len(seeds)) for n in schedule}
            for j, seed in enumerate(seeds):
                terms = montecarlo.sample_terms(f, pdf, schedule[-1], seed)
                for n in schedule:
                    per_n[n][j] = montecarlo.running_mean(terms, n)
            cache[f.id] = per_n
        return cache[f.id]

    fut = FamilyUnderTest(
        family_id="sample-mean-mc",
        index_kind="by_n",
        discrete_apply=lambda n, f: estimates(f)[n],
        reference_apply=_integral,
        norm_of=lambda n: montecarlo.mc_norm_bound(pdf),
        index_schedule=schedule,
        dense_generator=partial(make_monomial, domain=RUNGE_DOMAIN),
        corpus=(make_runge(),) + _smooth_corpus(RUNGE_DOMAIN),
        notes=(
            f"errors are the panel order statistic over {len(seeds)} seeds",
            "stability from the 1/m certificate",
        ),
    )
    return fut, AuditConfig(consistency_tol=2e-2, convergence_tol=2e-2)


BUILTIN_FAMILIES = {
    "gauss": gauss_family,
    "trapezoid": trapezoid_family,
    "newton-cotes": newton_cotes_family,
    "forward-diff-c1": forward_diff_c1_family,
    "forward-diff-sup": forward_diff_sup_family,
    "equispaced-interp": equispaced_interp_family,
    "chebyshev-interp": chebyshev_interp_family,
    "sample-mean-mc": sample_mean_family,
}


def builtin_family(name: str) -> tuple[FamilyUnderTest, AuditConfig]:
    try:
        factory = BUILTIN_FAMILIES[name]
    except KeyError:
        raise DomainError(f"unknown family {name!r}; choose from {', '.join(BUILTIN_FAMILIES)}") from None
    return factory()
