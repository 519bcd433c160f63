"""Sample-mean Monte Carlo integration ``M_n(f) = (1/n) sum f(X_i)/g(X_i)``.

The samples ``X_i`` come from inverse-CDF transforms of a seeded
xoshiro256** stream, so an estimate is a deterministic function of
``(f, pdf, n, seed)``. Stability is certified by ``||M_n|| <= 1/m`` where
``m`` is a positive lower bound of the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from equivlab.errors import DomainError, NumericalError
from equivlab.funcspace import Interval, NormEstimate, ScalarFunction, make_constant
from equivlab.quadrature import gauss_legendre_rule
from equivlab.rng import ALGORITHM_ID, uniform_stream

PDF_CHECK_POINTS = 4096
PDF_NORMALIZATION_TOL = 1e-8
INVERSE_CDF_TOL = 1e-10

_CDF_PANELS = 256
_CDF_ORDER = 8


@dataclass(frozen=True, eq=False)
class Pdf:
    g: ScalarFunction
    lower_bound_m: float
    sampler: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"

    @property
    def interval(self) -> Interval:
        return self.g.domain


def _integrate_panels(g: ScalarFunction, edges: np.ndarray) -> np.ndarray:
    rule = gauss_legendre_rule(_CDF_ORDER)
    t = np.asarray(rule.nodes)
    w = np.asarray(rule.weights)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    x = (lo + hi) / 2 + half * t
    return (g(x) * w).sum(axis=1) * half[:, 0]


def numeric_inverse_cdf(g: ScalarFunction, tol: float = INVERSE_CDF_TOL) -> Callable[[np.ndarray], np.ndarray]:
    """Inverse CDF of density ``g`` by bisection on its integrated CDF."""
    a, b = g.domain.a, g.domain.b
    edges = np.linspace(a, b, _CDF_PANELS + 1)
    masses = _integrate_panels(g, edges)
    cumulative = np.concatenate(([0.0], np.cumsum(masses)))
    total = cumulative[-1]
    rule = gauss_legendre_rule(_CDF_ORDER)
    t = np.asarray(rule.nodes)
    w = np.asarray(rule.weights)

    def cdf(x: np.ndarray) -> np.ndarray:
        k = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, _CDF_PANELS - 1)
        lo = edges[k]
        half = (x - lo) / 2
        pts = ((lo + x) / 2)[:, None] + half[:, None] * t
        partial = (g(pts) * w).sum(axis=1) * half
        return (cumulative[k] + partial) / total

    def inverse(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        lo = np.full(u.shape, a)
        hi = np.full(u.shape, b)
        while float(np.max(hi - lo, initial=0.0)) > tol:
            mid = (lo + hi) / 2
            below = cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return (lo + hi) / 2

    return inverse


def make_pdf(
    g: ScalarFunction,
    lower_bound_m: float,
    inverse_cdf: Callable[[np.ndarray], np.ndarray] | None = None,
    label: str = "custom",
) -> Pdf:
    """Validate ``g`` as a density bounded below by ``lower_bound_m``.

    The lower bound is spot-checked on a uniform grid and the normalization
    with a 64-panel, 16-point Gauss-Legendre oracle.
    """
    m = float(lower_bound_m)
    if not m > 0.0:
        raise DomainError("pdf lower bound m must be positive")
    grid = np.linspace(g.domain.a, g.domain.b, PDF_CHECK_POINTS)
    values = g(grid)
    if np.any(values < m):
        x_bad = float(grid[np.argmax(values < m)])
        raise DomainError(f"pdf lower bound violated at x={x_bad!r}")
    mass = math.fsum(_integrate_panels_fine(g))
    if abs(mass - 1.0) > PDF_NORMALIZATION_TOL:
        raise DomainError(f"pdf integrates to {mass!r}, not 1")
    sampler = inverse_cdf if inverse_cdf is not None else numeric_inverse_cdf(g)
    return Pdf(g=g, lower_bound_m=m, sampler=sampler, label=label)


def _integrate_panels_fine(g: ScalarFunction) -> np.ndarray:
    rule = gauss_legendre_rule(16)
    t, w = np.asarray(rule.nodes), np.asarray(rule.weights)
    edges = np.linspace(g.domain.a, g.domain.b, 65)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    return ((g((lo + hi) / 2 + half * t) * w).sum(axis=1) * half[:, 0])


def uniform_pdf(interval: Interval = Interval(0.0, 1.0)) -> Pdf:
    height = 1.0 / interval.length
    a, length = interval.a, interval.length
    g = make_constant(height, interval)
    return make_pdf(g, height, inverse_cdf=lambda u: a + length * np.asarray(u), label="uniform")


def linear_pdf(interval: Interval = Interval(0.0, 1.0), slope: float = 1.0) -> Pdf:
    """Density proportional to ``1 + slope*t`` with ``t = (x-a)/(b-a)``, slope > -1."""
    s = float(slope)
    if not s > -1.0:
        raise DomainError("linear pdf needs slope > -1 to stay positive")
    if s == 0.0:
        return uniform_pdf(interval)
    a, length = interval.a, interval.length
    norm = (1.0 + s / 2) * length
    g = ScalarFunction(
        id=f"linear-pdf:{s!r}",
        domain=interval,
        evaluator=lambda x: (1.0 + s * (x - a) / length) / norm,
        smoothness=1,
        exact_integral=1.0,
        derivative_factory=lambda: make_constant(s / length / norm, interval),
    )

    def inverse(u):
        u = np.asarray(u, dtype=float)
        disc = 1.0 + 2.0 * s * (1.0 + s / 2) * u
        t = 2.0 * (1.0 + s / 2) * u / (1.0 + np.sqrt(disc))
        return a + length * t

    return make_pdf(g, min(1.0, 1.0 + s) / norm, inverse_cdf=inverse, label=f"linear:{s!r}")


# ---------------------------------------------------------------------------
# estimation


@dataclass(frozen=True, eq=False)
class McRun:
    pdf: Pdf
    seed: int
    n: int
    estimate: float
    trace: tuple[tuple[int, float], ...] | None = None
    algorithm: str = ALGORITHM_ID


def _check_domains(f: ScalarFunction, pdf: Pdf) -> None:
    if not f.domain.contains_interval(pdf.interval):
        raise DomainError(f"{f.id}: domain {f.domain} does not cover {pdf.interval}")


def sample_terms(f: ScalarFunction, pdf: Pdf, n: int, seed: int) -> np.ndarray:
    """The summands ``f(X_i)/g(X_i)`` along the path for ``seed``."""
    if n < 1:
        raise DomainError("sample count n must be >= 1")
    _check_domains(f, pdf)
    x = pdf.sampler(uniform_stream(seed, n))
    gx = pdf.g(x)
    if np.any(gx < pdf.lower_bound_m):
        raise NumericalError("pdf lower bound violated")
    terms = f(x) / gx
    if not np.all(np.isfinite(terms)):
        raise NumericalError(f"{f.id}: non-finite sample value")
    return terms


def running_mean(terms: np.ndarray, count: int) -> float:
    """Mean of ``terms[:count]``, shifted by the first term and exactly summed.

    A constant path therefore returns that constant exactly.
    """
    head = terms[:count]
    t0 = float(head[0])
    return t0 + math.fsum((head - t0).tolist()) / count


def sample_mean_estimate(
    f: ScalarFunction,
    pdf: Pdf,
    n: int,
    seed: int,
    checkpoints: Sequence[int] | None = None,
) -> McRun:
    terms = sample_terms(f, pdf, n, seed)
    trace = None
    if checkpoints:
        trace = tuple((int(c), running_mean(terms, int(c))) for c in checkpoints if 1 <= c <= n)
    return McRun(pdf=pdf, seed=int(seed), n=int(n), estimate=running_mean(terms, n), trace=trace)


def mc_norm_bound(pdf: Pdf) -> NormEstimate:
    """Certificate ``||M_n|| <= 1/m``, uniform in n."""
    return NormEstimate(
        value=1.0 / pdf.lower_bound_m,
        kind="exact",
        method="1/m upper-bound certificate",
    )


def pathwise_stability_gap(
    f: ScalarFunction, f0: ScalarFunction, pdf: Pdf, n: int, seed: int
) -> float:
    """``|M_n(f) - M_n(f0)|`` with both estimates on the same sample path."""
    a = sample_mean_estimate(f, pdf, n, seed).estimate
    b = sample_mean_estimate(f0, pdf, n, seed).estimate
    return abs(a - b)


@dataclass(frozen=True)
class TraceRow:
    seed: int
    n: int
    estimate: float
    abs_error: float | None


def convergence_trace(
    f: ScalarFunction,
    pdf: Pdf,
    schedule: Sequence[int],
    seeds: Sequence[int],
) -> list[TraceRow]:
    """Running means of one path per seed at each count in ``schedule``."""
    if not schedule:
        raise DomainError("schedule must be nonempty")
    counts = sorted(int(c) for c in schedule)
    exact = f.exact_integral
    rows = []
    for seed in seeds:
        terms = sample_terms(f, pdf, counts[-1], seed)
        for c in counts:
            est = running_mean(terms, c)
            rows.append(TraceRow(int(seed), c, est, None if exact is None else abs(est - exact)))
    return rows
