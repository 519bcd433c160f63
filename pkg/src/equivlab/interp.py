"""Polynomial interpolation operators ``P_n`` in barycentric form.

The operator norm of ``P_n`` on C[a, b] is the Lebesgue constant of its node
set. Equispaced nodes give exponentially growing constants (and Runge's
divergence); Chebyshev points give logarithmic growth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from equivlab.errors import DomainError
from equivlab.funcspace import (
    DEFAULT_REFINEMENT_TOL,
    DEFAULT_RESOLUTION,
    Interval,
    NormEstimate,
    ScalarFunction,
    make_runge,
    sup_norm,
)

NODE_KINDS = ("equispaced", "chebyshev", "custom")


def equispaced_nodes(n: int, interval: Interval) -> np.ndarray:
    if n < 0:
        raise DomainError("n must be >= 0")
    if n == 0:
        return np.array([0.5 * (interval.a + interval.b)])
    k = np.arange(n + 1)
    x = interval.a + interval.length * k / n
    x[-1] = interval.b
    return x


def chebyshev_nodes(n: int, interval: Interval) -> np.ndarray:
    """Chebyshev points of the second kind (extrema of T_n), ascending."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if n == 0:
        return np.array([0.5 * (interval.a + interval.b)])
    t = -np.cos(np.pi * np.arange(n + 1) / n)
    # exact symmetry about the midpoint
    t = 0.5 * (t - t[::-1])
    x = 0.5 * (interval.a + interval.b) + 0.5 * interval.length * t
    x[0], x[-1] = interval.a, interval.b
    return x


@dataclass(frozen=True, eq=False)
class NodeFamily:
    kind: str
    interval: Interval
    generator: Callable[[int], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.kind not in NODE_KINDS:
            raise DomainError(f"unknown node family {self.kind!r}")
        if self.kind == "custom" and self.generator is None:
            raise DomainError("custom node family needs a generator")

    def nodes(self, n: int) -> np.ndarray:
        if self.kind == "equispaced":
            x = equispaced_nodes(n, self.interval)
        elif self.kind == "chebyshev":
            x = chebyshev_nodes(n, self.interval)
        else:
            x = np.asarray(self.generator(n), dtype=float)
        _check_nodes(x, self.interval)
        if len(x) != n + 1:
            raise DomainError(f"node family returned {len(x)} nodes for n={n}")
        return x

    def barycentric_weights(self, n: int) -> np.ndarray:
        if n == 0:
            return np.ones(1)
        if self.kind == "equispaced":
            k = np.arange(n + 1)
            binom = np.array([math.comb(n, int(i)) for i in k], dtype=float)
            return np.where(k % 2 == 0, 1.0, -1.0) * binom
        if self.kind == "chebyshev":
            w = np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)
            w[0] *= 0.5
            w[-1] *= 0.5
            return w
        return barycentric_weights(self.nodes(n))


def _check_nodes(x: np.ndarray, interval: Interval | None = None) -> None:
    if x.ndim != 1 or x.size == 0:
        raise DomainError("nodes must be a nonempty 1-d sequence")
    if np.any(np.diff(x) <= 0):
        raise DomainError("interpolation nodes must be strictly increasing (no duplicates)")
    if interval is not None and not (interval.contains(x[0]) and interval.contains(x[-1])):
        raise DomainError("interpolation nodes must lie in the interval")


def barycentric_weights(nodes: Sequence[float]) -> np.ndarray:
    """``w_i = 1 / prod_{j != i} (x_i - x_j)``, rescaled to max |w| = 1.

    Differences are taken in coordinates scaled by the node spread over 4
    (the logarithmic capacity of an interval), which keeps the products in
    range for large n; a common factor cancels in the barycentric formula.
    """
    x = np.asarray(nodes, dtype=float)
    _check_nodes(x)
    if x.size == 1:
        return np.ones(1)
    scale = (x[-1] - x[0]) / 4.0
    diff = (x[:, None] - x[None, :]) / scale
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


@dataclass(frozen=True, eq=False)
class Interpolant:
    """Degree-``<= n`` interpolating polynomial in second barycentric form."""

    nodes: tuple[float, ...]
    values: tuple[float, ...]
    barycentric_weights: tuple[float, ...]
    domain: Interval

    @property
    def degree_bound(self) -> int:
        return len(self.nodes) - 1

    def __call__(self, x):
        xs = np.asarray(self.nodes)
        fs = np.asarray(self.values)
        ws = np.asarray(self.barycentric_weights)
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr).ravel()
        out = np.empty_like(flat)
        pos = np.searchsorted(xs, flat)
        pos_c = np.clip(pos, 0, len(xs) - 1)
        hit = xs[pos_c] == flat
        out[hit] = fs[pos_c[hit]]
        off = ~hit
        if np.any(off):
            d = flat[off, None] - xs[None, :]
            c = ws / d
            out[off] = (c @ fs) / c.sum(axis=1)
        out = out.reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    def as_function(self, label: str = "P_n f") -> ScalarFunction:
        return ScalarFunction(id=label, domain=self.domain, evaluator=self, smoothness=0)

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "values": list(self.values),
            "weights": list(self.barycentric_weights),
        }

    @classmethod
    def from_dict(cls, data: dict, domain: Interval | None = None) -> Interpolant:
        nodes = tuple(float(v) for v in data["nodes"])
        dom = domain or Interval(nodes[0], nodes[-1] if len(nodes) > 1 else nodes[0] + 1.0)
        return cls(
            nodes=nodes,
            values=tuple(float(v) for v in data["values"]),
            barycentric_weights=tuple(float(v) for v in data["weights"]),
            domain=dom,
        )


def interpolate(
    f: ScalarFunction,
    nodes: Sequence[float],
    weights: Sequence[float] | None = None,
) -> Interpolant:
    """``P_n f`` on the given nodes (n = len(nodes) - 1)."""
    x = np.asarray(nodes, dtype=float)
    _check_nodes(x, f.domain)
    w = barycentric_weights(x) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != x.shape or np.any(w == 0):
        raise DomainError("barycentric weights must be nonzero, one per node")
    values = np.atleast_1d(f(x))
    return Interpolant(
        nodes=tuple(float(v) for v in x),
        values=tuple(float(v) for v in values),
        barycentric_weights=tuple(float(v) for v in w),
        domain=f.domain,
    )


def lebesgue_function(
    nodes: Sequence[float],
    interval: Interval | None = None,
    weights: Sequence[float] | None = None,
) -> ScalarFunction:
    """``x -> sum_i |l_i(x)|`` for the Lagrange basis on ``nodes``."""
    xs = np.asarray(nodes, dtype=float)
    _check_nodes(xs)
    ws = barycentric_weights(xs) if weights is None else np.asarray(weights, dtype=float)
    dom = interval or Interval(xs[0], xs[-1])

    def ev(x):
        flat = np.atleast_1d(x).ravel()
        out = np.ones_like(flat)
        d = flat[:, None] - xs[None, :]
        on_node = np.any(d == 0, axis=1)
        off = ~on_node
        if np.any(off):
            c = ws / d[off]
            out[off] = np.abs(c).sum(axis=1) / np.abs(c.sum(axis=1))
        return out.reshape(np.shape(x))

    return ScalarFunction(id="lebesgue", domain=dom, evaluator=ev, smoothness=0)


def lebesgue_constant(
    nodes: Sequence[float],
    resolution: int | None = None,
    interval: Interval | None = None,
    weights: Sequence[float] | None = None,
    tol: float = DEFAULT_REFINEMENT_TOL,
) -> NormEstimate:
    """Sampled maximum of the Lebesgue function, a lower bound of ``||P_n||``."""
    xs = np.asarray(nodes, dtype=float)
    if xs.size == 1:
        return NormEstimate(value=1.0, kind="exact", method="single node: P_0 f = f(x0)")
    res = resolution if resolution is not None else max(DEFAULT_RESOLUTION, 10 * xs.size)
    if res < 10 * xs.size:
        raise DomainError("resolution must be at least 10 x number of nodes")
    est = sup_norm(lebesgue_function(xs, interval, weights), res, tol)
    return NormEstimate(
        value=est.value,
        kind="sampled",
        grid_points=res,
        refinement_tolerance=tol,
        method="Lebesgue function maximum",
    )


def interp_error_bound(deriv_bound: float, nodes: Sequence[float], x) -> float:
    """``deriv_bound/(n+1)! * |prod (x - x_i)|``, valid when
    ``deriv_bound >= sup |f^(n+1)|``."""
    xs = np.asarray(nodes, dtype=float)
    arr = np.asarray(x, dtype=float)
    prod = np.prod(arr[..., None] - xs, axis=-1)
    out = deriv_bound / math.factorial(xs.size) * np.abs(prod)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RungeRow:
    n: int
    max_error: float
    lebesgue: float


def interpolation_error(f: ScalarFunction, p: Interpolant, resolution: int = DEFAULT_RESOLUTION) -> float:
    return sup_norm(f - p.as_function(), resolution).value


def runge_study(
    family: NodeFamily,
    n_list: Sequence[int],
    f: ScalarFunction | None = None,
    resolution: int = DEFAULT_RESOLUTION,
) -> list[RungeRow]:
    """Max interpolation error and Lebesgue constant for each n."""
    if not n_list:
        raise DomainError("n_list must be nonempty")
    f = f if f is not None else make_runge()
    rows = []
    for n in n_list:
        x = family.nodes(n)
        w = family.barycentric_weights(n)
        p = interpolate(f, x, w)
        err = interpolation_error(f, p, resolution)
        lam = lebesgue_constant(x, max(resolution, 10 * x.size), family.interval, w).value
        rows.append(RungeRow(int(n), err, lam))
    return rows
