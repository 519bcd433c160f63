"""Quadrature rules ``I_n(f) = sum_i w_i f(x_i)`` and their operator norms.

Newton-Cotes weights are built in exact rational arithmetic; their absolute
sum grows without bound, which is the instability this package measures.
Gauss-Legendre and composite trapezoid rules have positive weights and so a
constant norm ``b - a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from equivlab.errors import DomainError, NumericalError
from equivlab.funcspace import (
    Interval,
    NormEstimate,
    ScalarFunction,
    make_piecewise_linear,
)

FAMILIES = ("newton_cotes", "gauss_legendre", "composite_trapezoid", "custom")

NEWTON_COTES_NODE_CAP = 64
GAUSS_MAX_ITER = 100
GAUSS_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    interval: Interval
    nodes: tuple[float, ...]
    weights: tuple[float, ...]
    family: str
    exactness_degree: int
    rational_weights: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown quadrature family {self.family!r}")
        if len(self.nodes) != len(self.weights) or not self.nodes:
            raise ValueError("nodes and weights must be nonempty and of equal length")
        x = np.asarray(self.nodes)
        if np.any(np.diff(x) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if not (self.interval.contains(x[0]) and self.interval.contains(x[-1])):
            raise ValueError("quadrature nodes must lie inside the interval")
        if self.rational_weights is not None and len(self.rational_weights) != len(self.weights):
            raise ValueError("rational weights do not match the float weights")
        if self.exactness_degree >= 0:
            if self.rational_weights is not None:
                exact_len = Fraction(self.interval.b) - Fraction(self.interval.a)
                if sum(self.rational_weights) != exact_len:
                    raise ValueError("rational weights do not sum to b - a")
            else:
                total = math.fsum(self.weights)
                if abs(total - self.interval.length) > 1e-12 * max(1.0, self.interval.length):
                    raise ValueError(f"weights sum to {total!r}, expected b - a")

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "interval": self.interval.as_list(),
            "nodes": list(self.nodes),
            "weights": list(self.weights),
            "exactness_degree": self.exactness_degree,
        }
        if self.rational_weights is not None:
            out["rational_weights"] = [
                {"num": str(w.numerator), "den": str(w.denominator)}
                for w in self.rational_weights
            ]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> QuadratureRule:
        rational = None
        if "rational_weights" in data:
            rational = tuple(
                Fraction(int(w["num"]), int(w["den"])) for w in data["rational_weights"]
            )
        return cls(
            interval=Interval(*data["interval"]),
            nodes=tuple(float(v) for v in data["nodes"]),
            weights=tuple(float(v) for v in data["weights"]),
            family=data["family"],
            exactness_degree=int(data["exactness_degree"]),
            rational_weights=rational,
        )


# ---------------------------------------------------------------------------
# Newton-Cotes


@lru_cache(maxsize=None)
def newton_cotes_reference_weights(num_nodes: int) -> tuple[Fraction, ...]:
    """Exact closed Newton-Cotes weights on ``[0, 1]``.

    With ``t = N*s`` on the integer nodes ``0..N`` the i-th weight is
    ``(1/N) * int_0^N prod_{j != i} (t - j)/(i - j) dt``; the node
    polynomial has integer coefficients, so everything stays in Z or Q.
    """
    if num_nodes < 2:
        raise DomainError("Newton-Cotes rules need at least 2 nodes")
    n = num_nodes - 1
    # prod_{j=0..n} (t - j), coefficients low -> high
    node_poly = [1]
    for j in range(n + 1):
        nxt = [0] * (len(node_poly) + 1)
        for k, c in enumerate(node_poly):
            nxt[k + 1] += c
            nxt[k] -= j * c
        node_poly = nxt
    powers = [n ** (k + 1) for k in range(n + 1)]
    weights = []
    for i in range(n + 1):
        # synthetic division by (t - i)
        quotient_high = []
        carry = 0
        for c in reversed(node_poly[1:]):
            carry = c + carry * i
            quotient_high.append(carry)
        quotient = quotient_high[::-1]
        integral = sum(Fraction(c * powers[k], k + 1) for k, c in enumerate(quotient))
        denom = math.factorial(i) * math.factorial(n - i) * (-1) ** (n - i)
        weights.append(integral / (denom * n))
    return tuple(weights)


def newton_cotes_rule(
    num_nodes: int,
    interval: Interval = Interval(0.0, 1.0),
    cap: int = NEWTON_COTES_NODE_CAP,
) -> QuadratureRule:
    """Closed Newton-Cotes rule with ``num_nodes`` equispaced nodes."""
    if num_nodes < 2:
        raise DomainError("Newton-Cotes rules need at least 2 nodes")
    if num_nodes > cap:
        raise DomainError(f"rational weight size cap: {num_nodes} nodes > cap {cap}")
    n = num_nodes - 1
    a, b = Fraction(interval.a), Fraction(interval.b)
    length = b - a
    rational = tuple(w * length for w in newton_cotes_reference_weights(num_nodes))
    nodes = tuple(float(a + length * i / n) for i in range(num_nodes))
    return QuadratureRule(
        interval=interval,
        nodes=nodes,
        weights=tuple(float(w) for w in rational),
        family="newton_cotes",
        exactness_degree=n + 1 if n % 2 == 0 else n,
        rational_weights=rational,
    )


# ---------------------------------------------------------------------------
# Gauss-Legendre


def legendre_with_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``P_n(x)`` and ``P_n'(x)`` by the three-term recurrence (|x| < 1)."""
    p_prev = np.ones_like(x)
    p = x.copy()
    if n == 0:
        return p_prev, np.zeros_like(x)
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre_rule(num_nodes: int, interval: Interval = Interval(-1.0, 1.0)) -> QuadratureRule:
    """Gauss-Legendre rule with ``num_nodes`` nodes, exact to degree ``2*num_nodes - 1``."""
    if num_nodes < 1:
        raise DomainError("Gauss-Legendre rules need at least 1 node")
    m = num_nodes
    i = np.arange(1, m + 1)
    x = np.cos(np.pi * (i - 0.25) / (m + 0.5))
    for _ in range(GAUSS_MAX_ITER):
        p, dp = legendre_with_derivative(m, x)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) <= GAUSS_TOL:
            break
    else:
        raise NumericalError(f"Gauss-Legendre Newton iteration did not converge for n={m}")
    _, dp = legendre_with_derivative(m, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x, w = x[::-1], w[::-1]
    # enforce the reflection symmetry of the exact rule
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    half = 0.5 * interval.length
    mid = 0.5 * (interval.a + interval.b)
    nodes = mid + half * x
    weights = half * w
    # fold the rounding of sum(w) back onto the rule so that sum(w) == b - a
    weights = weights * (interval.length / math.fsum(weights))
    return QuadratureRule(
        interval=interval,
        nodes=tuple(float(v) for v in nodes),
        weights=tuple(float(v) for v in weights),
        family="gauss_legendre",
        exactness_degree=2 * m - 1,
    )


# ---------------------------------------------------------------------------
# composite trapezoid


def composite_trapezoid_rule(panels: int, interval: Interval = Interval(0.0, 1.0)) -> QuadratureRule:
    if panels < 1:
        raise DomainError("composite trapezoid needs at least one panel")
    h = interval.length / panels
    nodes = [interval.a + k * h for k in range(panels)] + [interval.b]
    weights = [h / 2] + [h] * (panels - 1) + [h / 2]
    return QuadratureRule(
        interval=interval,
        nodes=tuple(nodes),
        weights=tuple(weights),
        family="composite_trapezoid",
        exactness_degree=1,
    )


def custom_rule(
    nodes: Sequence[float],
    weights: Sequence[float],
    interval: Interval,
    exactness_degree: int = -1,
) -> QuadratureRule:
    return QuadratureRule(
        interval=interval,
        nodes=tuple(float(v) for v in nodes),
        weights=tuple(float(v) for v in weights),
        family="custom",
        exactness_degree=exactness_degree,
    )


# ---------------------------------------------------------------------------
# application and norms


def apply(rule: QuadratureRule, f: ScalarFunction) -> float:
    """``sum_i w_i f(x_i)`` with exactly rounded summation."""
    if not f.domain.contains_interval(rule.interval):
        raise DomainError(f"{f.id}: domain {f.domain} does not cover {rule.interval}")
    values = f(np.asarray(rule.nodes))
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"{f.id}: non-finite value at a quadrature node")
    try:
        total = math.fsum((np.asarray(rule.weights) * values).tolist())
    except OverflowError:
        total = math.inf
    if not math.isfinite(total):
        raise NumericalError(f"{f.id}: quadrature sum overflowed")
    return total


def operator_norm(rule: QuadratureRule) -> NormEstimate:
    """``||I_n|| = sum_i |w_i|`` on C[a, b]."""
    if rule.rational_weights is not None:
        value = float(sum(abs(w) for w in rule.rational_weights))
        method = "sum of |weights|, exact rational"
    else:
        value = math.fsum(abs(w) for w in rule.weights)
        method = "sum of |weights|"
    return NormEstimate(value=value, kind="exact", method=method)


def norm_witness(rule: QuadratureRule, margin: float = 0.5) -> ScalarFunction:
    """Unit-sup piecewise-linear function with ``f(x_i) = sign(w_i)``.

    Around each node the witness holds ``sign(w_i)`` on a plateau that
    covers ``margin`` of the half-gap to each neighbour, then ramps
    linearly. ``apply(rule, witness)`` is then ``sum |w_i|``.
    """
    if not 0.0 < margin < 1.0:
        raise DomainError("margin must lie in (0, 1)")
    x = list(rule.nodes)
    s = [float(np.sign(w)) for w in rule.weights]
    a, b = rule.interval.a, rule.interval.b
    knots: list[tuple[float, float]] = []
    for i, (xi, si) in enumerate(zip(x, s)):
        left = a if i == 0 else xi - margin * (xi - x[i - 1]) / 2
        right = b if i == len(x) - 1 else xi + margin * (x[i + 1] - xi) / 2
        for pt in (left, xi, right):
            if not knots or pt > knots[-1][0]:
                knots.append((pt, si))
    if len(knots) == 1:
        knots.append((b, s[0]) if knots[0][0] < b else (a, s[0]))
        knots.sort()
    return make_piecewise_linear(knots)
