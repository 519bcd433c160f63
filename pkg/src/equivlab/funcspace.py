"""Real functions on closed intervals, their sup and C^k norms, and the
function corpus (dense-subspace generators and adversarial probes) the
operator modules are exercised on.

Evaluators are numpy-vectorized: they receive a float array and return an
array of the same shape. ``ScalarFunction.__call__`` accepts scalars too.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from equivlab.errors import DomainError, NumericalError

UNBOUNDED_SMOOTHNESS = sys.maxsize

DEFAULT_RESOLUTION = 4096
DEFAULT_REFINEMENT_TOL = 1e-12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_GOLDEN_STEPS = 200


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[a, b]`` with finite ``a < b``."""

    a: float
    b: float

    def __post_init__(self) -> None:
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise DomainError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def slack(self) -> float:
        # absorbs rounding in expressions such as x + h at the right edge
        return 1e-12 * max(1.0, abs(self.a), abs(self.b))

    def contains(self, x: float) -> bool:
        return self.a - self.slack <= x <= self.b + self.slack

    def contains_interval(self, other: Interval) -> bool:
        return self.contains(other.a) and self.contains(other.b)

    def intersect(self, other: Interval) -> Interval:
        return Interval(max(self.a, other.a), min(self.b, other.b))

    def as_list(self) -> list[float]:
        return [self.a, self.b]

    def __str__(self) -> str:
        return f"[{self.a!r}, {self.b!r}]"


NORM_KINDS = ("exact", "lower_bound", "sampled")


@dataclass(frozen=True)
class NormEstimate:
    """A norm value together with how it was obtained.

    ``kind="sampled"`` values are maxima over evaluated points, so the true
    norm is at least ``value``. ``kind="exact"`` is either a closed form or
    an analytic certificate (see ``method``).
    """

    value: float
    kind: str
    grid_points: int = 0
    refinement_tolerance: float = 0.0
    method: str = ""

    def __post_init__(self) -> None:
        if self.kind not in NORM_KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if not self.value >= 0.0:
            raise ValueError(f"norm value must be nonnegative, got {self.value}")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "kind": self.kind,
            "grid_points": self.grid_points,
            "refinement_tolerance": self.refinement_tolerance,
            "method": self.method,
        }


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    """A deterministic real function on ``domain``.

    ``smoothness`` is declared, not verified. The exact derivative is
    produced on demand by ``derivative_factory`` so that infinite chains
    (sines, exponentials, the zero function) stay finite objects.
    """

    id: str
    domain: Interval
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    smoothness: int = 0
    exact_integral: float | None = None
    derivative_factory: Callable[[], ScalarFunction] | None = field(
        default=None, repr=False
    )

    def __post_init__(self) -> None:
        if self.smoothness < 0:
            raise ValueError("smoothness must be >= 0")
        if self.derivative_factory is not None and self.smoothness < 1:
            raise ValueError(
                f"{self.id}: an exact derivative requires smoothness >= 1"
            )

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        lo, hi = self.domain.a, self.domain.b
        slack = self.domain.slack
        inside = (arr >= lo - slack) & (arr <= hi + slack)
        if not np.all(inside):
            bad = arr[~inside] if arr.ndim else arr
            raise DomainError(
                f"{self.id}: evaluation at x={float(np.ravel(bad)[0])!r} "
                f"outside {self.domain}"
            )
        arr = np.clip(arr, lo, hi)
        y = np.asarray(self.evaluator(arr), dtype=float)
        if y.shape != arr.shape:
            y = np.broadcast_to(y, arr.shape).copy()
        return float(y) if y.ndim == 0 else y

    @property
    def exact_derivative(self) -> ScalarFunction | None:
        if self.derivative_factory is None:
            return None
        d = self.derivative_factory()
        if self.smoothness != UNBOUNDED_SMOOTHNESS and d.smoothness < self.smoothness - 1:
            raise ValueError(f"{self.id}: derivative smoothness below smoothness-1")
        return d

    def derivative(self, order: int) -> ScalarFunction:
        """Follow the exact derivative chain ``order`` steps."""
        g = self
        for i in range(order):
            nxt = g.exact_derivative
            if nxt is None:
                raise DomainError(
                    f"{self.id}: exact derivative of order {i + 1} unavailable"
                )
            g = nxt
        return g

    def restrict(self, interval: Interval) -> ScalarFunction:
        if not self.domain.contains_interval(interval):
            raise DomainError(f"{self.id}: cannot restrict {self.domain} to {interval}")
        same = interval == self.domain
        factory = self.derivative_factory
        return ScalarFunction(
            id=self.id,
            domain=interval,
            evaluator=self.evaluator,
            smoothness=self.smoothness,
            exact_integral=self.exact_integral if same else None,
            derivative_factory=(
                (lambda: factory().restrict(interval)) if factory is not None else None
            ),
        )

    # linear structure -------------------------------------------------

    def scale(self, c: float) -> ScalarFunction:
        c = float(c)
        ev = self.evaluator
        factory = self.derivative_factory
        return ScalarFunction(
            id=f"{c!r}*{self.id}",
            domain=self.domain,
            evaluator=lambda x: c * ev(x),
            smoothness=self.smoothness,
            exact_integral=None if self.exact_integral is None else c * self.exact_integral,
            derivative_factory=(
                (lambda: factory().scale(c)) if factory is not None else None
            ),
        )

    def combine(self, alpha: float, other: ScalarFunction, beta: float) -> ScalarFunction:
        """Return ``alpha*self + beta*other`` on the common domain."""
        alpha, beta = float(alpha), float(beta)
        dom = self.domain.intersect(other.domain)
        f_ev, g_ev = self.evaluator, other.evaluator
        integral = None
        if (
            self.domain == other.domain
            and self.exact_integral is not None
            and other.exact_integral is not None
        ):
            integral = alpha * self.exact_integral + beta * other.exact_integral
        factory = None
        if self.derivative_factory is not None and other.derivative_factory is not None:
            fd, gd = self.derivative_factory, other.derivative_factory
            factory = lambda: fd().combine(alpha, gd(), beta)  # noqa: E731
        return ScalarFunction(
            id=f"({alpha!r}*{self.id}+{beta!r}*{other.id})",
            domain=dom,
            evaluator=lambda x: alpha * f_ev(x) + beta * g_ev(x),
            smoothness=min(self.smoothness, other.smoothness),
            exact_integral=integral,
            derivative_factory=factory,
        )

    def __add__(self, other):
        if isinstance(other, ScalarFunction):
            return self.combine(1.0, other, 1.0)
        return self.combine(1.0, make_constant(float(other), self.domain), 1.0)

    def __sub__(self, other):
        if isinstance(other, ScalarFunction):
            return self.combine(1.0, other, -1.0)
        return self.combine(1.0, make_constant(float(other), self.domain), -1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, c):
        if isinstance(c, ScalarFunction):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# norms


def chebyshev_grid(interval: Interval, resolution: int) -> np.ndarray:
    """Chebyshev extreme points mapped to ``interval``, ascending, endpoints exact."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    k = np.arange(resolution)
    t = -np.cos(np.pi * k / (resolution - 1))
    x = interval.a + (interval.b - interval.a) * (t + 1.0) / 2.0
    x[0], x[-1] = interval.a, interval.b
    return x


def _finite_abs(f: ScalarFunction, x: np.ndarray) -> np.ndarray:
    y = np.abs(np.asarray(f(x), dtype=float))
    bad = ~np.isfinite(y)
    if np.any(bad):
        raise NumericalError(f"non-finite evaluation at x={float(x[bad][0])!r}")
    return y


def _golden_refine(f: ScalarFunction, lo: np.ndarray, hi: np.ndarray, tol: float) -> float:
    """Vectorized golden-section maximization of |f| over each bracket.

    Returns the largest |f| seen at any evaluated point, so the result never
    exceeds the true maximum.
    """
    best = 0.0
    for _ in range(_MAX_GOLDEN_STEPS):
        width = hi - lo
        c = hi - _GOLDEN * width
        d = lo + _GOLDEN * width
        fc = _finite_abs(f, c)
        fd = _finite_abs(f, d)
        best = max(best, float(fc.max()), float(fd.max()))
        if float(np.max(width)) <= tol:
            break
        left = fc >= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    return best


def sup_norm(
    f: ScalarFunction,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float = DEFAULT_REFINEMENT_TOL,
) -> NormEstimate:
    """Sampled ``max |f|`` over ``f.domain``.

    |f| is evaluated on a Chebyshev-clustered grid of ``resolution`` points;
    every discrete local maximum is then refined by golden-section search
    on its neighbouring bracket down to width ``tol``.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    x = chebyshev_grid(f.domain, resolution)
    y = _finite_abs(f, x)
    best = float(y.max())
    left = np.concatenate(([-np.inf], y[:-1]))
    right = np.concatenate((y[1:], [-np.inf]))
    idx = np.nonzero((y >= left) & (y >= right))[0]
    if idx.size:
        lo = x[np.maximum(idx - 1, 0)]
        hi = x[np.minimum(idx + 1, resolution - 1)]
        best = max(best, _golden_refine(f, lo, hi, tol))
    return NormEstimate(
        value=best,
        kind="sampled",
        grid_points=resolution,
        refinement_tolerance=tol,
        method="chebyshev grid + golden-section refinement",
    )


def ck_norm(
    f: ScalarFunction,
    k: int,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float = DEFAULT_REFINEMENT_TOL,
) -> NormEstimate:
    """``sum_{i<=k} ||f^(i)||_inf`` using the exact derivative chain."""
    if k < 0:
        raise ValueError("k must be >= 0")
    total = 0.0
    g = f
    for i in range(k + 1):
        if i > 0:
            g = g.exact_derivative
            if g is None:
                raise DomainError("C^k norm requires k exact derivatives")
        total += sup_norm(g, resolution, tol).value
    return NormEstimate(
        value=total,
        kind="sampled",
        grid_points=resolution,
        refinement_tolerance=tol,
        method=f"C^{k} norm: sum of sampled derivative sup norms",
    )


# ---------------------------------------------------------------------------
# corpus


def make_constant(c: float, domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    c = float(c)
    return ScalarFunction(
        id=f"const:{c!r}",
        domain=domain,
        evaluator=lambda x: np.full(np.shape(x), c),
        smoothness=UNBOUNDED_SMOOTHNESS,
        exact_integral=c * domain.length,
        derivative_factory=lambda: make_constant(0.0, domain),
    )


def _power_integral(d: int, a: float, b: float) -> float:
    fa, fb = Fraction(a), Fraction(b)
    return float((fb ** (d + 1) - fa ** (d + 1)) / (d + 1))


def _int_power(x: np.ndarray, d: int) -> np.ndarray:
    # binary powering; np.power with an integer exponent is ~50x slower
    result = None
    base = np.asarray(x, dtype=float)
    while d:
        if d & 1:
            result = base if result is None else result * base
        d >>= 1
        if d:
            base = base * base
    return result


def make_monomial(d: int, domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    """``x -> x**d`` with exact integral and derivative chain."""
    if d < 0:
        raise ValueError("monomial degree must be >= 0")
    if d == 0:
        ev = lambda x: np.ones(np.shape(x))  # noqa: E731
        factory = lambda: make_constant(0.0, domain)  # noqa: E731
    else:
        ev = lambda x: _int_power(x, d)  # noqa: E731
        factory = lambda: make_monomial(d - 1, domain).scale(d) if d > 1 else make_constant(1.0, domain)  # noqa: E731
    return ScalarFunction(
        id=f"monomial:{d}",
        domain=domain,
        evaluator=ev,
        smoothness=UNBOUNDED_SMOOTHNESS,
        exact_integral=_power_integral(d, domain.a, domain.b),
        derivative_factory=factory,
    )


RUNGE_DOMAIN = Interval(-1.0, 1.0)


def make_runge() -> ScalarFunction:
    """``1/(1+25x^2)`` on ``[-1, 1]``."""
    return ScalarFunction(
        id="runge",
        domain=RUNGE_DOMAIN,
        evaluator=lambda x: 1.0 / (1.0 + 25.0 * x * x),
        smoothness=UNBOUNDED_SMOOTHNESS,
        exact_integral=0.4 * math.atan(5.0),
    )


def make_piecewise_linear(knots: Sequence[tuple[float, float]]) -> ScalarFunction:
    """Continuous piecewise-linear interpolant of ``knots``."""
    pts = [(float(x), float(y)) for x, y in knots]
    if len(pts) < 2:
        raise DomainError("piecewise-linear function needs at least two knots")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if not np.all(np.diff(xs) > 0):
        raise DomainError("knot abscissae must be strictly increasing")
    integral = math.fsum(
        0.5 * (xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]) for i in range(len(xs) - 1)
    )
    label = ";".join(f"{x!r},{y!r}" for x, y in pts)
    return ScalarFunction(
        id=f"pl:{label}",
        domain=Interval(xs[0], xs[-1]),
        evaluator=lambda x: np.interp(x, xs, ys),
        smoothness=0,
        exact_integral=integral,
    )


_QUARTER_WAVES = (np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t))


def make_sinusoid(
    amplitude: float = 1.0,
    omega: float = 1.0,
    domain: Interval = Interval(0.0, 1.0),
    quarter: int = 0,
    label: str | None = None,
) -> ScalarFunction:
    """``amplitude * s(omega*x)`` where s is sin, cos, -sin, -cos for quarter 0..3.

    Each derivative advances ``quarter`` by one, so the chain never leaves
    the family and never loses exactness to a phase shift.
    """
    amplitude, omega = float(amplitude), float(omega)
    quarter %= 4
    wave = _QUARTER_WAVES[quarter]
    antider = _QUARTER_WAVES[(quarter + 3) % 4]
    integral = amplitude / omega * (
        float(antider(omega * domain.b)) - float(antider(omega * domain.a))
    )
    name = label or f"{amplitude!r}*{['sin', 'cos', '-sin', '-cos'][quarter]}({omega!r}x)"
    return ScalarFunction(
        id=name,
        domain=domain,
        evaluator=lambda x: amplitude * wave(omega * x),
        smoothness=UNBOUNDED_SMOOTHNESS,
        exact_integral=integral,
        derivative_factory=lambda: make_sinusoid(amplitude * omega, omega, domain, quarter + 1),
    )


def make_sin(domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    return make_sinusoid(1.0, 1.0, domain, 0, label="sin")


def make_cos(domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    return make_sinusoid(1.0, 1.0, domain, 1, label="cos")


def make_exp(domain: Interval = Interval(0.0, 1.0), rate: float = 1.0, scale: float = 1.0) -> ScalarFunction:
    rate, scale = float(rate), float(scale)
    label = "exp" if (rate, scale) == (1.0, 1.0) else f"{scale!r}*exp({rate!r}x)"
    return ScalarFunction(
        id=label,
        domain=domain,
        evaluator=lambda x: scale * np.exp(rate * x),
        smoothness=UNBOUNDED_SMOOTHNESS,
        exact_integral=scale / rate * (math.exp(rate * domain.b) - math.exp(rate * domain.a)),
        derivative_factory=lambda: make_exp(domain, rate, scale * rate),
    )


def make_sine_probe(h: float, domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    """``sin(2*pi*x/h)``: unit sup norm, derivative of size ``2*pi/h``."""
    h = float(h)
    if not 0.0 < h < 1.0:
        raise DomainError(f"sine probe requires h in (0, 1), got {h!r}")
    return make_sinusoid(1.0, 2.0 * math.pi / h, domain, 0, label=f"sine-probe:{h!r}")


def make_kink(center: float = 0.5, domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    """``|x - center|``: continuous, not differentiable at ``center``."""
    c = float(center)
    if not domain.a < c < domain.b:
        raise DomainError("kink center must be interior to the domain")
    a, b = domain.a, domain.b
    return ScalarFunction(
        id=f"kink:{c!r}",
        domain=domain,
        evaluator=lambda x: np.abs(x - c),
        smoothness=0,
        exact_integral=0.5 * ((c - a) ** 2 + (b - c) ** 2),
    )


def make_sign(center: float = 0.5, domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    """``sign(x - center)`` with value -1 at the center: the a.e. derivative of a kink."""
    c = float(center)
    return ScalarFunction(
        id=f"sign:{c!r}",
        domain=domain,
        evaluator=lambda x: np.where(x > c, 1.0, -1.0),
        smoothness=0,
    )


# ---------------------------------------------------------------------------
# string ids


def _parse_domain(text: str) -> Interval:
    parts = text.split(",")
    if len(parts) != 2:
        raise DomainError(f"bad domain {text!r}; expected a,b")
    return Interval(float(parts[0]), float(parts[1]))


def from_id(spec: str) -> ScalarFunction:
    """Build a corpus function from its string id.

    Accepted forms: ``runge``, ``sin``, ``cos``, ``exp``, ``monomial:d``,
    ``const:c``, ``kink:c``, ``sine-probe:h``, ``pl:x0,y0;x1,y1;...``.
    All but ``pl`` take an optional ``@a,b`` domain suffix (``runge`` only ``@-1,1``)
    (default ``[0, 1]``).
    """
    text = spec.strip()
    if text.startswith("pl:"):
        body = text[3:]
        try:
            knots = [tuple(float(v) for v in item.split(",")) for item in body.split(";")]
        except ValueError as exc:
            raise DomainError(f"bad knot list in {spec!r}") from exc
        if any(len(k) != 2 for k in knots):
            raise DomainError(f"bad knot list in {spec!r}")
        return make_piecewise_linear(knots)
    name, _, dom_text = text.partition("@")
    domain = _parse_domain(dom_text) if dom_text else Interval(0.0, 1.0)
    head, _, arg = name.partition(":")
    try:
        if head == "runge" and not arg:
            if dom_text and domain != RUNGE_DOMAIN:
                raise DomainError("runge is fixed to [-1, 1]")
            return make_runge()
        if head == "sin" and not arg:
            return make_sin(domain)
        if head == "cos" and not arg:
            return make_cos(domain)
        if head == "exp" and not arg:
            return make_exp(domain)
        if head == "monomial" and arg:
            return make_monomial(int(arg), domain)
        if head == "const" and arg:
            return make_constant(float(arg), domain)
        if head == "kink" and arg:
            return make_kink(float(arg), domain)
        if head == "sine-probe" and arg:
            return make_sine_probe(float(arg), domain)
    except ValueError as exc:
        raise DomainError(f"bad function id {spec!r}: {exc}") from exc
    raise DomainError(f"unknown function id {spec!r}")
