"""Finite-difference operators ``D_h`` on C^k[a, b].

Under the C^1 (resp. C^2) norm the first (resp. second) difference
quotients are bounded by 1 uniformly in h. Under the sup norm they are not:
``sup_norm_blowup`` exhibits unit-norm functions whose forward difference
has size ``2/h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


from equivlab.errors import DomainError
from equivlab.funcspace import (
    DEFAULT_RESOLUTION,
    Interval,
    NormEstimate,
    ScalarFunction,
    make_sinusoid,
    sup_norm,
)

STENCILS = ("forward", "backward", "central", "second_central")
_ORDER = {"forward": 1, "backward": 1, "central": 1, "second_central": 2}


@dataclass(frozen=True)
class DifferenceOperator:
    stencil: str
    step_h: float
    source_interval: Interval = Interval(0.0, 1.0)

    def __post_init__(self) -> None:
        if self.stencil not in STENCILS:
            raise DomainError(f"unknown stencil {self.stencil!r}")
        h = float(self.step_h)
        if not 0.0 < h < 1.0:
            raise DomainError(f"step h must lie in (0, 1), got {h!r}")
        object.__setattr__(self, "step_h", h)
        # raises if the shrunk interval is empty
        self.valid_interval  # noqa: B018

    @property
    def order(self) -> int:
        return _ORDER[self.stencil]

    @property
    def valid_interval(self) -> Interval:
        a, b, h = self.source_interval.a, self.source_interval.b, self.step_h
        try:
            if self.stencil == "forward":
                return Interval(a, b - h)
            if self.stencil == "backward":
                return Interval(a + h, b)
            return Interval(a + h, b - h)
        except DomainError as exc:
            raise DomainError(f"step h={h!r} too large for {self.source_interval}") from exc


def apply_diff(op: DifferenceOperator, f: ScalarFunction) -> ScalarFunction:
    """The difference quotient of ``f`` as a function on ``op.valid_interval``."""
    if not f.domain.contains_interval(op.source_interval):
        raise DomainError(f"{f.id}: domain {f.domain} does not cover {op.source_interval}")
    h = op.step_h
    if op.stencil == "forward":
        ev = lambda x: (f(x + h) - f(x)) / h  # noqa: E731
    elif op.stencil == "backward":
        ev = lambda x: (f(x) - f(x - h)) / h  # noqa: E731
    elif op.stencil == "central":
        ev = lambda x: (f(x + h) - f(x - h)) / (2 * h)  # noqa: E731
    else:
        ev = lambda x: (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)  # noqa: E731
    return ScalarFunction(
        id=f"D[{op.stencil},{h!r}]{f.id}",
        domain=op.valid_interval,
        evaluator=ev,
        smoothness=f.smoothness,
    )


def c1_norm_certificate(op: DifferenceOperator) -> NormEstimate:
    """``||D_h|| <= 1`` from C^1 to C, by the mean value theorem."""
    if op.order != 1:
        raise DomainError(f"C^1 certificate needs a first-order stencil, got {op.stencil!r}")
    method = "mean-value certificate under the C^1 norm"
    if op.stencil == "central":
        method += " (extension)"
    return NormEstimate(value=1.0, kind="exact", method=method)


def c2_norm_certificate(op: DifferenceOperator) -> NormEstimate:
    """``||D_h^(2)|| <= 1`` from C^2 to C, by two mean-value steps."""
    if op.stencil != "second_central":
        raise DomainError(f"C^2 certificate needs the second_central stencil, got {op.stencil!r}")
    return NormEstimate(value=1.0, kind="exact", method="mean-value certificate under the C^2 norm")


def blowup_witness(h: float, domain: Interval = Interval(0.0, 1.0)) -> ScalarFunction:
    """``sin(pi*x/h)``: consecutive samples at spacing h have opposite signs,
    so the forward difference reaches ``2/h`` times the sup norm.
    """
    h = float(h)
    if not 0.0 < h < 1.0:
        raise DomainError(f"h must lie in (0, 1), got {h!r}")
    return make_sinusoid(1.0, math.pi / h, domain, 0, label=f"half-wave-probe:{h!r}")


def sup_norm_blowup(
    h: float,
    domain: Interval = Interval(0.0, 1.0),
    resolution: int = DEFAULT_RESOLUTION,
) -> tuple[ScalarFunction, float]:
    """Lower bound for the sup-to-sup norm of the forward difference at step h.

    Returns the witness and ``||D_h w||_inf / ||w||_inf``.
    """
    witness = blowup_witness(h, domain)
    op = DifferenceOperator("forward", h, domain)
    num = sup_norm(apply_diff(op, witness), resolution).value
    den = sup_norm(witness, resolution).value
    return witness, num / den


@dataclass(frozen=True)
class StudyRow:
    h: float
    sup_error: float
    ratio_prev: float | None


def convergence_study(
    stencil: str,
    f: ScalarFunction,
    h_schedule: Sequence[float],
    resolution: int = DEFAULT_RESOLUTION,
) -> list[StudyRow]:
    """Sup-norm error of the difference quotient against the exact derivative.

    ``ratio_prev`` is the previous row's error divided by this one.
    """
    order = _ORDER.get(stencil)
    if order is None:
        raise DomainError(f"unknown stencil {stencil!r}")
    exact = f.derivative(order)
    rows: list[StudyRow] = []
    for h in h_schedule:
        op = DifferenceOperator(stencil, h, f.domain)
        approx = apply_diff(op, f)
        err = sup_norm(approx - exact.restrict(op.valid_interval), resolution).value
        prev = rows[-1].sup_error if rows else None
        ratio = prev / err if prev is not None and err > 0 else None
        rows.append(StudyRow(float(h), err, ratio))
    return rows


def forward_difference_probe_norm(h: float, domain: Interval = Interval(0.0, 1.0)) -> NormEstimate:
    """Sampled lower bound of ``||D_h||`` under the sup norm on both sides."""
    _, ratio = sup_norm_blowup(h, domain)
    return NormEstimate(
        value=ratio,
        kind="lower_bound",
        grid_points=DEFAULT_RESOLUTION,
        method="half-wave sine probe",
    )

