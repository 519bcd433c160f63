"""Consistency / stability / convergence verdicts for an operator family,
cross-checked against the equivalence theorem.

For a consistent family, convergence holds exactly when the operator norms
stay bounded; and convergence alone already forces bounded norms. Any
verdict triple that breaks this truth table is reported as a
CONTRADICTION. On a built-in family that is a bug in this package.

Verdicts are three-valued. A finite schedule cannot prove a limit, so every
decision rule is a finite-range proxy whose thresholds are echoed in the
report. The "yes" and "no" rules of each check demand opposite tail shapes
(strictly shrinking vs. not shrinking), so for any one trace they can never
both fire. Tightening a threshold can therefore only move a verdict to
``inconclusive``, never from ``yes`` straight to ``no``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from equivlab.errors import DomainError
from equivlab.funcspace import NormEstimate, ScalarFunction, make_monomial, sup_norm

YES, NO, INCONCLUSIVE = "yes", "no", "inconclusive"
CONSISTENT = "consistent_with_theorem"
CONTRADICTION = "CONTRADICTION"


@dataclass(frozen=True)
class AuditConfig:
    max_degree: int = 12
    consistency_tol: float = 1e-8
    convergence_tol: float = 1e-6
    growth_factor: float = 1.5
    window: int = 4
    slope_threshold: float = 0.5
    r2_threshold: float = 0.9
    total_growth: float = 10.0
    bounded_away_factor: float = 10.0
    tail_length: int = 3
    # errors below noise_floor * roundoff_scale(index) count as zero
    noise_floor: float = 1e-12
    # relative wiggle tolerated before a step counts as "not shrinking"
    tail_slack: float = 1e-6
    panel_fraction: float = 0.95
    resolution: int = 4096

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Verdict:
    value: str
    rationale: str
    metric_trace: tuple[dict, ...] = ()

    def __post_init__(self) -> None:
        if self.value not in (YES, NO, INCONCLUSIVE):
            raise ValueError(f"bad verdict {self.value!r}")


@dataclass(frozen=True, eq=False)
class FamilyUnderTest:
    """An indexed operator family and the exact operator it approximates.

    ``discrete_apply(index, f)`` returns a float, a ScalarFunction, or (for
    seed-panel families) an array with one estimate per panel seed.
    """

    family_id: str
    index_kind: str
    discrete_apply: Callable[[Any, ScalarFunction], Any]
    reference_apply: Callable[[ScalarFunction], Any]
    norm_of: Callable[[Any], NormEstimate]
    index_schedule: tuple
    dense_generator: Callable[[int], ScalarFunction] = make_monomial
    extra_dense: tuple[ScalarFunction, ...] = ()
    corpus: tuple[ScalarFunction, ...] = ()
    roundoff_scale: Callable[[Any], float] | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.index_kind not in ("by_n", "by_h"):
            raise DomainError(f"index_kind must be by_n or by_h, got {self.index_kind!r}")
        sched = list(self.index_schedule)
        if not sched:
            raise DomainError("index_schedule must be nonempty")
        steps = np.diff(np.asarray(sched, dtype=float))
        if self.index_kind == "by_n" and np.any(steps <= 0):
            raise DomainError("by_n schedules must be strictly increasing")
        if self.index_kind == "by_h" and np.any(steps >= 0):
            raise DomainError("by_h schedules must be strictly decreasing")

    def refinement(self, index) -> float:
        """Index mapped so that larger means finer (n, or 1/h)."""
        return float(index) if self.index_kind == "by_n" else 1.0 / float(index)


@dataclass
class AuditReport:
    family_id: str
    consistency: Verdict
    stability: Verdict
    convergence: Verdict
    theorem_check: str
    notes: list[str] = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.consistency.value, self.stability.value, self.convergence.value)

    @property
    def evidence(self) -> dict[str, list[dict]]:
        return {
            "consistency": list(self.consistency.metric_trace),
            "stability": list(self.stability.metric_trace),
            "convergence": list(self.convergence.metric_trace),
        }

    def to_dict(self) -> dict:
        return {
            "family_id": self.family_id,
            "verdicts": {
                "consistency": self.consistency.value,
                "stability": self.stability.value,
                "convergence": self.convergence.value,
            },
            "rationales": {
                "consistency": self.consistency.rationale,
                "stability": self.stability.rationale,
                "convergence": self.convergence.rationale,
            },
            "theorem_check": self.theorem_check,
            "notes": list(self.notes),
            "thresholds": dict(self.config_echo),
            "evidence": self.evidence,
        }


# ---------------------------------------------------------------------------
# helpers


def discrepancy(result, reference, cfg: AuditConfig) -> float:
    """Distance between a discrete result and the exact one.

    Functions are compared in sup norm on the discrete result's domain;
    seed panels by the ``panel_fraction`` order statistic of the errors,
    so ``value <= tol`` means that fraction of seeds is within ``tol``.
    """
    if isinstance(result, ScalarFunction):
        ref = reference.restrict(result.domain) if reference.domain != result.domain else reference
        return sup_norm(result - ref, cfg.resolution).value
    arr = np.asarray(result, dtype=float)
    if arr.ndim == 0:
        return abs(float(arr) - float(reference))
    errs = np.sort(np.abs(arr - float(reference)))
    k = max(0, math.ceil(cfg.panel_fraction * errs.size) - 1)
    return float(errs[k])


def _shrinking_step(prev: float, cur: float, floor: float, slack: float) -> bool:
    return cur <= floor or cur <= prev * (1.0 - slack)


def tail_shrinks(errors: Sequence[float], floors: Sequence[float], slack: float) -> bool:
    return all(
        _shrinking_step(errors[k], errors[k + 1], floors[k + 1], slack)
        for k in range(len(errors) - 1)
    )


def tail_stalls(errors: Sequence[float], floors: Sequence[float], slack: float) -> bool:
    """Every step fails to shrink (the complement of a shrinking step)."""
    return len(errors) > 1 and all(
        not _shrinking_step(errors[k], errors[k + 1], floors[k + 1], slack)
        for k in range(len(errors) - 1)
    )


def loglog_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope and R^2 of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if np.ptp(lx) == 0:
        return 0.0, 0.0
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), r2


def _norms(fut: FamilyUnderTest) -> list[NormEstimate]:
    out = []
    for idx in fut.index_schedule:
        est = fut.norm_of(idx)
        if est is None:
            raise DomainError(f"{fut.family_id}: norm unavailable at index {idx!r}")
        out.append(est)
    return out


def _floors(fut: FamilyUnderTest, cfg: AuditConfig, norms: Sequence[NormEstimate] | None) -> list[float]:
    floors = []
    for i, idx in enumerate(fut.index_schedule):
        if fut.roundoff_scale is not None:
            scale = fut.roundoff_scale(idx)
        elif norms is not None:
            scale = norms[i].value
        else:
            scale = fut.norm_of(idx).value
        floors.append(cfg.noise_floor * max(1.0, scale))
    return floors


def _error_traces(
    fut: FamilyUnderTest, probes: Sequence[ScalarFunction], cfg: AuditConfig
) -> list[tuple[ScalarFunction, list[float]]]:
    traces = []
    for f in probes:
        ref = fut.reference_apply(f)
        if ref is None:
            raise DomainError(f"{fut.family_id}: no exact reference for {f.id}")
        errs = [discrepancy(fut.discrete_apply(idx, f), ref, cfg) for idx in fut.index_schedule]
        traces.append((f, errs))
    return traces


def _trace_rows(check: str, traces, fut: FamilyUnderTest, floors) -> tuple[dict, ...]:
    rows = []
    for f, errs in traces:
        for idx, e, fl in zip(fut.index_schedule, errs, floors):
            rows.append({"check": check, "probe": f.id, "index": idx, "error": e, "noise_floor": fl})
    return tuple(rows)


# ---------------------------------------------------------------------------
# checks


def check_consistency(
    fut: FamilyUnderTest,
    max_degree: int | None = None,
    tol: float | None = None,
    config: AuditConfig | None = None,
    norms: Sequence[NormEstimate] | None = None,
) -> Verdict:
    """Convergence on the dense subspace spanned by the generators.

    yes: every generator ends below tol with a shrinking tail.
    no: some generator exceeds tol at every index and its tail stalls.
    """
    cfg = config or AuditConfig()
    max_degree = cfg.max_degree if max_degree is None else max_degree
    tol = cfg.consistency_tol if tol is None else tol
    if max_degree < 2:
        raise DomainError("max_degree must be >= 2")
    probes = [fut.dense_generator(d) for d in range(max_degree + 1)] + list(fut.extra_dense)
    floors = _floors(fut, cfg, norms)
    traces = _error_traces(fut, probes, cfg)
    tail = cfg.tail_length
    rows = _trace_rows("consistency", traces, fut, floors)
    good, bad = [], []
    for f, errs in traces:
        if errs[-1] <= tol and tail_shrinks(errs[-tail:], floors[-tail:], cfg.tail_slack):
            good.append(f.id)
        elif all(e > tol for e in errs) and tail_stalls(errs[-tail:], floors[-tail:], cfg.tail_slack):
            bad.append(f.id)
    if bad:
        return Verdict(NO, f"dense generators not approximated: {', '.join(bad)}", rows)
    if len(good) == len(traces):
        return Verdict(YES, f"all {len(traces)} dense generators below tol={tol!r} with shrinking tails", rows)
    undecided = [f.id for f, _ in traces if f.id not in good]
    return Verdict(INCONCLUSIVE, f"undecided generators: {', '.join(undecided)}", rows)


def check_stability(
    fut: FamilyUnderTest,
    growth_factor: float | None = None,
    window: int | None = None,
    config: AuditConfig | None = None,
    norms: Sequence[NormEstimate] | None = None,
) -> Verdict:
    """Uniform boundedness of the operator norms over the schedule.

    no (checked first, independent of growth_factor): the log-log slope of
    norm against refinement over the final window is >= slope_threshold with
    R^2 >= r2_threshold, or the norms grow monotonically by more than
    total_growth overall.
    yes: max/min over the final window and last/first are both <= growth_factor.
    """
    cfg = config or AuditConfig()
    growth_factor = cfg.growth_factor if growth_factor is None else growth_factor
    window = cfg.window if window is None else window
    if window < 3:
        raise DomainError("window must be >= 3")
    norms = list(norms) if norms is not None else _norms(fut)
    values = [n.value for n in norms]
    rows = tuple(
        {"check": "stability", "index": idx, "norm": n.value, "kind": n.kind, "method": n.method}
        for idx, n in zip(fut.index_schedule, norms)
    )
    if len(values) < window:
        return Verdict(INCONCLUSIVE, f"schedule shorter than window={window}", rows)
    tail = values[-window:]
    refine = [fut.refinement(i) for i in fut.index_schedule][-window:]
    slope, r2 = loglog_fit(refine, tail) if min(tail) > 0 else (0.0, 0.0)
    monotone = all(values[k + 1] >= values[k] for k in range(len(values) - 1))
    total = values[-1] / values[0] if values[0] > 0 else math.inf
    if (slope >= cfg.slope_threshold and r2 >= cfg.r2_threshold) or (monotone and total > cfg.total_growth):
        return Verdict(
            NO,
            f"norms grow: log-log slope {slope:.3g} (R^2 {r2:.3g}), total factor {total:.3g}",
            rows,
        )
    spread = max(tail) / min(tail) if min(tail) > 0 else math.inf
    if spread <= growth_factor and values[-1] <= growth_factor * values[0]:
        return Verdict(
            YES,
            f"norms bounded: window spread {spread:.4g}, last/first {total:.4g} <= {growth_factor!r}",
            rows,
        )
    return Verdict(
        INCONCLUSIVE,
        f"window spread {spread:.4g}, slope {slope:.3g} (R^2 {r2:.3g}): no rule fired",
        rows,
    )


def check_convergence(
    fut: FamilyUnderTest,
    tol: float | None = None,
    config: AuditConfig | None = None,
    norms: Sequence[NormEstimate] | None = None,
) -> Verdict:
    """Convergence on the probe corpus.

    yes: every trace ends below tol with a shrinking tail.
    no: some trace ends above bounded_away_factor*tol and its tail stalls.
    """
    cfg = config or AuditConfig()
    tol = cfg.convergence_tol if tol is None else tol
    if not fut.corpus:
        raise DomainError(f"{fut.family_id}: convergence check needs a nonempty corpus")
    floors = _floors(fut, cfg, norms)
    traces = _error_traces(fut, fut.corpus, cfg)
    tail = cfg.tail_length
    rows = _trace_rows("convergence", traces, fut, floors)
    good, bad = [], []
    for f, errs in traces:
        if errs[-1] <= tol and tail_shrinks(errs[-tail:], floors[-tail:], cfg.tail_slack):
            good.append(f.id)
        elif errs[-1] > cfg.bounded_away_factor * tol and tail_stalls(errs[-tail:], floors[-tail:], cfg.tail_slack):
            bad.append(f.id)
    if bad:
        return Verdict(NO, f"errors bounded away from 0 for: {', '.join(bad)}", rows)
    if len(good) == len(traces):
        return Verdict(YES, f"all {len(traces)} probes below tol={tol!r} with shrinking tails", rows)
    undecided = [f.id for f, _ in traces if f.id not in good]
    return Verdict(INCONCLUSIVE, f"undecided probes: {', '.join(undecided)}", rows)


# ---------------------------------------------------------------------------
# truth table


def theorem_check(consistency: str, stability: str, convergence: str) -> tuple[str, list[str]]:
    """Compare a verdict triple against the equivalence theorem.

    Only decided verdicts take part; a note records any that were skipped.
    """
    notes = []
    violated = False
    if consistency == YES:
        if stability == YES and convergence == NO:
            violated = True
            notes.append("consistent and stable but not convergent")
        if stability == NO and convergence == YES:
            violated = True
            notes.append("consistent and convergent but not stable")
    if convergence == YES and stability == NO and not violated:
        violated = True
        notes.append("convergent but not stable")
    skipped = [
        name
        for name, v in (("consistency", consistency), ("stability", stability), ("convergence", convergence))
        if v == INCONCLUSIVE
    ]
    if skipped:
        notes.append("checked over decided verdicts only; inconclusive: " + ", ".join(skipped))
    return (CONTRADICTION if violated else CONSISTENT), notes


def run_audit(fut: FamilyUnderTest, config: AuditConfig | None = None) -> AuditReport:
    cfg = config or AuditConfig()
    norms = _norms(fut)
    consistency = check_consistency(fut, config=cfg, norms=norms)
    stability = check_stability(fut, config=cfg, norms=norms)
    convergence = check_convergence(fut, config=cfg, norms=norms)
    verdict, notes = theorem_check(consistency.value, stability.value, convergence.value)
    return AuditReport(
        family_id=fut.family_id,
        consistency=consistency,
        stability=stability,
        convergence=convergence,
        theorem_check=verdict,
        notes=list(fut.notes) + notes,
        config_echo=cfg.to_dict(),
    )
