"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also collected into the pytest
terminal summary). Run standalone with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from equivlab import diffops, interp, montecarlo, quadrature
from equivlab.audit import CONSISTENT, NO, YES, run_audit
from equivlab.cli import main as cli_main
from equivlab.families import BUILTIN_FAMILIES, builtin_family
from equivlab.funcspace import Interval, make_constant, make_monomial, make_runge, make_sin, sup_norm
from equivlab.rng import SEED_PANEL

RESULTS: list[str] = []

# frozen from the exact rational weights
NC_ABS_SUM_10 = Fraction(1)
NC_ABS_SUM_40 = 7859350.536491511
NC_RUNGE_ERRORS = {10: -0.06963672720963948, 20: 0.8998449103246142, 30: -22.34025849931504, 40: 701.2625617510978}

FORWARD_H = tuple(1e-2 * 2.0**-k for k in range(7))  # 1e-2 down to 1.5625e-4
SECOND_CENTRAL_H = tuple(1e-2 * 2.0**-k for k in range(4))  # 1e-2 down to 1.25e-3


def _record(number: int, title: str, checks: dict[str, bool], elapsed: float, limit: float) -> None:
    checks = dict(checks)
    checks[f"runtime {elapsed:.2f}s < {limit:g}s"] = elapsed < limit
    failing = [name for name, ok in checks.items() if not ok]
    status = "FAIL" if failing else "PASS"
    line = f"{status} criterion {number}: {title}"
    if failing:
        line += " | failing: " + "; ".join(failing)
    print(line)
    RESULTS.append(line)
    assert not failing, line


def test_criterion_1_gauss_exactness():
    t0 = time.perf_counter()
    dom = Interval(-1.0, 1.0)
    rule = quadrature.gauss_legendre_rule(5, dom)
    x8 = quadrature.apply(rule, make_monomial(8, dom))
    errs = [abs(quadrature.apply(rule, make_monomial(d, dom)) - make_monomial(d, dom).exact_integral) for d in range(10)]
    _record(
        1,
        "5-point Gauss integrates x^8 to 2/9 and degree <= 9 exactly",
        {
            f"|Q(x^8) - 2/9| = {abs(x8 - 2 / 9):.2e} <= 1e-13": abs(x8 - 2 / 9) <= 1e-13,
            f"max degree<=9 error {max(errs):.2e} <= 1e-12": max(errs) <= 1e-12,
        },
        time.perf_counter() - t0,
        1.0,
    )


def test_criterion_2_gauss_weight_mass():
    t0 = time.perf_counter()
    worst = 0.0
    for dom in (Interval(-1.0, 1.0), Interval(0.0, 3.0)):
        for m in range(1, 65):
            rule = quadrature.gauss_legendre_rule(m, dom)
            worst = max(worst, abs(quadrature.operator_norm(rule).value - dom.length))
    _record(
        2,
        "Gauss sum|w| = b - a for 1..64 nodes on [-1,1] and [0,3]",
        {f"max deviation {worst:.2e} <= 1e-12": worst <= 1e-12},
        time.perf_counter() - t0,
        5.0,
    )


def test_criterion_3_newton_cotes_instability():
    t0 = time.perf_counter()
    sums = {m: sum(abs(w) for w in quadrature.newton_cotes_reference_weights(m)) for m in range(10, 41)}
    drops = [m for m in range(11, 41) if not sums[m] > sums[m - 1]]
    min9 = min(quadrature.newton_cotes_reference_weights(9))
    _record(
        3,
        "Newton-Cotes exact weights: negative at 9 nodes, sum|w| grows",
        {
            f"negative weight at 9 nodes (min {min9})": min9 < 0,
            "sum|w| strictly increasing over 10..40"
            + (f" (decreases at {drops[:5]}...)" if drops else ""): not drops,
            f"sum|w|(40)/sum|w|(10) = {float(sums[40] / sums[10]):.3e} >= 1e3": sums[40] >= 1000 * sums[10],
            "frozen sum|w|(10)": sums[10] == NC_ABS_SUM_10,
            "frozen sum|w|(40)": math.isclose(float(sums[40]), NC_ABS_SUM_40, rel_tol=1e-14),
        },
        time.perf_counter() - t0,
        30.0,
    )


def test_criterion_4_runge_quadrature():
    t0 = time.perf_counter()
    f = make_runge()
    exact = 0.4 * math.atan(5.0)
    nc = {n: quadrature.apply(quadrature.newton_cotes_rule(n, f.domain), f) - exact for n in (10, 20, 30, 40)}
    mags = [abs(nc[n]) for n in (10, 20, 30, 40)]
    gauss40 = abs(quadrature.apply(quadrature.gauss_legendre_rule(40, f.domain), f) - exact)
    _record(
        4,
        "Runge: Newton-Cotes error grows past 1, Gauss error < 1e-6 at 40",
        {
            "|NC error| non-decreasing over 10,20,30,40": all(b >= a for a, b in zip(mags, mags[1:])),
            f"|NC error| at 40 = {mags[-1]:.4g} > 1": mags[-1] > 1.0,
            "NC errors match frozen values": all(
                math.isclose(nc[n], NC_RUNGE_ERRORS[n], rel_tol=1e-9) for n in nc
            ),
            f"Gauss error at 40 = {gauss40:.3e} < 1e-6": gauss40 < 1e-6,
        },
        time.perf_counter() - t0,
        10.0,
    )


def test_criterion_5_differentiation():
    t0 = time.perf_counter()
    sin = make_sin()
    fwd = [r.ratio_prev for r in diffops.convergence_study("forward", sin, FORWARD_H)[1:]]
    sec = [r.ratio_prev for r in diffops.convergence_study("second_central", sin, SECOND_CENTRAL_H)[1:]]
    certs = [
        diffops.c1_norm_certificate(diffops.DifferenceOperator(s, 0.01)).value
        for s in ("forward", "backward", "central")
    ] + [diffops.c2_norm_certificate(diffops.DifferenceOperator("second_central", 0.01)).value]
    blow = {h: diffops.sup_norm_blowup(h)[1] * h for h in (0.2, 0.1, 0.05, 0.02)}
    _record(
        5,
        "difference quotients: observed orders, certificates, sup-norm blow-up",
        {
            f"forward ratios in [1.8, 2.2] ({min(fwd):.3f}..{max(fwd):.3f})": all(1.8 <= r <= 2.2 for r in fwd),
            f"second_central ratios in [3.5, 4.5] ({min(sec):.3f}..{max(sec):.3f})": all(3.5 <= r <= 4.5 for r in sec),
            "C^k certificates exactly 1": all(c == 1.0 for c in certs),
            "blow-up ratio*h within 2% of 2*pi ("
            + ", ".join(f"h={h}: {v:.4f}" for h, v in blow.items())
            + ")": all(abs(v - 2 * math.pi) <= 0.02 * 2 * math.pi for v in blow.values()),
        },
        time.perf_counter() - t0,
        5.0,
    )


def _reproduction_error(kind: str, n: int, grid: np.ndarray) -> float:
    fam = interp.NodeFamily(kind, Interval(-1.0, 1.0))
    x, w = fam.nodes(n), fam.barycentric_weights(n)
    worst = 0.0
    for d in range(n + 1):
        p = interp.interpolate(make_monomial(d, Interval(-1.0, 1.0)), x, w)
        worst = max(worst, float(np.max(np.abs(p(grid) - grid**d))))
    return worst


def test_criterion_6_interpolation():
    t0 = time.perf_counter()
    dom = Interval(-1.0, 1.0)
    equi, cheb = interp.NodeFamily("equispaced", dom), interp.NodeFamily("chebyshev", dom)
    lam_e = [r.lebesgue for r in interp.runge_study(equi, range(2, 41))]
    lam_c = [r.lebesgue for r in interp.runge_study(cheb, range(2, 41))]
    err_e = [r.max_error for r in interp.runge_study(equi, (10, 20, 30, 40))]
    err_c = [r.max_error for r in interp.runge_study(cheb, (10, 20, 30, 40))]
    grid = np.linspace(-1.0, 1.0, 2001)
    repro = {kind: max(_reproduction_error(kind, n, grid) for n in range(1, 41)) for kind in ("equispaced", "chebyshev")}
    _record(
        6,
        "interpolation: Lebesgue growth, Runge divergence, polynomial reproduction",
        {
            "equispaced Lebesgue strictly increasing over 2..40": all(b > a for a, b in zip(lam_e, lam_e[1:])),
            f"Chebyshev Lebesgue < 5 (max {max(lam_c):.3f})": max(lam_c) < 5,
            "equispaced Runge error increasing over 10..40": all(b > a for a, b in zip(err_e, err_e[1:])),
            f"Chebyshev Runge error decreasing, {err_c[-1]:.2e} < 1e-2 at 40": all(
                b < a for a, b in zip(err_c, err_c[1:])
            )
            and err_c[-1] < 1e-2,
            f"equispaced reproduction of degree <= n, n <= 40: {repro['equispaced']:.2e} <= 1e-10": repro[
                "equispaced"
            ]
            <= 1e-10,
            f"Chebyshev reproduction of degree <= n, n <= 40: {repro['chebyshev']:.2e} <= 1e-10": repro["chebyshev"]
            <= 1e-10,
        },
        time.perf_counter() - t0,
        20.0,
    )


def test_criterion_7_monte_carlo():
    t0 = time.perf_counter()
    unit = Interval(0.0, 1.0)
    pdf = montecarlo.uniform_pdf(unit)
    f = make_monomial(2, unit)
    f0 = make_sin(unit)
    sigma = math.sqrt(1 / 5 - 1 / 9)
    schedule = (1000, 10000, 100000)
    bound = montecarlo.mc_norm_bound(pdf).value * sup_norm(f - f0).value + 1e-12
    covered = {n: 0 for n in schedule}
    gap_ok = True
    for seed in SEED_PANEL:
        terms = montecarlo.sample_terms(f, pdf, schedule[-1], seed)
        terms0 = montecarlo.sample_terms(f0, pdf, schedule[-1], seed)
        for n in schedule:
            est = montecarlo.running_mean(terms, n)
            covered[n] += abs(est - 1 / 3) <= 3 * sigma / math.sqrt(n)
            gap_ok &= abs(est - montecarlo.running_mean(terms0, n)) <= bound
    const_ok = all(
        montecarlo.sample_mean_estimate(make_constant(c, unit), pdf, 1000, seed).estimate == c
        for c in (0.0, 1.0, -2.5, 1e-7, 3.141592653589793)
        for seed in SEED_PANEL
    )
    _record(
        7,
        "Monte Carlo: 3-sigma coverage, pathwise stability, constants exact",
        {
            "coverage >= 95% (" + ", ".join(f"n={n}: {c}/64" for n, c in covered.items()) + ")": all(
                c >= 0.95 * len(SEED_PANEL) for c in covered.values()
            ),
            "pathwise gap <= ||f - f0||/m + 1e-12 for every seed": gap_ok,
            "constants exact": const_ok,
        },
        time.perf_counter() - t0,
        60.0,
    )


EXPECTED_TRIPLES = {
    "gauss": (YES, YES, YES),
    "trapezoid": (YES, YES, YES),
    "forward-diff-c1": (YES, YES, YES),
    "chebyshev-interp": (YES, YES, YES),
    "sample-mean-mc": (YES, YES, YES),
    "newton-cotes": (YES, NO, NO),
    "equispaced-interp": (YES, NO, NO),
}


def test_criterion_8_truth_table():
    t0 = time.perf_counter()
    reports = {}
    for name in BUILTIN_FAMILIES:
        fut, cfg = builtin_family(name)
        reports[name] = run_audit(fut, cfg)
    checks = {
        f"{name}: {r.theorem_check}": r.theorem_check == CONSISTENT for name, r in reports.items()
    }
    for name, triple in EXPECTED_TRIPLES.items():
        checks[f"{name} triple {reports[name].triple} == {triple}"] = reports[name].triple == triple
    checks[f"forward-diff-sup stability = {reports['forward-diff-sup'].stability.value}"] = (
        reports["forward-diff-sup"].stability.value == NO
    )
    _record(8, "audits of all eight families agree with the equivalence theorem", checks, time.perf_counter() - t0, 120.0)


CLI_STUDIES = (
    ["quad", "--rule", "newton-cotes", "--n", "10,20,30,40", "--function", "runge"],
    ["interp", "--nodes", "equispaced", "--n", "10,20", "--function", "runge"],
    ["diff", "--stencil", "forward", "--h", "0.01,0.005,0.0025", "--function", "sin"],
    ["mc", "--pdf", "uniform", "--n", "1000,10000", "--seeds", "8", "--function", "monomial:2"],
    ["audit", "--family", "newton-cotes"],
)


def test_criterion_9_determinism():
    import tempfile

    t0 = time.perf_counter()
    checks = {}
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        for args in CLI_STUDIES:
            snapshots = []
            for _ in range(2):
                for p in out.iterdir():
                    p.unlink()
                code = cli_main(args + ["--out", str(out), "--format", "csv,json,svg"])
                snapshots.append((code, {p.name: p.read_bytes() for p in sorted(out.iterdir())}))
            (c1, a), (c2, b) = snapshots
            checks[f"{args[0]} {args[2]}: byte-identical"] = c1 == c2 == 0 and bool(a) and a == b
    _record(9, "CLI studies are byte-identical on re-run", checks, time.perf_counter() - t0, 120.0)


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
