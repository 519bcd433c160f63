"""Command-line front end.

    equivlab quad   --rule gauss --n 2,4,8 --function runge
    equivlab interp --nodes chebyshev --n 10,20,30,40 --function runge
    equivlab diff   --stencil forward --h 0.01,0.005 --function sin
    equivlab mc     --pdf uniform --n 1000,100000 --seeds 16 --function monomial:1
    equivlab audit  --family newton-cotes

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import re
import statistics
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from equivlab import __version__, diffops, interp, montecarlo, quadrature
from equivlab.audit import run_audit
from equivlab.errors import DomainError, EquivlabError
from equivlab.families import BUILTIN_FAMILIES, builtin_family
from equivlab.funcspace import ScalarFunction, from_id
from equivlab.reporting import csv_text, json_text, svg_line_plot, write_text
from equivlab.rng import ALGORITHM_ID, SEED_PANEL

OUTPUT_ENV = "EQUIVLAB_OUT"
DEFAULT_OUTPUT = "equivlab-out"
FORMATS = ("csv", "json", "svg")

QUAD_RULES = {
    "gauss": quadrature.gauss_legendre_rule,
    "newton-cotes": quadrature.newton_cotes_rule,
    "trapezoid": quadrature.composite_trapezoid_rule,
}
PDFS = {"uniform": montecarlo.uniform_pdf, "linear": montecarlo.linear_pdf}


@dataclass(frozen=True)
class StudySpec:
    command: str
    selector: str
    schedule: tuple
    function_ids: tuple[str, ...]
    seed: int | None
    output_dir: Path
    formats: tuple[str, ...]
    argv: tuple[str, ...]

    def metadata(self, **extra) -> dict:
        meta = {
            "tool": "equivlab",
            "version": __version__,
            "command": " ".join(("equivlab",) + self.argv),
            "seed": self.seed,
        }
        meta.update(extra)
        meta.setdefault("thresholds", {})
        return meta

    def stem(self) -> str:
        parts = [self.command, self.selector] + list(self.function_ids)
        return "_".join(re.sub(r"[^A-Za-z0-9.+-]+", "-", p) for p in parts if p)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("schedule must be nonempty")
    return values


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("schedule must be nonempty")
    return values


def _formats(text: str) -> tuple[str, ...]:
    chosen = tuple(v.strip() for v in text.split(",") if v.strip())
    bad = [v for v in chosen if v not in FORMATS]
    if bad or not chosen:
        raise argparse.ArgumentTypeError(f"formats must be a subset of {','.join(FORMATS)}")
    return chosen


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equivlab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"equivlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_formats="csv,json"):
        p.add_argument("--out", default=os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT),
                       help=f"output directory (default ${OUTPUT_ENV} or {DEFAULT_OUTPUT})")
        p.add_argument("--format", type=_formats, default=_formats(default_formats))

    p = sub.add_parser("quad", help="quadrature convergence and operator norms")
    p.add_argument("--rule", choices=sorted(QUAD_RULES), required=True)
    p.add_argument("--n", type=_int_list, required=True, help="node counts (panels for trapezoid)")
    p.add_argument("--function", required=True)
    common(p)

    p = sub.add_parser("interp", help="interpolation error and Lebesgue constants")
    p.add_argument("--nodes", choices=("equispaced", "chebyshev"), required=True)
    p.add_argument("--n", type=_int_list, required=True, help="polynomial degrees")
    p.add_argument("--function", required=True)
    common(p)

    p = sub.add_parser("diff", help="finite-difference convergence")
    p.add_argument("--stencil", choices=diffops.STENCILS, required=True)
    p.add_argument("--h", type=_float_list, required=True)
    p.add_argument("--function", required=True)
    common(p)

    p = sub.add_parser("mc", help="sample-mean Monte Carlo traces")
    p.add_argument("--pdf", choices=sorted(PDFS), default="uniform")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--seeds", type=int, default=16, help=f"first N seeds of the {len(SEED_PANEL)}-seed panel")
    p.add_argument("--function", required=True)
    common(p)

    p = sub.add_parser("audit", help="consistency/stability/convergence audit")
    p.add_argument("--family", choices=sorted(BUILTIN_FAMILIES) + ["all"], required=True)
    common(p, "csv,json")
    return parser


def _emit(spec: StudySpec, header, rows, meta, svg: str | None) -> list[Path]:
    written = []
    stem = spec.stem()
    if "csv" in spec.formats:
        written.append(write_text(spec.output_dir / f"{stem}.csv", csv_text(header, rows, meta)))
    if "json" in spec.formats:
        doc = {"metadata": meta, "rows": [dict(zip(header, r)) for r in rows]}
        written.append(write_text(spec.output_dir / f"{stem}.json", json_text(doc)))
    if "svg" in spec.formats and svg is not None:
        written.append(write_text(spec.output_dir / f"{stem}.svg", svg))
    return written


def cmd_quad(spec: StudySpec, f: ScalarFunction) -> list[Path]:
    builder = QUAD_RULES[spec.selector]
    rows = []
    for n in spec.schedule:
        rule = builder(n, f.domain)
        est = quadrature.apply(rule, f)
        err = None if f.exact_integral is None else abs(est - f.exact_integral)
        rows.append((n, est, err, quadrature.operator_norm(rule).value))
    header = ("n", "estimate", "abs_error", "operator_norm")
    svg = svg_line_plot(
        {"abs_error": ([r[0] for r in rows], [r[2] for r in rows]),
         "operator_norm": ([r[0] for r in rows], [r[3] for r in rows])},
        f"{spec.selector} quadrature on {f.id}", "n", "value",
    )
    return _emit(spec, header, rows, spec.metadata(), svg)


def cmd_interp(spec: StudySpec, f: ScalarFunction) -> list[Path]:
    family = interp.NodeFamily(spec.selector, f.domain)
    study = interp.runge_study(family, spec.schedule, f)
    rows = [(r.n, r.max_error, r.lebesgue) for r in study]
    header = ("n", "max_error", "lebesgue")
    svg = svg_line_plot(
        {"max_error": ([r[0] for r in rows], [r[1] for r in rows]),
         "lebesgue": ([r[0] for r in rows], [r[2] for r in rows])},
        f"{spec.selector} interpolation of {f.id}", "n", "value",
    )
    return _emit(spec, header, rows, spec.metadata(), svg)


def cmd_diff(spec: StudySpec, f: ScalarFunction) -> list[Path]:
    study = diffops.convergence_study(spec.selector, f, spec.schedule)
    rows = [(r.h, r.sup_error, r.ratio_prev) for r in study]
    header = ("h", "sup_error", "ratio_prev")
    svg = svg_line_plot(
        {"sup_error": ([r[0] for r in rows], [r[1] for r in rows])},
        f"{spec.selector} difference of {f.id}", "h", "sup error", logx=True,
    )
    return _emit(spec, header, rows, spec.metadata(), svg)


def cmd_mc(spec: StudySpec, f: ScalarFunction, pdf_name: str, seeds: Sequence[int]) -> list[Path]:
    pdf = PDFS[pdf_name](f.domain)
    trace = montecarlo.convergence_trace(f, pdf, spec.schedule, seeds)
    rows = [(r.seed, r.n, r.estimate, r.abs_error) for r in trace]
    header = ("seed", "n", "estimate", "abs_error")
    medians = []
    for n in sorted(set(spec.schedule)):
        errs = [r.abs_error for r in trace if r.n == n and r.abs_error is not None]
        medians.append(statistics.median(errs) if errs else None)
    svg = svg_line_plot(
        {"median abs_error": (sorted(set(spec.schedule)), medians)},
        f"sample-mean MC on {f.id}", "n", "median abs error", logx=True,
    )
    meta = spec.metadata(prng=ALGORITHM_ID, seeds=list(seeds), pdf=pdf.label)
    return _emit(spec, header, rows, meta, svg)


def cmd_audit(spec: StudySpec) -> list[Path]:
    names = sorted(BUILTIN_FAMILIES) if spec.selector == "all" else [spec.selector]
    written = []
    for name in names:
        fut, cfg = builtin_family(name)
        report = run_audit(fut, cfg)
        meta = spec.metadata(thresholds=cfg.to_dict())
        stem = f"audit_{name}"
        if "json" in spec.formats:
            doc = {"metadata": meta}
            doc.update(report.to_dict())
            written.append(write_text(spec.output_dir / f"{stem}.json", json_text(doc)))
        if "csv" in spec.formats:
            for check, rows in report.evidence.items():
                if not rows:
                    continue
                header = list(rows[0].keys())
                body = [[r.get(k) for k in header] for r in rows]
                written.append(
                    write_text(spec.output_dir / f"{stem}_{check}.csv", csv_text(header, body, meta))
                )
        print(f"{name}: {report.triple} {report.theorem_check}")
    return written


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        parser.error(f"output directory {out} is not writable: {exc}")
    if not os.access(out, os.W_OK):
        parser.error(f"output directory {out} is not writable")

    func = None
    if args.command != "audit":
        try:
            func = from_id(args.function)
        except DomainError as exc:
            parser.error(str(exc))

    selector = {
        "quad": lambda: args.rule,
        "interp": lambda: args.nodes,
        "diff": lambda: args.stencil,
        "mc": lambda: args.pdf,
        "audit": lambda: args.family,
    }[args.command]()
    schedule = tuple(getattr(args, "n", None) or getattr(args, "h", None) or ())
    seeds: tuple[int, ...] = ()
    if args.command == "mc":
        if not 1 <= args.seeds <= len(SEED_PANEL):
            parser.error(f"--seeds must be between 1 and {len(SEED_PANEL)}")
        seeds = SEED_PANEL[: args.seeds]
    spec = StudySpec(
        command=args.command,
        selector=selector,
        schedule=schedule,
        function_ids=(args.function,) if func is not None else (),
        seed=seeds[0] if seeds else None,
        output_dir=out,
        formats=args.format,
        argv=tuple(argv),
    )
    try:
        if args.command == "quad":
            written = cmd_quad(spec, func)
        elif args.command == "interp":
            written = cmd_interp(spec, func)
        elif args.command == "diff":
            written = cmd_diff(spec, func)
        elif args.command == "mc":
            written = cmd_mc(spec, func, args.pdf, seeds)
        else:
            written = cmd_audit(spec)
    except DomainError as exc:
        print(f"equivlab: error: {exc}", file=sys.stderr)
        return 2
    except (EquivlabError, ArithmeticError) as exc:
        print(f"equivlab: numerical failure: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
