"""Command-line entry point: ``metacell <command> [options]``.

Exit status: 0 success, 1 mismatch or violation, 2 usage or parse error,
3 no convergence or inconclusive verdict.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .algebra import TRIVIAL, AlgebraError, Equation, canon, raw_equation
from .cells import Cell, c0, golden_closure, load_cell, shift
from .crossbreed import (
    NonlinearOccurrence,
    NotCommonFactor,
    closure,
    compare_with_golden,
    eliminate,
    raw_eliminate,
)
from .dsl.parser import DslError, format_cell_text, format_equation, parse_cell_text, parse_equation, parse_monomial
from .dsl.reports import ReportError, emit_report, load_trace, render
from .explorer import NotFound, ReplayMismatch, SearchBudget, derive_search, replay
from .numeric import NoConvergence, NumericError, check_consequence

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    cell: str | None = None
    target: str | None = None
    factor: str | None = None
    samples: int = 1000
    seed: int = 42
    tolerance: float = 1e-9
    depth: int = 4
    format: str = "text"
    report: str | None = None


class UsageError(Exception):
    pass


def _load_cell(path: str | None) -> Cell:
    return c0() if path is None else load_cell(path)


def load_equation_file(path: str) -> Equation:
    """A file holding one equation, either bare or as an ``id : equation`` line."""
    text = Path(path).read_text(encoding="utf-8")
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if len(body) == 1 and ":" in body[0]:
        entries, _ = parse_cell_text(text)
        return entries[0][1]
    return parse_equation(" ".join(body))


def _emit(out: str, config: RunConfig):
    sys.stdout.write(out)
    if config.report:
        Path(config.report).write_text(out, encoding="utf-8")


def _config_dict(config: RunConfig, **extra) -> dict:
    d = dataclasses.asdict(config)
    d.update(extra)
    return d


def cmd_verify_closure(args, config: RunConfig) -> int:
    cell = _load_cell(config.cell)
    golden = json.loads(Path(args.golden).read_text()) if args.golden else golden_closure()
    t0 = time.perf_counter()
    report = closure(cell)
    elapsed = time.perf_counter() - t0
    diff = compare_with_golden(report, golden)
    _emit(emit_report(report, config.format, diff, _config_dict(config, elapsed_seconds=round(elapsed, 4))), config)
    return EXIT_OK if diff.match else EXIT_MISMATCH


def cmd_crossbreed(args, config: RunConfig) -> int:
    cell = _load_cell(config.cell)
    try:
        left, right = cell[args.left], cell[args.right]
    except KeyError as exc:
        raise UsageError(f"unknown cell id {exc.args[0]!r}") from None
    factor = parse_monomial(config.factor)
    doc = {
        "schema_version": 1, "kind": "crossbreed", "left": args.left, "right": args.right,
        "factor": str(factor), "mode": "raw" if args.raw else "normalized",
    }
    try:
        if args.raw:
            poly = raw_eliminate(left, right, factor)
            doc.update(outcome="raw", equation=format_equation(raw_equation(poly)) if poly else None, member=None)
        else:
            res = eliminate(left, right, factor, cell.elements)
            doc["classification"] = res.classification.value
            if res.outcome is TRIVIAL:
                doc.update(outcome="trivial", equation=None, member=None)
            else:
                doc.update(outcome="member" if res.in_cell else "new",
                           equation=format_equation(res.outcome), member=res.in_cell)
    except NotCommonFactor:
        doc.update(outcome="no-common-factor", equation=None, member=None)
    except NonlinearOccurrence as exc:
        doc.update(outcome="nonlinear", equation=str(exc), member=None)
    doc["config"] = _config_dict(config)
    if config.format == "json":
        out = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [f"[{args.left} x {args.right}]{doc['factor']}" + (f" {doc['classification']}" if "classification" in doc else "")]
        if doc["outcome"] == "no-common-factor":
            lines.append("no common factor")
        elif doc["outcome"] == "nonlinear":
            lines.append(f"nonlinear occurrence: {doc['equation']}")
        elif doc["outcome"] == "trivial":
            lines.append("trivial")
        else:
            lines.append(doc["equation"])
            if not args.raw:
                lines.append(f"member: {doc['member'] or 'none'}")
        out = "\n".join(lines) + "\n"
    _emit(out, config)
    return EXIT_MISMATCH if doc["outcome"] in ("no-common-factor", "nonlinear") else EXIT_OK


def cmd_sample_check(args, config: RunConfig) -> int:
    cell = _load_cell(config.cell)
    target = load_equation_file(config.target)
    try:
        report = check_consequence(
            cell, target, config.samples, config.tolerance, config.seed, args.amplitude, target.id
        )
    except (NumericError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INCONCLUSIVE if isinstance(exc, NoConvergence) else EXIT_USAGE
    _emit(emit_report(report, config.format, config=_config_dict(config, amplitude=args.amplitude)), config)
    return {"consequence": EXIT_OK, "violated": EXIT_MISMATCH}.get(report.verdict, EXIT_INCONCLUSIVE)


def cmd_shift(args, config: RunConfig) -> int:
    if args.m < 0:
        raise UsageError("--m must be nonnegative")
    cell = shift(_load_cell(config.cell), args.m)
    _emit(format_cell_text(cell.elements, [f"generation {cell.generation}"]), config)
    return EXIT_OK


def cmd_derive(args, config: RunConfig) -> int:
    cell = _load_cell(config.cell)
    target = load_equation_file(config.target)
    budget = SearchBudget(config.depth, args.max_frontier, args.norm_cap, args.max_expansions)
    result = derive_search(cell, target, budget)
    extra = _config_dict(config, max_frontier=args.max_frontier, norm_cap=args.norm_cap,
                         max_expansions=args.max_expansions)
    if isinstance(result, NotFound):
        _emit(emit_report(result, config.format, config=extra), config)
        return EXIT_MISMATCH
    final = replay(result, cell)
    from .dsl.reports import trace_document

    doc = trace_document(result, final)
    doc["config"] = extra
    _emit(render(doc, config.format), config)
    if args.trace_out:
        Path(args.trace_out).write_text(render(doc, "json"), encoding="utf-8")
    return EXIT_OK


def cmd_replay(args, config: RunConfig) -> int:
    cell = _load_cell(config.cell)
    trace = load_trace(Path(args.trace).read_text(encoding="utf-8"))
    try:
        final = replay(trace, cell)
    except ReplayMismatch as exc:
        sys.stderr.write(f"replay mismatch: {exc}\n")
        return EXIT_MISMATCH
    sys.stdout.write(format_equation(final) + "\n")
    return EXIT_OK


def cmd_fmt(args, config: RunConfig) -> int:
    entries, header = parse_cell_text(Path(args.file).read_text(encoding="utf-8"))
    if args.canon:
        out = []
        for cid, eq in entries:
            c = canon(eq)
            if c is TRIVIAL:
                raise UsageError(f"{cid} is trivial")
            out.append((cid, c))
        entries = out
    _emit(format_cell_text(entries, header), config)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cell", help="cell file (default: bundled C0)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--report", help="also write the output document to this path")

    parser = argparse.ArgumentParser(prog="metacell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-closure", parents=[common], help="closure of a cell against the golden table")
    p.add_argument("--golden", help="golden table JSON (default: bundled)")
    p.set_defaults(func=cmd_verify_closure)

    p = sub.add_parser("crossbreed", parents=[common], help="crossbreed two cell elements")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--factor", required=True, help='neutral factor, e.g. "zeta(s_1^1)"')
    p.add_argument("--raw", action="store_true", help="raw resultant, no normalisation")
    p.set_defaults(func=cmd_crossbreed)

    p = sub.add_parser("sample-check", parents=[common], help="numeric consequence check")
    p.add_argument("--target", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--amplitude", type=float, default=0.5)
    p.set_defaults(func=cmd_sample_check)

    p = sub.add_parser("shift", parents=[common], help="relabel a cell g -> 4m+g")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("derive", parents=[common], help="search for a crossbreeding chain")
    p.add_argument("--target", required=True)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--norm-cap", type=int, default=80)
    p.add_argument("--max-frontier", type=int, default=2000)
    p.add_argument("--max-expansions", type=int, default=400)
    p.add_argument("--trace-out", help="write the trace document (JSON) here")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("replay", parents=[common], help="replay a trace document")
    p.add_argument("trace")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("fmt", parents=[common], help="reformat a cell file")
    p.add_argument("file")
    p.add_argument("--canon", action="store_true", help="canonicalise each equation as well")
    p.set_defaults(func=cmd_fmt)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    seed = getattr(args, "seed", 42)
    if os.environ.get("METACELL_SEED"):
        try:
            seed = int(os.environ["METACELL_SEED"])
        except ValueError:
            sys.stderr.write("error: METACELL_SEED must be an integer\n")
            return EXIT_USAGE
    config = RunConfig(
        command=args.command,
        cell=args.cell,
        target=getattr(args, "target", None),
        factor=getattr(args, "factor", None),
        samples=getattr(args, "samples", 1000),
        seed=seed,
        tolerance=getattr(args, "tol", 1e-9),
        depth=getattr(args, "depth", 4),
        format=args.format,
        report=args.report,
    )
    try:
        return args.func(args, config)
    except (DslError, UsageError, ReportError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except AlgebraError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
