"""Versioned report documents (JSON or plain text) and their strict readers."""
from __future__ import annotations

import json
import math
from typing import Any

from ..algebra import TRIVIAL, Equation, SignedPoly, raw_equation, signed_of
from ..crossbreed import ClosureReport, GoldenDiff
from ..explorer import DerivationStep, DerivationTrace, NotFound
from ..numeric import ConsequenceReport
from .parser import format_equation, parse_equation, parse_monomial

SCHEMA_VERSION = 1

_KEYS = {
    "closure": {"schema_version", "kind", "config", "entries", "summary", "golden"},
    "consequence": {
        "schema_version", "kind", "config", "target", "samples", "tolerance", "seed", "amplitude",
        "skipped", "max_rel_residual", "solver_max_residual", "verdict", "per_sample",
    },
    "crossbreed": {
        "schema_version", "kind", "config", "left", "right", "factor", "mode", "classification",
        "outcome", "equation", "member",
    },
    "derivation-trace": {"schema_version", "kind", "config", "start", "steps", "final"},
    "derivation-not-found": {
        "schema_version", "kind", "config", "expanded", "generated", "frontier", "best_overlap",
        "best_norm_gap", "exhausted",
    },
}
_STEP_KEYS = {"left", "right", "factor", "mode", "result"}


class ReportError(ValueError):
    pass


def _float(x: float):
    return None if math.isnan(x) else x


def closure_document(report: ClosureReport, golden: GoldenDiff | None = None) -> dict:
    entries = []
    by_pair: dict[tuple[str, str], list] = {}
    for e in report.entries:
        if e.error is not None:
            outcome, result, text = "error", None, e.error
        elif e.outcome is TRIVIAL:
            outcome, result, text = "trivial", None, None
        elif e.member is not None:
            outcome, result, text = "member", e.member, None
        else:
            outcome, result, text = "new", None, format_equation(e.outcome)
        by_pair.setdefault((e.left, e.right), []).append({
            "pair": [e.left, e.right],
            "factor": str(e.factor),
            "factor_kind": "product" if e.is_product else "atom",
            "classification": e.classification.value,
            "outcome": outcome,
            "result": result,
            "equation": text,
        })
    for pair in report.empty_pairs:
        by_pair[pair] = [{
            "pair": list(pair), "factor": None, "factor_kind": None, "classification": None,
            "outcome": "no-common-factor", "result": None, "equation": None,
        }]
    for pair in sorted(by_pair):
        entries.extend(by_pair[pair])
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "closure",
        "entries": entries,
        "summary": report.summary(),
    }
    if golden is not None:
        doc["golden"] = golden.as_dict()
    return doc


def consequence_document(report: ConsequenceReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "consequence",
        "target": report.target_id,
        "samples": report.samples,
        "tolerance": report.tolerance,
        "seed": report.seed,
        "amplitude": report.amplitude,
        "skipped": report.skipped,
        "max_rel_residual": _float(report.max_rel_residual),
        "solver_max_residual": report.solver_max_residual,
        "verdict": report.verdict,
        "per_sample": list(report.residuals),
    }


def _result_text(result) -> str:
    if isinstance(result, SignedPoly):
        return format_equation(raw_equation(result))
    return format_equation(result)


def trace_document(trace: DerivationTrace, final: Equation | None = None) -> dict:
    steps = [
        {
            "left": s.left,
            "right": s.right,
            "factor": str(s.factor),
            "mode": s.mode,
            "result": _result_text(s.result),
        }
        for s in trace.steps
    ]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "derivation-trace",
        "start": trace.start,
        "steps": steps,
    }
    if final is not None:
        doc["final"] = format_equation(final)
    return doc


def not_found_document(nf: NotFound) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "derivation-not-found",
        "expanded": nf.expanded,
        "generated": nf.generated,
        "frontier": nf.frontier,
        "best_overlap": nf.best_overlap,
        "best_norm_gap": nf.best_norm_gap,
        "exhausted": nf.exhausted,
    }


def document(obj, golden: GoldenDiff | None = None) -> dict:
    if isinstance(obj, ClosureReport):
        return closure_document(obj, golden)
    if isinstance(obj, ConsequenceReport):
        return consequence_document(obj)
    if isinstance(obj, DerivationTrace):
        return trace_document(obj)
    if isinstance(obj, NotFound):
        return not_found_document(obj)
    raise TypeError(f"no report format for {type(obj).__name__}")


def _text(doc: dict) -> str:
    kind = doc["kind"]
    lines = [f"# {kind} report (schema {doc['schema_version']})"]
    if kind == "closure":
        for e in doc["entries"]:
            pair = "[{} x {}]".format(*e["pair"])
            if e["outcome"] == "no-common-factor":
                lines.append(f"{pair} no common factor")
                continue
            what = {"member": f"= {e['result']}", "new": f"new: {e['equation']}",
                    "trivial": "trivial", "error": f"error: {e['equation']}"}[e["outcome"]]
            lines.append(f"{pair}{e['factor']} {e['classification']} {what}")
        lines.append("summary:")
        lines += [f"  {k}: {v}" for k, v in doc["summary"].items()]
        if "golden" in doc:
            g = doc["golden"]
            lines.append(f"golden table: {'match' if g['match'] else 'MISMATCH'}")
            for k in ("missing", "unexpected", "wrong_result", "additional_product_factor"):
                for item in g[k]:
                    lines.append(f"  {k}: {item}")
    elif kind == "consequence":
        for k in ("target", "samples", "tolerance", "seed", "amplitude", "skipped",
                  "max_rel_residual", "solver_max_residual", "verdict"):
            lines.append(f"{k}: {doc[k]}")
    elif kind == "derivation-trace":
        if doc["start"] is not None:
            lines.append(f"start: {doc['start']}")
        for i, s in enumerate(doc["steps"], 1):
            lines.append(f"@{i} = [{s['left']} x {s['right']}]{s['factor']} ({s['mode']})")
            lines.append(f"     {s['result']}")
        if "final" in doc:
            lines.append(f"final: {doc['final']}")
    else:
        lines += [f"{k}: {v}" for k, v in doc.items() if k not in ("schema_version", "kind", "config")]
    if "config" in doc:
        lines.append("config: " + json.dumps(doc["config"], sort_keys=False))
    return "\n".join(lines) + "\n"


def render(doc: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "text":
        return _text(doc)
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report, fmt: str = "json", golden: GoldenDiff | None = None, config: dict | None = None) -> str:
    """Serialize a closure, consequence, or derivation report."""
    doc = document(report, golden)
    if config is not None:
        doc["config"] = config
    return render(doc, fmt)


def read_document(text: str) -> dict:
    """Parse a JSON report, rejecting unknown versions, kinds, and fields."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"not a JSON document: {exc}") from None
    if not isinstance(doc, dict):
        raise ReportError("report must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ReportError(f"unsupported schema_version {doc.get('schema_version')!r}")
    kind = doc.get("kind")
    if kind not in _KEYS:
        raise ReportError(f"unknown report kind {kind!r}")
    unknown = set(doc) - _KEYS[kind]
    if unknown:
        raise ReportError(f"unknown fields: {', '.join(sorted(unknown))}")
    return doc


def load_trace(text: str) -> DerivationTrace:
    doc = read_document(text)
    if doc["kind"] != "derivation-trace":
        raise ReportError(f"expected a derivation-trace document, got {doc['kind']}")
    steps = []
    for raw in doc["steps"]:
        unknown = set(raw) - _STEP_KEYS
        if unknown or set(raw) != _STEP_KEYS:
            raise ReportError(f"bad step fields: {sorted(raw)}")
        eq = parse_equation(raw["result"])
        result = signed_of(eq) if raw["mode"] == "raw" else eq
        steps.append(DerivationStep(raw["left"], raw["right"], parse_monomial(raw["factor"]), raw["mode"], result))
    return DerivationTrace(tuple(steps), doc.get("start"))
