from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from metacell import Equation, Monomial, c0, canon, closure, growth
from metacell.algebra import TRIVIAL, DegenerateEquation
from metacell.cells import c0_transcription
from metacell.dsl.parser import (
    DslSemanticError,
    DslSyntaxError,
    format_cell_text,
    format_equation,
    parse_atom,
    parse_cell_text,
    parse_equation,
    parse_monomial,
)
from metacell.dsl.reports import ReportError, emit_report, load_trace, read_document

from .conftest import C0_ATOMS, atom

DATA = Path(__file__).parent / "data"

EQ_1_2 = (
    "|zeta(s_1^1)|*|Gamma(s_2^1)|*|Jp(2*s_3^2)| + |zeta(2*s_4^2)|*|cn(s_3^1,k)| = "
    "|Gamma(2*s_1^2)|*|cn(s_3^1,k)|*|cn(2*s_2^2,k)| + |Jp(s_4^1)|*|Jp(2*s_3^2)|"
)


def test_parse_first_cell_equation(cell):
    assert canon(parse_equation(EQ_1_2)) == cell["1.2"]


def test_parse_self_equation():
    e = parse_equation("|zeta(s_1^1)| = |zeta(s_1^1)|")
    assert canon(e) is TRIVIAL


def test_parse_exponent():
    e = parse_equation("|Gamma(3*s_4^3)|^2 * |cn(s_3^1,k)| = |Jp(s_4^1)|")
    assert e.left[0].multiplicity(atom("Gamma", 3, 4, 3)) == 2


def test_whitespace_and_comments_ignored():
    e = parse_equation("  |zeta( s_1 ^ 1 )|=|Gamma(s_2^1)|   # note")
    assert e == parse_equation("|zeta(s_1^1)| = |Gamma(s_2^1)|")


def test_unit_term():
    e = Equation((Monomial(),), (Monomial.of([atom("zeta", 1, 1, 1)]),))
    text = format_equation(e)
    assert text == "1 = |zeta(s_1^1)|"
    assert parse_equation(text) == e


def test_parse_monomial_without_bars():
    assert parse_monomial("zeta(s_1^1)") == Monomial.of([atom("zeta", 1, 1, 1)])
    assert parse_atom("|cn(2*s_2^2,k)|") == atom("cn", 2, 2, 2)


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("|zeta(s_1^1)| + = |Gamma(s_2^1)|", 1, 17),
        ("|zeta(s_1^1) = |Gamma(s_2^1)|", 1, 14),
        ("|zeta(s_1^1)|", 1, 14),
        ("|zeta(s_1^1)| = |Gamma(s_2^1)| |", 1, 32),
    ],
)
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(DslSyntaxError) as info:
        parse_equation(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert info.value.expected


@pytest.mark.parametrize(
    "text",
    [
        "|zeta(s_5^1)| = |Gamma(s_2^1)|",
        "|zeta(0*s_1^1)| = |Gamma(s_2^1)|",
        "|zeta(1*s_1^1)| = |Gamma(s_2^1)|",
        "|cn(s_3^1)| = |Gamma(s_2^1)|",
        "|Gamma(s_2^1,k)| = |zeta(s_1^1)|",
        "|bessel(s_2^1)| = |zeta(s_1^1)|",
    ],
)
def test_semantic_errors(text):
    with pytest.raises((DslSemanticError, DslSyntaxError)):
        parse_equation(text)


def test_cell_file_errors_report_line():
    with pytest.raises(DslSyntaxError) as info:
        parse_cell_text("# header\na : |zeta(s_1^1)| = |Gamma(s_2^1)|\nb : |zeta(s_1^1)| = \n")
    assert info.value.line == 3
    with pytest.raises(DslSemanticError):
        parse_cell_text("a : |zeta(s_1^1)| = |Gamma(s_2^1)|\na : |zeta(s_1^1)| = |Jp(s_4^1)|\n")


def test_round_trip_fixtures():
    for cid, e in c0_transcription():
        assert parse_equation(format_equation(e)) == e, cid
    assert parse_equation(format_equation(growth())) == growth()


def test_cell_file_round_trip():
    entries, header = parse_cell_text(format_cell_text(c0_transcription(), ["a header"]))
    assert header == ["a header"]
    assert [(cid, e) for cid, e in entries] == list(c0_transcription())


def random_canonical_equations(n: int, seed: int):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        def side():
            return tuple(Monomial.of(rng.choices(C0_ATOMS, k=rng.randint(1, 4))) for _ in range(rng.randint(1, 3)))

        try:
            e = canon(Equation(side(), side()))
        except DegenerateEquation:
            continue
        if e is not TRIVIAL:
            out.append(e)
    return out


def test_round_trip_random_canonical():
    for e in random_canonical_equations(1000, 7):
        assert parse_equation(format_equation(e)) == e


def test_format_golden_file(cell):
    assert format_equation(cell["1.5"]) + "\n" == (DATA / "format_1_5.txt").read_text()
    # three-atom terms come before two-atom terms on each side
    assert [m.degree for m in cell["1.5"].left] == [3, 2]


def test_closure_report_json_is_stable(cell):
    a = emit_report(closure(cell), "json")
    b = emit_report(closure(cell), "json")
    assert a == b
    doc = read_document(a)
    assert doc["summary"]["a1_conserving"] == 36
    assert sum(1 for e in doc["entries"] if e["outcome"] == "no-common-factor") == 3
    assert list(doc) == ["schema_version", "kind", "entries", "summary"]


def test_empty_cell_report_has_zero_counts(cell):
    doc = json.loads(emit_report(closure(cell.subcell(["1.2"])), "json"))
    assert all(v == 0 for v in doc["summary"].values())


def test_read_document_is_strict(cell):
    doc = json.loads(emit_report(closure(cell), "json"))
    doc["extra"] = 1
    with pytest.raises(ReportError):
        read_document(json.dumps(doc))
    with pytest.raises(ReportError):
        read_document(json.dumps({"schema_version": 2, "kind": "closure"}))
    with pytest.raises(ReportError):
        load_trace(json.dumps({"schema_version": 1, "kind": "closure", "entries": [], "summary": {}}))


def test_text_report(cell):
    text = emit_report(closure(cell), "text")
    assert "[1.2 x 1.7] no common factor" in text
    assert "a2_conserving: 12" in text
