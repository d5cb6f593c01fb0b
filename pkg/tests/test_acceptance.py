"""Acceptance criteria, one check per criterion.

Each check returns ``(passed, detail)``. The pytest tests assert on them and a
summary line per criterion is printed at the end of the run (see conftest).
Run ``python3 tests/test_acceptance.py`` to print the lines without pytest.
"""
from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import pytest

from metacell import Monomial, c0, canon, closure, eliminate, growth, shift
from metacell.algebra import Atom, Func, TRIVIAL, shape
from metacell.cells import c0_transcription, golden_closure
from metacell.crossbreed import compare_with_golden
from metacell.dsl.parser import format_equation, parse_equation
from metacell.explorer import rediscover
from metacell.numeric import check_consequence, residual, sample_variety

if __package__:
    from .conftest import growth_mutant
    from .test_dsl import random_canonical_equations
else:  # pragma: no cover - script mode
    sys.path.insert(0, str(Path(__file__).resolve().parents[1]))
    from tests.conftest import growth_mutant
    from tests.test_dsl import random_canonical_equations

ORACLE = json.loads((Path(__file__).parent / "data" / "growth_oracle.json").read_text())
RESULTS: dict[int, tuple[bool, str]] = {}


def _zeta1():
    return Monomial.of([Atom(Func.ZETA, 1, 1, 1)])


def criterion_1():
    cell = c0()
    t0 = time.perf_counter()
    report = closure(cell)
    elapsed = time.perf_counter() - t0
    s = report.summary()
    diff = compare_with_golden(report, golden_closure())
    counts = (s["a1_conserving"], s["a2_conserving"], s["product_factor_conserving"], s["empty_pairs"])
    ok = counts == (36, 12, 3, 3) and diff.match and elapsed < 1.0
    detail = (
        f"A1={counts[0]} A2={counts[1]} product={counts[2]} empty={counts[3]} "
        f"(want 36/12/3/3); published mapping {'matches' if diff.match else 'differs'}; "
        f"{len(diff.additional_product_factor)} unpublished product factors; {elapsed:.2f}s"
    )
    return ok, detail


def criterion_2():
    cell = c0()
    cn = Monomial.of([Atom(Func.CN, 1, 3, 1)])
    a1 = canon(eliminate(cell["1.2"], cell["1.3"], _zeta1()).outcome)
    a2 = canon(eliminate(cell["1.2"], cell["1.3"], cn).outcome)
    ok = a1 == cell["1.5"] and a2 == cell["1.5"]
    return ok, f"zeta factor -> {'1.5' if a1 == cell['1.5'] else a1}; cn factor -> {'1.5' if a2 == cell['1.5'] else a2}"


def criterion_3():
    cell = c0()
    shapes = {str(shape(e)) for _, e in cell}
    norms = {e.norm for _, e in cell}
    g = growth()
    gs = shape(g)
    square = Atom(Func.GAMMA, 3, 4, 3)
    squares = sum(1 for t in g.terms if t.multiplicity(square) == 2)
    ok = (
        shapes == {"(3,2)<->(3,2)"} and norms == {10}
        and (gs.left_degrees, gs.right_degrees, gs.norm) == ((7, 7, 7, 6, 6), (7, 7, 7, 6, 6), 66)
        and squares == 4
    )
    return ok, f"cell shapes {sorted(shapes)} norms {sorted(norms)}; growth {gs} norm {gs.norm}; squares {squares}"


def _relabelled(report, m):
    out = set()
    for e in report.entries:
        f = shift(e.factor, m) if m else e.factor
        out.add((e.left, e.right, f, e.classification, e.member, e.outcome is TRIVIAL))
    return out, frozenset(report.empty_pairs)


def criterion_4():
    base = closure(c0())
    t0 = time.perf_counter()
    bad = []
    for m in (1, 2, 3):
        shifted = closure(shift(c0(), m))
        want_entries, want_empty = _relabelled(base, m)
        got_entries, got_empty = _relabelled(shifted, 0)
        if want_entries != got_entries or want_empty != got_empty:
            bad.append(m)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 5.0
    return ok, f"m=1,2,3 {'isomorphic' if not bad else f'differ at m={bad}'}; {elapsed:.2f}s"


def criterion_5():
    cell = c0()
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(1000):
        v = sample_variety(cell, 42 + i)
        worst = max(worst, max(abs(residual(e, v)) for _, e in cell))
    failing = []
    for e in closure(cell).entries:
        if e.factor.degree == 1 and e.outcome is not TRIVIAL:
            if check_consequence(cell, e.outcome, 1000, 1e-9, 42).verdict != "consequence":
                failing.append((e.left, e.right, str(e.factor)))
    growth_verdict = check_consequence(cell, growth(), 1000, 1e-9, 42).verdict
    mutant_verdict = check_consequence(cell, growth_mutant(), 1000, 1e-9, 42).verdict
    elapsed = time.perf_counter() - t0
    ok = (
        worst <= 1e-12 and not failing and growth_verdict == ORACLE["growth_verdict"]
        and mutant_verdict == "violated" and elapsed < 10.0
    )
    detail = (
        f"sampler max residual {worst:.1e}; closure results failing {len(failing)}; growth {growth_verdict} "
        f"(oracle {ORACLE['growth_verdict']}); mutant {mutant_verdict}; {elapsed:.2f}s"
    )
    return ok, detail


def criterion_6():
    bad = [cid for cid, e in c0_transcription() if parse_equation(format_equation(e)) != e]
    if parse_equation(format_equation(growth())) != growth():
        bad.append("growth")
    rand = random_canonical_equations(1000, 20261016)
    rbad = sum(1 for e in rand if parse_equation(format_equation(e)) != e)
    return not bad and rbad == 0, f"fixture failures {bad}; random failures {rbad}/1000"


def criterion_7():
    cell = c0()
    traces = rediscover(cell, cell)
    found = {(t.steps[0].left, t.steps[0].right, t.steps[0].factor) for t in traces}
    conserving = {(e.left, e.right, e.factor) for e in closure(cell).entries if e.conserving}
    single = {x for x in found if x[2].degree == 1}
    ok = found == conserving and len(single) == 48
    return ok, f"single-atom rediscovered {len(single)}; product factor {len(found) - len(single)}; agreement {found == conserving}"


CRITERIA = {
    1: ("closure of C0", criterion_1),
    2: ("worked examples", criterion_2),
    3: ("shape and norm bookkeeping", criterion_3),
    4: ("shift equivariance", criterion_4),
    5: ("numeric soundness suite", criterion_5),
    6: ("parser round trip", criterion_6),
    7: ("depth-1 rediscovery", criterion_7),
}


def summary_line(n: int) -> str:
    ok, detail = RESULTS[n]
    return f"{'PASS' if ok else 'FAIL'} criterion {n} ({CRITERIA[n][0]}): {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance_criterion(n):
    ok, detail = CRITERIA[n][1]()
    RESULTS[n] = (ok, detail)
    print(summary_line(n))
    assert ok, detail


if __name__ == "__main__":
    for n, (_, check) in CRITERIA.items():
        RESULTS[n] = check()
        print(summary_line(n))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
