"""Crossbreeding: elimination of a neutral factor between two equations.

Write each equation as ``f*Q + P = 0`` where ``f`` is the neutral factor and
no term of ``P`` contains ``f``. Since ``f > 0`` both give ``f = -P/Q`` and
equating the two yields ``P1*Q2 - P2*Q1 = 0``. When ``P1, P2`` (or ``Q1, Q2``)
share a polynomial factor it is divided out first; this is how the
two-occurrence case reproduces a cell element, and it stays sound because
``f*Q_i = -P_i`` forces the reduced cross product to vanish as well.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Union

from .algebra import (
    TRIVIAL,
    AlgebraError,
    Atom,
    Equation,
    Monomial,
    SignedPoly,
    Trivial,
    equivalent,
    poly_to_equation,
    signed_of,
)


class CrossbreedError(AlgebraError):
    pass


class NotCommonFactor(CrossbreedError):
    pass


class NonlinearOccurrence(CrossbreedError):
    pass


class Classification(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"
    MIXED = "Mixed"


Operand = Union[Equation, SignedPoly]


def _poly(x: Operand) -> SignedPoly:
    return x if isinstance(x, SignedPoly) else signed_of(x)


@dataclass(frozen=True)
class OccurrenceProfile:
    factor: Monomial
    count_in_e1: int
    count_in_e2: int
    linear: bool = True

    @property
    def classification(self) -> Classification:
        counts = (self.count_in_e1, self.count_in_e2)
        if counts == (1, 1):
            return Classification.A1
        if counts == (2, 2):
            return Classification.A2
        return Classification.MIXED


@dataclass(frozen=True)
class CrossbreedResult:
    outcome: Equation | Trivial
    classification: Classification
    in_cell: str | None = None

    @property
    def trivial(self) -> bool:
        return self.outcome is TRIVIAL


def split(p: SignedPoly, factor: Monomial) -> tuple[SignedPoly, SignedPoly]:
    """``(P, Q)`` with ``p == P + factor*Q`` and no term of ``P`` divisible by ``factor``."""
    rest, quot = [], []
    for mono, c in p.terms:
        if factor.divides(mono):
            quot.append((mono / factor, c))
        else:
            rest.append((mono, c))
    return SignedPoly.of(rest), SignedPoly.of(quot)


def _is_linear(q: SignedPoly, factor: Monomial) -> bool:
    fatoms = factor.atoms()
    return not any(m.counts.keys() & fatoms for m in q.monomials())


def profile(e1: Operand, e2: Operand, factor: Monomial) -> OccurrenceProfile:
    p1, p2 = _poly(e1), _poly(e2)
    q1, q2 = split(p1, factor)[1], split(p2, factor)[1]
    return OccurrenceProfile(
        factor, len(q1), len(q2), _is_linear(q1, factor) and _is_linear(q2, factor)
    )


def _unit_part(p: SignedPoly, prim: SignedPoly) -> SignedPoly:
    mono, k = p.content()
    u = SignedPoly.monomial(mono, k)
    return u if u * prim == p else -u


def cofactors(a: SignedPoly, b: SignedPoly) -> tuple[SignedPoly, SignedPoly, SignedPoly]:
    """``(g, a/g, b/g)`` for a polynomial common factor ``g`` with no monomial content.

    Monomial content is left in the cofactors; canonicalisation removes it.
    """
    one = SignedPoly.monomial(Monomial())
    if not a and not b:
        return one, a, b
    if not a or not b:
        nz = b if not a else a
        g = nz.primitive()
        u = _unit_part(nz, g)
        return (g, SignedPoly(), u) if not a else (g, u, SignedPoly())
    pa, pb = a.primitive(), b.primitive()
    if len(pa) == 1 or len(pb) == 1 or not (pa.atoms() & pb.atoms()):
        return one, a, b
    if pa == pb:
        return pa, _unit_part(a, pa), _unit_part(b, pb)
    return _sympy_cofactors(a, b)


@lru_cache(maxsize=None)
def _ring(nvars: int):
    from sympy import ZZ
    from sympy.polys.rings import ring

    return ring([f"x{i}" for i in range(nvars)], ZZ)[0]


def _sympy_cofactors(a, b):
    atoms = sorted(a.atoms() | b.atoms(), key=lambda x: x.key)
    R = _ring(len(atoms))
    index = {atom: i for i, atom in enumerate(atoms)}

    def to_ring(p):
        rep = {}
        for mono, c in p.terms:
            exps = [0] * len(atoms)
            for atom, n in mono.items:
                exps[index[atom]] = n
            rep[tuple(exps)] = c
        return R.from_dict(rep)

    def from_ring(q):
        return SignedPoly.of(
            (Monomial.of({atoms[i]: e for i, e in enumerate(exps) if e}), int(c))
            for exps, c in q.terms()
        )

    g, ca, cb = (from_ring(x) for x in to_ring(a).cofactors(to_ring(b)))
    mono, k = g.content()
    if not mono.is_unit() or k != 1:
        g, ca, cb = g.divide_monomial(mono, k), ca.scale(mono, k), cb.scale(mono, k)
    return g, ca, cb


def _split_pair(e1: Operand, e2: Operand, factor: Monomial):
    if factor.is_unit():
        raise NotCommonFactor("the unit monomial is not a neutral factor")
    p1, q1 = split(_poly(e1), factor)
    p2, q2 = split(_poly(e2), factor)
    if not q1 or not q2:
        raise NotCommonFactor(f"{factor} does not occur in both equations")
    if not (_is_linear(q1, factor) and _is_linear(q2, factor)):
        raise NonlinearOccurrence(f"{factor} occurs beyond first degree")
    return p1, q1, p2, q2


def raw_eliminate(e1: Operand, e2: Operand, factor: Monomial) -> SignedPoly:
    """``P1*Q2 - P2*Q1`` with like terms combined and nothing else."""
    p1, q1, p2, q2 = _split_pair(e1, e2, factor)
    return p1 * q2 - p2 * q1


def reduced_resultant(e1: Operand, e2: Operand, factor: Monomial) -> SignedPoly:
    p1, q1, p2, q2 = _split_pair(e1, e2, factor)
    _, a1, a2 = cofactors(p1, p2)
    _, b1, b2 = cofactors(q1, q2)
    return a1 * b2 - a2 * b1


def eliminate(
    e1: Operand, e2: Operand, factor: Monomial, cell: "Iterable[tuple[str, Equation]] | None" = None
) -> CrossbreedResult:
    """Crossbreed ``e1`` and ``e2`` on ``factor``.

    Raises NotCommonFactor, NonlinearOccurrence, or DegenerateEquation.
    """
    outcome = poly_to_equation(reduced_resultant(e1, e2, factor))
    prof = profile(e1, e2, factor)
    member = None
    if cell is not None and outcome is not TRIVIAL:
        member = next((cid for cid, eq in cell if equivalent(eq, outcome)), None)
    return CrossbreedResult(outcome, prof.classification, member)


def _co_occurrences(terms: list[Monomial], x: Atom, y: Atom) -> int:
    return sum(1 for m in terms if x in m.counts and y in m.counts)


def common_factors(e1: Operand, e2: Operand) -> list[OccurrenceProfile]:
    """Candidate neutral factors shared by two equations.

    Every atom occurring in both, followed by every product of two such atoms
    that co-occur in exactly one term of each equation.
    """
    p1, p2 = _poly(e1), _poly(e2)
    shared = sorted(p1.atoms() & p2.atoms(), key=lambda a: a.key)
    out = [profile(p1, p2, Monomial.of([a])) for a in shared]
    t1, t2 = p1.monomials(), p2.monomials()
    for x, y in combinations(shared, 2):
        if _co_occurrences(t1, x, y) == 1 and _co_occurrences(t2, x, y) == 1:
            out.append(profile(p1, p2, Monomial.of([x, y])))
    return out


@dataclass(frozen=True)
class ClosureEntry:
    left: str
    right: str
    factor: Monomial
    classification: Classification
    outcome: Equation | Trivial | None
    member: str | None = None
    error: str | None = None

    @property
    def is_product(self) -> bool:
        return self.factor.degree > 1

    @property
    def conserving(self) -> bool:
        return self.member is not None


@dataclass(frozen=True)
class ClosureReport:
    entries: tuple[ClosureEntry, ...] = ()
    empty_pairs: tuple[tuple[str, str], ...] = ()
    pairs: int = 0

    def summary(self) -> dict[str, int]:
        single = [e for e in self.entries if not e.is_product]
        product = [e for e in self.entries if e.is_product]

        def n(entries, cls=None, conserving=True):
            return sum(
                1
                for e in entries
                if e.conserving == conserving and (cls is None or e.classification is cls)
            )

        return {
            "pairs": self.pairs,
            "empty_pairs": len(self.empty_pairs),
            "a1_conserving": n(single, Classification.A1),
            "a2_conserving": n(single, Classification.A2),
            "mixed_conserving": n(single, Classification.MIXED),
            "product_factor_conserving": n(product),
            "non_conserving": n(self.entries, conserving=False),
            "trivial": sum(1 for e in self.entries if e.outcome is TRIVIAL),
            "errors": sum(1 for e in self.entries if e.error is not None),
        }

    def conserving(self) -> list[ClosureEntry]:
        return [e for e in self.entries if e.conserving]


def closure(cell) -> ClosureReport:
    """Crossbreed every pair of distinct cell elements on every candidate factor."""
    elements = list(cell.elements)
    entries: list[ClosureEntry] = []
    empty: list[tuple[str, str]] = []
    for (id1, e1), (id2, e2) in combinations(elements, 2):
        profiles = common_factors(e1, e2)
        if not profiles:
            empty.append((id1, id2))
            continue
        for prof in profiles:
            try:
                res = eliminate(e1, e2, prof.factor, elements)
            except AlgebraError as exc:
                entries.append(
                    ClosureEntry(id1, id2, prof.factor, prof.classification, None, None,
                                 f"{type(exc).__name__}: {exc}")
                )
                continue
            entries.append(
                ClosureEntry(id1, id2, prof.factor, res.classification, res.outcome, res.in_cell)
            )
    return ClosureReport(tuple(entries), tuple(empty), len(elements) * (len(elements) - 1) // 2)


@dataclass(frozen=True)
class GoldenDiff:
    missing: tuple[str, ...]
    unexpected: tuple[str, ...]
    wrong_result: tuple[str, ...]
    empty_pairs_ok: bool
    # conserving product factors absent from the published table; reported, not a mismatch
    additional_product_factor: tuple[str, ...]

    @property
    def match(self) -> bool:
        return not (self.missing or self.unexpected or self.wrong_result) and self.empty_pairs_ok

    def as_dict(self) -> dict:
        return {
            "match": self.match,
            "missing": list(self.missing),
            "unexpected": list(self.unexpected),
            "wrong_result": list(self.wrong_result),
            "empty_pairs_ok": self.empty_pairs_ok,
            "additional_product_factor": list(self.additional_product_factor),
        }


def compare_with_golden(report: ClosureReport, golden: dict) -> GoldenDiff:
    """Diff a closure report against a golden table.

    Single-atom entries and factorless pairs must agree exactly. Every golden
    product-factor entry must be reproduced; further conserving product
    factors are listed separately.
    """

    def label(pair, factor):
        return f"[{pair[0]} x {pair[1]}]{factor}"

    computed = {
        ((e.left, e.right), str(e.factor)): e for e in report.entries
    }
    missing, unexpected, wrong = [], [], []
    expected_keys = set()
    for group in ("single_atom", "product_factor"):
        for row in golden[group]:
            key = (tuple(row["pair"]), row["factor"])
            expected_keys.add(key)
            e = computed.get(key)
            if e is None:
                missing.append(label(*key))
            elif e.member != row["result"] or e.classification.value != row["classification"]:
                wrong.append(
                    f"{label(*key)}: expected {row['classification']} -> {row['result']}, "
                    f"got {e.classification.value} -> {e.member or 'non-member'}"
                )
    additional = []
    for key, e in computed.items():
        if key in expected_keys:
            continue
        if e.is_product and e.conserving:
            additional.append(f"{label(*key)} {e.classification.value} -> {e.member}")
        else:
            unexpected.append(label(*key))
    empty_ok = sorted(map(tuple, golden["empty_pairs"])) == sorted(report.empty_pairs)
    return GoldenDiff(tuple(missing), tuple(unexpected), tuple(wrong), empty_ok, tuple(additional))
