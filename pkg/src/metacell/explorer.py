"""Bounded best-first search for chains of crossbreedings, with replayable traces."""
from __future__ import annotations

import heapq
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Union

from .algebra import (
    TRIVIAL,
    AlgebraError,
    Equation,
    Monomial,
    SignedPoly,
    canon,
    poly_to_equation,
    raw_equation,
    signed_of,
)
from .cells import Cell
from .crossbreed import common_factors, eliminate, raw_eliminate

NORMALIZED = "normalized"
RAW = "raw"
MODES = (NORMALIZED, RAW)

Result = Union[Equation, SignedPoly]


class ReplayMismatch(AlgebraError):
    pass


@dataclass(frozen=True)
class DerivationStep:
    left: str  # cell id, or "@k" for the result of step k (1-based)
    right: str
    factor: Monomial
    mode: str
    result: Result


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple[DerivationStep, ...] = ()
    start: str | None = None  # cell id of a zero-step trace

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 4
    max_frontier: int = 2000
    norm_cap: int = 80
    max_expansions: int = 400

    def __post_init__(self):
        if self.max_depth < 0 or self.max_frontier < 1 or self.norm_cap < 1 or self.max_expansions < 1:
            raise ValueError("search budget values must be positive")


@dataclass(frozen=True)
class NotFound:
    expanded: int
    generated: int
    frontier: int
    best_overlap: int
    best_norm_gap: int
    exhausted: bool  # True when the reachable space within the budget was fully explored


def _apply(left: Result, right: Result, factor: Monomial, mode: str) -> Result:
    if mode == NORMALIZED:
        out = eliminate(left, right, factor).outcome
        return out
    if mode == RAW:
        return raw_eliminate(left, right, factor)
    raise ValueError(f"unknown mode {mode!r}")


def _as_poly(x: Result) -> SignedPoly:
    return x if isinstance(x, SignedPoly) else signed_of(x)


def _canonical(x: Result):
    if x is TRIVIAL:
        return TRIVIAL
    return poly_to_equation(x) if isinstance(x, SignedPoly) else canon(x)


def _norm(x: Result) -> int:
    if isinstance(x, SignedPoly):
        return sum(m.degree * abs(c) for m, c in x.terms)
    return x.norm


def _overlap(c: Equation, target: Equation) -> int:
    mine = Counter(c.left) + Counter(c.right)
    theirs = Counter(target.left) + Counter(target.right)
    return sum((mine & theirs).values())


def _trace_result(trace: DerivationTrace, cell: Cell) -> Result:
    if trace.steps:
        return trace.steps[-1].result
    return cell[trace.start]


@dataclass(order=True)
class _Node:
    priority: tuple
    serial: int
    value: Result = field(compare=False)
    steps: tuple[DerivationStep, ...] = field(compare=False)
    ref: str = field(compare=False)


def derive_search(cell: Cell, target: Equation, budget: SearchBudget = SearchBudget()):
    """Best-first search for a chain of crossbreedings ending in ``target``.

    Moves crossbreed a frontier equation with a cell element on any shared
    candidate factor, in normalized or raw mode. Candidates are ranked by the
    number of target monomials they contain (canonical forms), then by the
    gap between their norm and the target's, then by depth. Returns a
    :class:`DerivationTrace` or :class:`NotFound`.
    """
    goal = canon(target)
    if goal is TRIVIAL:
        raise ValueError("target is trivial")
    for cid, eq in cell.elements:
        if eq == goal:
            return DerivationTrace(start=cid)
    target_norm = target.norm
    serial = itertools.count()

    def priority(value: Result, depth: int):
        c = _canonical(value)
        return (-_overlap(c, goal), abs(_norm(value) - target_norm), depth, str(c))

    heap: list[_Node] = [
        _Node(priority(eq, 0), next(serial), eq, (), cid) for cid, eq in cell.elements
    ]
    heapq.heapify(heap)
    seen: set = {eq for _, eq in cell.elements}
    expanded = generated = 0
    best = min(n.priority for n in heap)
    exhausted = True

    while heap:
        if expanded >= budget.max_expansions:
            exhausted = False
            break
        node = heapq.heappop(heap)
        depth = len(node.steps)
        if depth >= budget.max_depth:
            continue
        expanded += 1
        for cid, partner in cell.elements:
            for prof in common_factors(node.value, partner):
                for mode in MODES:
                    try:
                        out = _apply(node.value, partner, prof.factor, mode)
                        c = _canonical(out)
                    except AlgebraError:
                        continue
                    if c is TRIVIAL or out is TRIVIAL or _norm(out) > budget.norm_cap:
                        continue
                    key = out if mode == RAW else c
                    if key in seen:
                        continue
                    seen.add(key)
                    generated += 1
                    step = DerivationStep(node.ref, cid, prof.factor, mode, out)
                    steps = node.steps + (step,)
                    if c == goal:
                        return DerivationTrace(steps)
                    pr = priority(out, depth + 1)
                    best = min(best, pr)
                    heapq.heappush(heap, _Node(pr, next(serial), out, steps, f"@{len(steps)}"))
        if len(heap) > budget.max_frontier:
            heap = heapq.nsmallest(budget.max_frontier, heap)
            heapq.heapify(heap)
            exhausted = False
    return NotFound(expanded, generated, len(heap), -best[0], best[1], exhausted)


def rediscover(cell: Cell, goals: Cell, mode: str = NORMALIZED) -> list[DerivationTrace]:
    """Every one-step crossbreeding of two distinct cell elements that lands in ``goals``."""
    found = []
    for (id1, e1), (id2, e2) in itertools.combinations(cell.elements, 2):
        for prof in common_factors(e1, e2):
            try:
                out = _apply(e1, e2, prof.factor, mode)
                c = _canonical(out)
            except AlgebraError:
                continue
            if c is not TRIVIAL and any(g == c for _, g in goals.elements):
                found.append(DerivationTrace((DerivationStep(id1, id2, prof.factor, mode, out),)))
    return found


def _resolve(ref: str, cell: Cell, results: list[Result]) -> Result:
    if ref.startswith("@"):
        k = int(ref[1:])
        if not 1 <= k <= len(results):
            raise ReplayMismatch(f"reference {ref} points past the steps replayed so far")
        return results[k - 1]
    try:
        return cell[ref]
    except KeyError:
        raise ReplayMismatch(f"unknown cell id {ref!r}") from None


def replay(trace: DerivationTrace, cell: Cell) -> Equation:
    """Re-run every step and check it reproduces the recorded result."""
    if not trace.steps:
        if trace.start is None:
            raise ReplayMismatch("empty trace without a start element")
        return _resolve(trace.start, cell, [])
    results: list[Result] = []
    for i, step in enumerate(trace.steps, 1):
        left = _resolve(step.left, cell, results)
        right = _resolve(step.right, cell, results)
        try:
            out = _apply(left, right, step.factor, step.mode)
        except AlgebraError as exc:
            raise ReplayMismatch(f"step {i}: {exc}") from None
        recorded = step.result
        if step.mode == RAW:
            ok = _as_poly(recorded) == out
        else:
            ok = out == recorded
        if not ok:
            raise ReplayMismatch(f"step {i} does not reproduce its recorded result")
        results.append(out)
    final = results[-1]
    if isinstance(final, SignedPoly):
        return raw_equation(final)
    return final
