"""Atoms as positive reals: residuals, variety sampling, consequence checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping

import numpy as np

from .algebra import Atom, Equation, SignedPoly, signed_of
from .cells import Cell

DEFAULT_AMPLITUDE = 0.5
CONVERGENCE_TOL = 1e-12
MAX_SWEEPS = 200
MAX_RETRIES = 20
# a target is "violated" when it misses by VIOLATION_FACTOR * tol
# at a point the solver nailed SOLVER_MARGIN times tighter than tol
VIOLATION_FACTOR = 10.0
SOLVER_MARGIN = 100.0
# more skipped samples than this fraction makes the verdict inconclusive
MAX_SKIP_FRACTION = 0.1


class NumericError(RuntimeError):
    pass


class MissingAtom(KeyError):
    pass


class NoConvergence(NumericError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3g})")
        self.best_residual = best_residual


class Assignment(Mapping[Atom, float]):
    """Immutable map from atoms to positive reals."""

    def __init__(self, values: Mapping[Atom, float]):
        bad = [a for a, x in values.items() if not x > 0]
        if bad:
            raise ValueError(f"moduli must be positive: {bad[0]}")
        self._values = dict(values)

    def __getitem__(self, atom: Atom) -> float:
        try:
            return self._values[atom]
        except KeyError:
            raise MissingAtom(atom) from None

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"Assignment({len(self)} atoms)"

    def scaled(self, c: float) -> Assignment:
        return Assignment({a: c * x for a, x in self._values.items()})

    @classmethod
    def ones(cls, atoms) -> Assignment:
        return cls({a: 1.0 for a in atoms})


def _side(monos, v: Mapping[Atom, float]) -> float:
    total = 0.0
    for mono in monos:
        p = 1.0
        for atom, n in mono.items:
            try:
                x = v[atom]
            except KeyError:
                raise MissingAtom(atom) from None
            p *= x**n
        total += p
    return total


def residual(eq: Equation, v: Mapping[Atom, float]) -> float:
    """``(L - R) / max(L, R)`` for the evaluated sides."""
    left, right = _side(eq.left, v), _side(eq.right, v)
    return (left - right) / max(left, right)


def poly_residual(p: SignedPoly, v: Mapping[Atom, float]) -> float:
    """Relative residual of ``p = 0``: positive part against negative part."""
    pos = _side((m for m, c in p.terms if c > 0 for _ in range(c)), v)
    neg = _side((m for m, c in p.terms if c < 0 for _ in range(-c)), v)
    if pos == neg == 0.0:
        return 0.0
    return (pos - neg) / max(pos, neg)


@dataclass(frozen=True)
class _Compiled:
    atoms: tuple[Atom, ...]
    # per equation: pivot index, terms with the pivot (sign, other indices), terms without
    rows: tuple[tuple[int, tuple, tuple], ...]
    # per equation: (sign, indices) for residual evaluation
    full: tuple[tuple, ...]

    @property
    def pivots(self) -> list[int]:
        return [r[0] for r in self.rows]


def _expand(p: SignedPoly, index: dict[Atom, int]) -> list[tuple[int, tuple[int, ...]]]:
    out = []
    for mono, c in p.terms:
        idx = tuple(index[a] for a in mono.expanded())
        out.extend([(1 if c > 0 else -1, idx)] * abs(c))
    return out


@lru_cache(maxsize=64)
def _compile(cell: Cell) -> _Compiled:
    atoms = tuple(sorted(cell.atoms(), key=lambda a: a.key))
    index = {a: i for i, a in enumerate(atoms)}
    taken: set[int] = set()
    rows, full = [], []
    for cid, eq in cell.elements:
        terms = _expand(signed_of(eq), index)
        pivot = None
        for i, atom in enumerate(atoms):
            if i in taken or atom not in eq.atoms():
                continue
            if all(idx.count(i) <= 1 for _, idx in terms):
                pivot = i
                break
        if pivot is None:
            raise NumericError(f"no linear pivot atom available for {cid}")
        taken.add(pivot)
        with_p = tuple((s, tuple(j for j in idx if j != pivot)) for s, idx in terms if pivot in idx)
        without = tuple((s, idx) for s, idx in terms if pivot not in idx)
        rows.append((pivot, with_p, without))
        full.append(tuple(terms))
    return _Compiled(atoms, tuple(rows), tuple(full))


def _prod(x: list[float], idx: tuple[int, ...]) -> float:
    p = 1.0
    for j in idx:
        p *= x[j]
    return p


def _max_residual(comp: _Compiled, x: list[float]) -> float:
    worst = 0.0
    for terms in comp.full:
        pos = neg = 0.0
        for s, idx in terms:
            if s > 0:
                pos += _prod(x, idx)
            else:
                neg += _prod(x, idx)
        worst = max(worst, abs(pos - neg) / max(pos, neg))
    return worst


def _sweeps(comp: _Compiled, x: list[float]) -> tuple[bool, float]:
    res = _max_residual(comp, x)
    if res <= CONVERGENCE_TOL:
        return True, res
    for _ in range(MAX_SWEEPS):
        for pivot, with_p, without in comp.rows:
            q = sum(s * _prod(x, idx) for s, idx in with_p)
            p = sum(s * _prod(x, idx) for s, idx in without)
            if q == 0.0:
                return False, res
            value = -p / q
            if not value > 0 or not math.isfinite(value):
                return False, res
            x[pivot] = value
        res = _max_residual(comp, x)
        if res <= CONVERGENCE_TOL:
            return True, res
    return False, res


@lru_cache(maxsize=8192)
def _sample(cell: Cell, seed: int, amplitude: float) -> tuple[Assignment, float]:
    if not 0 <= amplitude < 1:
        raise ValueError("amplitude must lie in [0, 1)")
    comp = _compile(cell)
    rng = np.random.default_rng(seed)
    lo, hi = math.log1p(-amplitude), math.log1p(amplitude)
    best = math.inf
    for _ in range(1 + MAX_RETRIES):
        x = [float(v) for v in np.exp(rng.uniform(lo, hi, len(comp.atoms)))]
        ok, res = _sweeps(comp, x)
        if ok:
            return Assignment(dict(zip(comp.atoms, x))), res
        best = min(best, res)
    raise NoConvergence(f"no positive solution after {1 + MAX_RETRIES} draws", best)


def sample_variety(cell: Cell, seed: int, amplitude: float = DEFAULT_AMPLITUDE) -> Assignment:
    """A positive assignment satisfying every element of ``cell`` to 1e-12.

    Non-pivot atoms are drawn log-uniformly in ``[1-amplitude, 1+amplitude]``
    from a generator seeded with ``seed``; Gauss-Seidel sweeps then solve each
    equation for its pivot atom. Draws whose pivots leave the positive orthant
    or fail to settle within the sweep budget are redrawn.
    """
    return _sample(cell, int(seed), float(amplitude))[0]


def pivots(cell: Cell) -> dict[str, Atom]:
    comp = _compile(cell)
    return {cid: comp.atoms[p] for (cid, _), p in zip(cell.elements, comp.pivots)}


@dataclass(frozen=True)
class ConsequenceReport:
    target_id: str | None
    samples: int
    tolerance: float
    max_rel_residual: float
    verdict: str  # consequence | violated | inconclusive
    seed: int = 0
    amplitude: float = DEFAULT_AMPLITUDE
    skipped: int = 0
    solver_max_residual: float = 0.0
    residuals: tuple[float, ...] = field(default=(), repr=False)


def check_consequence(
    cell: Cell,
    target: Equation | SignedPoly,
    samples: int = 1000,
    tol: float = 1e-9,
    seed: int = 42,
    amplitude: float = DEFAULT_AMPLITUDE,
    target_id: str | None = None,
) -> ConsequenceReport:
    """Does ``target`` hold at ``samples`` points of the cell's variety?

    Sample ``i`` uses seed ``seed + i``, so the point set does not depend on
    evaluation order.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    missing = (target.atoms() if isinstance(target, SignedPoly) else target.atoms()) - cell.atoms()
    if missing:
        raise MissingAtom(sorted(missing, key=lambda a: a.key)[0])
    if target_id is None and isinstance(target, Equation):
        target_id = target.id
    evaluate = poly_residual if isinstance(target, SignedPoly) else residual

    residuals: list[float] = []
    skipped = 0
    solver_worst = 0.0
    violated = False
    for i in range(samples):
        try:
            v, solver_res = _sample(cell, seed + i, float(amplitude))
        except NoConvergence:
            skipped += 1
            continue
        r = abs(evaluate(target, v))
        residuals.append(r)
        solver_worst = max(solver_worst, solver_res)
        if r > VIOLATION_FACTOR * tol and solver_res * SOLVER_MARGIN <= tol:
            violated = True

    worst = max(residuals, default=math.nan)
    if violated:
        verdict = "violated"
    elif not residuals or skipped > MAX_SKIP_FRACTION * samples:
        verdict = "inconclusive"
    elif worst <= tol:
        verdict = "consequence"
    else:
        verdict = "inconclusive"
    return ConsequenceReport(
        target_id, samples, tol, worst, verdict, seed, float(amplitude), skipped, solver_worst,
        tuple(residuals),
    )
