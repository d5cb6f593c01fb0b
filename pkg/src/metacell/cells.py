"""Cell fixtures, the foursome schedule, and the generation shift g -> 4m + g."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, TypeVar

from .algebra import TRIVIAL, Atom, Equation, Func, Monomial, SignedPoly, canon, equivalent
from .dsl.parser import parse_cell_text

_CHECKSUMS = {
    "c0.cell": "75df96d53bb0fbfab5e714b240ff026d98876ba9e8736c1d5a7192a8e1d11e22",
    "growth.cell": "86f53f61e6cbded875036c052867a462b278dee0058dadcea8d0b419b71f5784",
    "closure_golden.json": "1301c8a6e1edf4764ff8d08ce774a919f282e1eb64d77412a739d652762bbda1",
}


class FixtureError(RuntimeError):
    pass


class CellError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    elements: tuple[tuple[str, Equation], ...]
    generation: int = 0

    def __post_init__(self):
        elements = tuple((cid, eq.with_id(cid)) for cid, eq in self.elements)
        object.__setattr__(self, "elements", elements)
        ids = [cid for cid, _ in elements]
        if len(set(ids)) != len(ids):
            raise CellError("cell ids must be unique")
        for cid, eq in elements:
            if canon(eq) != eq:
                raise CellError(f"cell element {cid} is not canonical")
        for i, (ci, ei) in enumerate(elements):
            for cj, ej in elements[i + 1:]:
                if ei == ej:
                    raise CellError(f"cell elements {ci} and {cj} are equivalent")

    @classmethod
    def of(cls, items: Iterable[tuple[str, Equation]], generation: int = 0) -> Cell:
        """Build a cell, canonicalising each equation."""
        out = []
        for cid, eq in items:
            c = canon(eq)
            if c is TRIVIAL:
                raise CellError(f"cell element {cid} is trivial")
            out.append((cid, c))
        return cls(tuple(out), generation)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[tuple[str, Equation]]:
        return iter(self.elements)

    def __getitem__(self, cid: str) -> Equation:
        for i, eq in self.elements:
            if i == cid:
                return eq
        raise KeyError(cid)

    @property
    def ids(self) -> list[str]:
        return [cid for cid, _ in self.elements]

    def atoms(self) -> frozenset[Atom]:
        return frozenset().union(*(eq.atoms() for _, eq in self.elements))

    def subcell(self, ids: Iterable[str]) -> Cell:
        return Cell(tuple((cid, self[cid]) for cid in ids), self.generation)


@dataclass(frozen=True)
class Foursome:
    row: int
    entries: tuple[tuple[Func, int], ...]


_FIRST_ROW = (Func.ZETA, Func.GAMMA, Func.CN, Func.JP)


def foursome(g: int) -> Foursome:
    """Row ``g`` of the schedule: the first row rotated left by ``(g-1) mod 4``, at scale ``g``."""
    if g < 1:
        raise ValueError("row index must be >= 1")
    r = (g - 1) % 4
    funcs = _FIRST_ROW[r:] + _FIRST_ROW[:r]
    return Foursome(g, tuple((f, g) for f in funcs))


def schedule_atom(g: int, sub: int) -> Atom:
    """The atom of row ``g`` evaluated at ``s_sub^g``."""
    func, scale = foursome(g).entries[sub - 1]
    return Atom(func, scale, sub, g)


T = TypeVar("T", Cell, Equation, Monomial, Atom, SignedPoly)


def shift(x: T, m: int) -> T:
    """Relabel every atom ``scale -> 4m + scale`` (and the superscript likewise)."""
    if m < 0:
        raise ValueError("shift must be nonnegative")
    if isinstance(x, Cell):
        return Cell(tuple((cid, eq.shifted(m)) for cid, eq in x.elements), x.generation + m)
    return x.shifted(m)


def contains(cell: Cell, eq: Equation) -> str | None:
    c = canon(eq)
    if c is TRIVIAL:
        return None
    return next((cid for cid, e in cell.elements if e == c), None)


def _read_fixture(name: str) -> str:
    data = resources.files("metacell.data").joinpath(name).read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    if digest != _CHECKSUMS[name]:
        raise FixtureError(f"checksum mismatch for bundled fixture {name}")
    return data.decode("utf-8")


def load_cell(path: str | Path, generation: int = 0) -> Cell:
    entries, _ = parse_cell_text(Path(path).read_text(encoding="utf-8"))
    return Cell.of(entries, generation)


@lru_cache(maxsize=None)
def c0_transcription() -> tuple[tuple[str, Equation], ...]:
    """The six equations exactly as transcribed (not canonicalised)."""
    entries, _ = parse_cell_text(_read_fixture("c0.cell"))
    return tuple(entries)


@lru_cache(maxsize=None)
def c0() -> Cell:
    return Cell.of(c0_transcription())


@lru_cache(maxsize=None)
def growth() -> Equation:
    """The cancerous-growth equation as published (not divided by its common factor)."""
    entries, _ = parse_cell_text(_read_fixture("growth.cell"))
    ((_, eq),) = entries
    return eq


def golden_closure() -> dict:
    return json.loads(_read_fixture("closure_golden.json"))


def equivalent_in(cell: Cell, eq: Equation) -> list[str]:
    return [cid for cid, e in cell.elements if equivalent(e, eq)]
