"""Atoms, monomials, signed polynomials and equations over positive moduli.

Every atom stands for the modulus of a special function at one variable, so
all atoms are positive reals. That is what licenses the normalisations in
:func:`canon`: a monomial common to every term can be divided out, and a
monomial occurring on both sides can be cancelled.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Iterator, Mapping


class AlgebraError(ValueError):
    pass


class DegenerateEquation(AlgebraError):
    """One side vanished while the other did not: unsatisfiable for positive atoms."""


class Func(enum.IntEnum):
    # enum order is the atom sort order (the foursome order of the first row)
    ZETA = 0
    GAMMA = 1
    CN = 2
    JP = 3

    @property
    def label(self) -> str:
        return _FUNC_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> Func:
        for func, name in _FUNC_LABELS.items():
            if name == label:
                return func
        raise KeyError(label)


_FUNC_LABELS = {Func.ZETA: "zeta", Func.GAMMA: "Gamma", Func.CN: "cn", Func.JP: "Jp"}
_DEFAULT_PARAM = {Func.ZETA: None, Func.GAMMA: None, Func.CN: "k", Func.JP: "p"}


@dataclass(frozen=True)
class Atom:
    """``|func(scale * s_sub^sup [, param])|``."""

    func: Func
    scale: int
    sub: int
    sup: int
    param: str | None = field(default=None)
    key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "func", Func(self.func))
        if self.param is None:
            object.__setattr__(self, "param", _DEFAULT_PARAM[self.func])
        if self.scale < 1:
            raise AlgebraError(f"scale must be >= 1, got {self.scale}")
        if not 1 <= self.sub <= 4:
            raise AlgebraError(f"subscript must be in 1..4, got {self.sub}")
        if self.sup < 1:
            raise AlgebraError(f"superscript must be >= 1, got {self.sup}")
        if (self.param is None) != (_DEFAULT_PARAM[self.func] is None):
            raise AlgebraError(f"{self.func.label} does not take parameter {self.param!r}")
        key = (int(self.func), self.scale, self.sub, self.sup, self.param or "")
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: Atom) -> bool:
        return self.key < other.key

    def shifted(self, m: int) -> Atom:
        return Atom(self.func, self.scale + 4 * m, self.sub, self.sup + 4 * m, self.param)

    def __str__(self) -> str:
        arg = f"s_{self.sub}^{self.sup}"
        if self.scale != 1:
            arg = f"{self.scale}*{arg}"
        if self.func is Func.CN:
            arg += f",{self.param}"
        return f"|{self.func.label}({arg})|"


def _atom_key(item: tuple[Atom, int]) -> tuple:
    return item[0].key


@dataclass(frozen=True)
class Monomial:
    """A product of atoms, kept as a sorted tuple of ``(atom, multiplicity)``."""

    items: tuple[tuple[Atom, int], ...] = ()

    @classmethod
    def of(cls, atoms: Iterable[Atom] | Mapping[Atom, int] = ()) -> Monomial:
        if isinstance(atoms, dict):
            counts = atoms
        else:
            counts = {}
            for a in atoms:
                counts[a] = counts.get(a, 0) + 1
        if any(n < 0 for n in counts.values()):
            raise AlgebraError("negative multiplicity")
        return cls(tuple(sorted(((a, n) for a, n in counts.items() if n), key=_atom_key)))

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = self.__dict__["_hash"] = hash(self.items)
        return h

    @cached_property
    def counts(self) -> dict[Atom, int]:
        return dict(self.items)

    @cached_property
    def degree(self) -> int:
        return sum(n for _, n in self.items)

    @cached_property
    def key(self) -> tuple:
        # descending degree first: a side lists its longest products first
        return (-self.degree, tuple(a.key for a in self.expanded()))

    def expanded(self) -> Iterator[Atom]:
        for atom, n in self.items:
            for _ in range(n):
                yield atom

    def atoms(self) -> frozenset[Atom]:
        return frozenset(self.counts)

    def multiplicity(self, atom: Atom) -> int:
        return self.counts.get(atom, 0)

    def is_unit(self) -> bool:
        return not self.items

    def divides(self, other: Monomial) -> bool:
        oc = other.counts
        return all(oc.get(a, 0) >= n for a, n in self.items)

    def __mul__(self, other: Monomial) -> Monomial:
        if not other.items:
            return self
        counts = dict(self.items)
        for a, n in other.items:
            counts[a] = counts.get(a, 0) + n
        return Monomial(tuple(sorted(counts.items(), key=_atom_key)))

    def __truediv__(self, other: Monomial) -> Monomial:
        counts = dict(self.items)
        for a, n in other.items:
            left = counts.get(a, 0) - n
            if left < 0:
                raise AlgebraError(f"{other} does not divide {self}")
            counts[a] = left
        return Monomial(tuple((a, counts[a]) for a, _ in self.items if counts[a]))

    def gcd(self, other: Monomial) -> Monomial:
        return Monomial.of({a: min(n, other.multiplicity(a)) for a, n in self.items})

    def shifted(self, m: int) -> Monomial:
        return Monomial.of({a.shifted(m): n for a, n in self.items})

    def __lt__(self, other: Monomial) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        if self.is_unit():
            return "1"
        return "*".join(str(a) if n == 1 else f"{a}^{n}" for a, n in self.items)


UNIT = Monomial()


def monomial_gcd(monomials: Iterable[Monomial]) -> Monomial:
    monomials = list(monomials)
    if not monomials:
        return UNIT
    return reduce(Monomial.gcd, monomials)


@dataclass(frozen=True)
class SignedPoly:
    """Integer combination of monomials; terms sorted, no zero coefficients."""

    terms: tuple[tuple[Monomial, int], ...] = ()

    @classmethod
    def of(cls, terms: Iterable[tuple[Monomial, int]] | Mapping[Monomial, int]) -> SignedPoly:
        acc: dict[Monomial, int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for mono, coeff in items:
            acc[mono] = acc.get(mono, 0) + coeff
        return cls(tuple(sorted(((m, c) for m, c in acc.items() if c), key=lambda mc: mc[0].key)))

    @classmethod
    def monomial(cls, mono: Monomial, coeff: int = 1) -> SignedPoly:
        return cls.of([(mono, coeff)])

    @cached_property
    def coeffs(self) -> dict[Monomial, int]:
        return dict(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def monomials(self) -> list[Monomial]:
        return [m for m, _ in self.terms]

    def atoms(self) -> frozenset[Atom]:
        return frozenset(a for m, _ in self.terms for a in m.counts)

    def __add__(self, other: SignedPoly) -> SignedPoly:
        return SignedPoly.of(self.terms + other.terms)

    def __neg__(self) -> SignedPoly:
        return SignedPoly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: SignedPoly) -> SignedPoly:
        return self + (-other)

    def __mul__(self, other: SignedPoly) -> SignedPoly:
        return SignedPoly.of((m1 * m2, c1 * c2) for m1, c1 in self.terms for m2, c2 in other.terms)

    def scale(self, mono: Monomial, coeff: int = 1) -> SignedPoly:
        return SignedPoly.of((m * mono, c * coeff) for m, c in self.terms)

    def divide_monomial(self, mono: Monomial, coeff: int = 1) -> SignedPoly:
        if any(c % coeff for _, c in self.terms):
            raise AlgebraError(f"{coeff} does not divide every coefficient")
        return SignedPoly.of((m / mono, c // coeff) for m, c in self.terms)

    def content(self) -> tuple[Monomial, int]:
        """Monomial gcd and positive integer gcd of all terms (``(UNIT, 1)`` for zero)."""
        if not self.terms:
            return UNIT, 1
        return monomial_gcd(self.monomials()), reduce(gcd, (abs(c) for _, c in self.terms))

    def primitive(self) -> SignedPoly:
        """Divide out the content and fix the sign so the leading coefficient is positive."""
        mono, k = self.content()
        prim = self.divide_monomial(mono, k)
        if prim.terms and prim.terms[0][1] < 0:
            prim = -prim
        return prim

    def shifted(self, m: int) -> SignedPoly:
        return SignedPoly.of((mono.shifted(m), c) for mono, c in self.terms)

    def evaluate(self, values: Mapping[Atom, float]) -> float:
        total = 0.0
        for mono, c in self.terms:
            p = float(c)
            for atom, n in mono.items:
                p *= values[atom] ** n
            total += p
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append(f"{sign} {mag}{mono}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text


class Trivial:
    """Marker for an equation whose two sides coincide identically."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TRIVIAL"

    def __reduce__(self):
        return (Trivial, ())


TRIVIAL = Trivial()


def _sorted_side(monos: Iterable[Monomial]) -> tuple[Monomial, ...]:
    return tuple(sorted(monos, key=lambda m: m.key))


@dataclass(frozen=True)
class Equation:
    """``sum(left) = sum(right)``; each side is a multiset of monomials.

    The ``id`` is a label only and takes no part in equality.
    """

    left: tuple[Monomial, ...]
    right: tuple[Monomial, ...]
    id: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        if not self.left or not self.right:
            raise DegenerateEquation("both sides of an equation must be nonempty")

    @property
    def terms(self) -> tuple[Monomial, ...]:
        return self.left + self.right

    def atoms(self) -> frozenset[Atom]:
        return frozenset(a for m in self.terms for a in m.counts)

    def with_id(self, id: str | None) -> Equation:
        return Equation(self.left, self.right, id)

    def swapped(self) -> Equation:
        return Equation(self.right, self.left, self.id)

    def shifted(self, m: int) -> Equation:
        return Equation(
            tuple(t.shifted(m) for t in self.left), tuple(t.shifted(m) for t in self.right), self.id
        )

    @property
    def norm(self) -> int:
        return sum(t.degree for t in self.terms)

    def __str__(self) -> str:
        return " + ".join(map(str, self.left)) + " = " + " + ".join(map(str, self.right))


@dataclass(frozen=True)
class Shape:
    left_degrees: tuple[int, ...]
    right_degrees: tuple[int, ...]

    @property
    def norm(self) -> int:
        return sum(self.left_degrees) + sum(self.right_degrees)

    def __str__(self) -> str:
        fmt = lambda ds: "(" + ",".join(map(str, ds)) + ")"
        return f"{fmt(self.left_degrees)}<->{fmt(self.right_degrees)}"


def signed_of(eq: Equation) -> SignedPoly:
    """Left terms with coefficient +1, right terms with -1, like terms combined."""
    return SignedPoly.of([(m, 1) for m in eq.left] + [(m, -1) for m in eq.right])


def _side_key(side: tuple[Monomial, ...]) -> tuple:
    return tuple(m.key for m in side)


def poly_to_equation(p: SignedPoly, id: str | None = None) -> Equation | Trivial:
    """Canonical equation ``p = 0``, or :data:`TRIVIAL` for the zero polynomial."""
    if not p:
        return TRIVIAL
    p = p.divide_monomial(*p.content())
    left = _sorted_side(m for m, c in p.terms if c > 0 for _ in range(c))
    right = _sorted_side(m for m, c in p.terms if c < 0 for _ in range(-c))
    if not left or not right:
        raise DegenerateEquation(f"sum of positive terms cannot vanish: {p}")
    if _side_key(right) < _side_key(left):
        left, right = right, left
    return Equation(left, right, id)


def raw_equation(p: SignedPoly, id: str | None = None) -> Equation:
    """Positive terms left, negative terms right; no gcd division, no side reordering."""
    left = _sorted_side(m for m, c in p.terms if c > 0 for _ in range(c))
    right = _sorted_side(m for m, c in p.terms if c < 0 for _ in range(-c))
    return Equation(left, right, id)


def canon(eq: Equation) -> Equation | Trivial:
    """Canonical representative of ``eq`` (keeps the id).

    Like monomials are combined, monomials shared by both sides cancel, the
    common monomial factor and integer factor are divided out, and terms and
    sides are put in canonical order. An equation whose sides cancel
    completely comes back as :data:`TRIVIAL`.
    """
    return poly_to_equation(signed_of(eq), eq.id)


def shape(eq: Equation) -> Shape:
    return Shape(
        tuple(sorted((m.degree for m in eq.left), reverse=True)),
        tuple(sorted((m.degree for m in eq.right), reverse=True)),
    )


def equivalent(e1: Equation, e2: Equation) -> bool:
    return canon(e1) == canon(e2)
