from __future__ import annotations

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from metacell import (
    TRIVIAL,
    DegenerateEquation,
    Equation,
    Monomial,
    SignedPoly,
    canon,
    equivalent,
    poly_to_equation,
    shape,
    signed_of,
)
from metacell.algebra import UNIT, AlgebraError, Atom, Func, monomial_gcd
from metacell.dsl.parser import parse_equation
from metacell.numeric import residual

from .conftest import C0, atom, equations, monomials, positive_values

a, b, c, d = (atom("zeta", 1, 1, 1), atom("Gamma", 1, 2, 1), atom("cn", 1, 3, 1), atom("Jp", 1, 4, 1))


def eq(left, right):
    return Equation(tuple(Monomial.of(t) for t in left), tuple(Monomial.of(t) for t in right))


def test_atom_validation():
    with pytest.raises(AlgebraError):
        Atom(Func.ZETA, 0, 1, 1)
    with pytest.raises(AlgebraError):
        Atom(Func.ZETA, 1, 5, 1)
    with pytest.raises(AlgebraError):
        Atom(Func.GAMMA, 1, 1, 1, "k")
    assert atom("cn", 1, 3, 1).param == "k"


def test_atom_order_follows_foursome_order():
    assert atom("zeta", 4, 2, 4) < atom("Gamma", 1, 1, 1) < atom("cn", 1, 1, 1) < atom("Jp", 1, 1, 1)


def test_atom_text():
    assert str(atom("Jp", 2, 3, 2)) == "|Jp(2*s_3^2)|"
    assert str(atom("cn", 1, 3, 1)) == "|cn(s_3^1,k)|"


def test_equation_sides_nonempty():
    with pytest.raises(AlgebraError):
        Equation((), (Monomial.of([a]),))


def test_canon_swapped_sides():
    e = C0["1.2"]
    assert canon(e.swapped()) == e


def test_canon_divides_common_factor():
    assert canon(eq([[a, c], [b, c]], [[c, d]])) == eq([[a], [b]], [[d]])


def test_canon_cancels_shared_monomials():
    assert canon(eq([[a, b], [c]], [[a, b], [d]])) == eq([[c]], [[d]])


def test_canon_trivial_and_degenerate():
    assert canon(eq([[a]], [[a]])) is TRIVIAL
    with pytest.raises(DegenerateEquation):
        canon(eq([[a], [b]], [[a]]))


def test_canon_keeps_id():
    assert canon(C0["1.4"]).id == "1.4"


def test_signed_of_cell_element():
    p = signed_of(C0["1.2"])
    assert sorted(p.coeffs.values()) == [-1, -1, 1, 1]
    assert sorted(m.degree for m in p.monomials()) == [2, 2, 3, 3]


def test_signed_of_self_equation_is_zero():
    assert not signed_of(eq([[a]], [[a]]))


def test_signed_of_growth(growth_eq):
    p = signed_of(growth_eq)
    assert len(p.terms) == 10
    assert sorted(p.coeffs.values()) == [-1] * 5 + [1] * 5


def test_poly_to_equation_cases():
    assert poly_to_equation(SignedPoly.of([])) is TRIVIAL
    ma = Monomial.of([a])
    assert poly_to_equation(SignedPoly.monomial(ma) - SignedPoly.monomial(ma)) is TRIVIAL
    with pytest.raises(DegenerateEquation):
        poly_to_equation(SignedPoly.monomial(ma, 2))


def test_integer_content_divided():
    p = SignedPoly.of({Monomial.of([a]): 2, Monomial.of([b]): -2})
    assert poly_to_equation(p) == eq([[a]], [[b]])


def test_shape_examples(growth_eq):
    assert str(shape(C0["1.2"])) == "(3,2)<->(3,2)"
    assert shape(C0["1.2"]).norm == 10
    s = shape(growth_eq)
    assert (s.left_degrees, s.right_degrees, s.norm) == ((7, 7, 7, 6, 6), (7, 7, 7, 6, 6), 66)
    assert shape(eq([[a]], [[b]])).norm == 2


def test_equivalent_examples():
    e = C0["1.2"]
    permuted = Equation(tuple(reversed(e.left)), tuple(reversed(e.right)))
    assert equivalent(e, permuted)
    assert not equivalent(C0["1.2"], C0["1.3"])
    assert equivalent(C0["1.5"], C0["1.5"].swapped())


def test_monomial_unit_and_division():
    m = Monomial.of([a, a, b])
    assert m / Monomial.of([a]) == Monomial.of([a, b])
    assert Monomial.of([a]).divides(m)
    assert not Monomial.of([c]).divides(m)
    assert str(UNIT) == "1"
    assert str(m) == "|zeta(s_1^1)|^2*|Gamma(s_2^1)|"


def test_monomial_gcd_of_many():
    ms = [Monomial.of([a, b, c]), Monomial.of([a, c, c]), Monomial.of([c, a, d])]
    assert monomial_gcd(ms) == Monomial.of([a, c])


@given(monomials, monomials)
def test_monomial_laws(m, n):
    assert m.gcd(m) == m
    assert (m * n) / n == m
    assert (m * n).degree == m.degree + n.degree
    assert m.gcd(n).divides(m) and m.gcd(n).divides(n)


@given(equations())
def test_canon_idempotent_and_round_trip(e):
    try:
        c = canon(e)
    except DegenerateEquation:
        return
    if c is TRIVIAL:
        return
    assert canon(c) == c
    assert poly_to_equation(signed_of(e)) == c


@given(equations(), positive_values)
def test_signed_poly_evaluates_side_difference(e, v):
    def side(ms):
        return sum(math.prod(v[x] for x in m.expanded()) for m in ms)

    expected = side(e.left) - side(e.right)
    assert signed_of(e).evaluate(v) == pytest.approx(expected, rel=1e-12, abs=1e-9)


@settings(max_examples=200)
@given(equations(), positive_values)
def test_residual_invariant_under_canon(e, v):
    try:
        c = canon(e)
    except DegenerateEquation:
        return
    assume(c is not TRIVIAL)
    # cancelling shared terms and dividing by a positive factor keeps the zero set
    r, rc = residual(e, v), residual(c, v)
    assert (abs(r) < 1e-12) == (abs(rc) < 1e-12) or abs(r - rc) < 1e-9


def test_residual_invariant_on_cell_equations():
    v = {x: 1.0 + 0.1 * i for i, x in enumerate(sorted(C0.atoms(), key=lambda t: t.key))}
    for _, e in C0:
        swapped = e.swapped()
        assert abs(abs(residual(swapped, v)) - abs(residual(canon(swapped), v))) <= 1e-12


def test_parse_equation_is_not_canonicalised():
    e = parse_equation("|Gamma(s_2^1)| = |zeta(s_1^1)|")
    assert e.left == (Monomial.of([b]),)
    assert canon(e).left == (Monomial.of([a]),)
