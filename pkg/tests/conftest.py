from __future__ import annotations

import pytest
from hypothesis import strategies as st

from metacell import Monomial, c0, growth
from metacell.algebra import Atom, Func, signed_of

C0 = c0()
C0_ATOMS = sorted(C0.atoms(), key=lambda a: a.key)


@pytest.fixture(scope="session")
def cell():
    return C0


@pytest.fixture(scope="session")
def growth_eq():
    return growth()


def atom(name: str, scale: int, sub: int, sup: int) -> Atom:
    return Atom(Func.from_label(name), scale, sub, sup)


atoms = st.sampled_from(C0_ATOMS)
monomials = st.lists(atoms, min_size=1, max_size=4).map(Monomial.of)
sides = st.lists(monomials, min_size=1, max_size=3)


@st.composite
def equations(draw):
    from metacell.algebra import Equation

    return Equation(tuple(draw(sides)), tuple(draw(sides)))


positive_values = st.lists(st.floats(0.25, 4.0), min_size=len(C0_ATOMS), max_size=len(C0_ATOMS)).map(
    lambda xs: dict(zip(C0_ATOMS, xs))
)


def growth_mutant():
    """The growth equation with |zeta(s_1^1)| deleted from its first left term."""
    from metacell.algebra import Equation

    g = growth()
    zeta = atom("zeta", 1, 1, 1)
    first = g.left[0] / Monomial.of([zeta])
    return Equation((first,) + g.left[1:], g.right, "growth-mutant")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.summary_line(n))
