"""Term algebra and verification engine for cells of meta-functional equations."""
from .algebra import (
    TRIVIAL,
    Atom,
    DegenerateEquation,
    Equation,
    Func,
    Monomial,
    Shape,
    SignedPoly,
    Trivial,
    canon,
    equivalent,
    poly_to_equation,
    shape,
    signed_of,
)
from .cells import Cell, c0, contains, foursome, growth, shift
from .crossbreed import (
    Classification,
    NonlinearOccurrence,
    NotCommonFactor,
    closure,
    common_factors,
    eliminate,
    raw_eliminate,
)
from .dsl.parser import format_equation, parse_equation, parse_monomial

__version__ = "0.1.0"
