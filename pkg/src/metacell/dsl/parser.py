"""Recursive-descent parser and printer for the equation DSL.

Grammar::

    equation := sum "=" sum
    sum      := product ("+" product)*
    product  := "1" | factor ("*" factor)*
    factor   := "|" name "(" [int "*"] "s_" int "^" int ["," param] ")" "|" ["^" int]

``name`` is one of zeta, Gamma, cn, Jp; cn takes the parameter ``k``, the
others take none. Whitespace is insignificant and ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from ..algebra import AlgebraError, Atom, Equation, Func, Monomial


class DslError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DslSyntaxError(DslError):
    def __init__(self, message, line=1, column=1, expected: Iterable[str] = ()):
        self.expected = frozenset(expected)
        if self.expected:
            message = f"{message}; expected one of {', '.join(sorted(self.expected))}"
        super().__init__(message, line, column)


class DslSemanticError(DslError):
    pass


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>\#[^\n]*)|(?P<nl>\n)|(?P<int>\d+)|(?P<name>[A-Za-z]+)"
    r"|(?P<op>[|()*+=^,_:])|(?P<bad>.)"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", an operator character, or "eof"
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    tokens = []
    col0 = 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - col0 + 1
        if kind == "nl":
            line += 1
            col0 = m.end()
        elif kind in ("ws", "comment"):
            pass
        elif kind == "bad":
            raise DslSyntaxError(f"unexpected character {m.group()!r}", line, col)
        elif kind == "op":
            tokens.append(Token(m.group(), m.group(), line, col))
        else:
            tokens.append(Token(kind, m.group(), line, col))
    tokens.append(Token("eof", "", line, len(text) - col0 + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, line: int = 1, bare_factors: bool = False):
        self.tokens = tokenize(text, line)
        self.pos = 0
        self.bare = bare_factors

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, expected: Iterable[str]):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise DslSyntaxError(f"unexpected {found}", t.line, t.column, expected)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            self.fail([text or kind])
        self.pos += 1
        return t

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            self.pos += 1
            return self.tokens[self.pos - 1]
        return None

    def integer(self) -> int:
        t = self.expect("int")
        value = int(t.text)
        if value < 1:
            raise DslSemanticError("integers must be >= 1", t.line, t.column)
        return value

    def equation(self) -> Equation:
        left = self.sum()
        self.expect("=")
        right = self.sum()
        self.expect("eof")
        return Equation(tuple(left), tuple(right))

    def sum(self) -> list[Monomial]:
        terms = [self.product()]
        while self.accept("+"):
            terms.append(self.product())
        return terms

    def product(self) -> Monomial:
        t = self.tok
        if t.kind == "int":
            if t.text != "1":
                raise DslSemanticError("only the unit term 1 may appear as a bare number", t.line, t.column)
            self.pos += 1
            return Monomial()
        atoms = self.factor()
        while self.accept("*"):
            atoms += self.factor()
        return Monomial.of(atoms)

    def factor(self) -> list[Atom]:
        barred = self.accept("|") is not None
        if not barred and not self.bare:
            self.fail(["|"])
        name = self.tok
        if name.kind != "name":
            self.fail(["zeta", "Gamma", "cn", "Jp"])
        try:
            func = Func.from_label(name.text)
        except KeyError:
            raise DslSemanticError(f"unknown function {name.text!r}", name.line, name.column) from None
        self.pos += 1
        self.expect("(")
        scale = 1
        if self.tok.kind == "int":
            st = self.tok
            scale = self.integer()
            if scale == 1:
                raise DslSemanticError("scale prefix 1* must be omitted", st.line, st.column)
            self.expect("*")
        self.expect("name", "s")
        self.expect("_")
        sub_tok = self.tok
        sub = self.integer()
        self.expect("^")
        sup = self.integer()
        param = None
        if self.accept(","):
            pt = self.expect("name")
            param = pt.text
            if func is not Func.CN or param != "k":
                raise DslSemanticError(f"{func.label} does not take parameter {param!r}", pt.line, pt.column)
        elif func is Func.CN:
            raise DslSemanticError("cn requires the parameter k", self.tok.line, self.tok.column)
        self.expect(")")
        if barred:
            self.expect("|")
        power = 1
        if self.accept("^"):
            power = self.integer()
        try:
            atom = Atom(func, scale, sub, sup)
        except AlgebraError as exc:
            raise DslSemanticError(str(exc), sub_tok.line, sub_tok.column) from None
        return [atom] * power


def parse_equation(text: str, line: int = 1) -> Equation:
    """Parse one equation. The result is not canonicalised."""
    return _Parser(text, line).equation()


def parse_monomial(text: str) -> Monomial:
    """Parse a product; the enclosing bars may be omitted (``zeta(s_1^1)``)."""
    p = _Parser(text, bare_factors=True)
    mono = p.product()
    p.expect("eof")
    return mono


def parse_atom(text: str) -> Atom:
    mono = parse_monomial(text)
    if mono.degree != 1:
        raise DslSemanticError(f"expected a single atom, got {mono}")
    return next(iter(mono.counts))


def format_atom(atom: Atom) -> str:
    return str(atom)


def format_monomial(mono: Monomial) -> str:
    return str(mono)


def format_equation(eq: Equation) -> str:
    return str(eq)


_CELL_LINE = re.compile(r"^\s*(?P<id>[A-Za-z0-9._-]+)\s*:(?P<body>.*)$")


def parse_cell_text(text: str) -> tuple[list[tuple[str, Equation]], list[str]]:
    """Parse ``id : equation`` lines. Returns the entries and the header comments."""
    entries: list[tuple[str, Equation]] = []
    header: list[str] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            if stripped and not entries:
                header.append(stripped[1:].strip())
            continue
        m = _CELL_LINE.match(raw)
        if not m:
            raise DslSyntaxError("expected 'id : equation'", lineno, 1, ["id"])
        cid = m.group("id")
        if cid in seen:
            raise DslSemanticError(f"duplicate id {cid!r}", lineno, 1)
        seen.add(cid)
        body_col = m.start("body")
        eq = _Parser(" " * body_col + m.group("body"), lineno).equation()
        entries.append((cid, eq.with_id(cid)))
    return entries, header


def format_cell_text(entries: Iterable[tuple[str, Equation]], header: Iterable[str] = ()) -> str:
    lines = [f"# {h}" if h else "#" for h in header]
    lines += [f"{cid} : {format_equation(eq)}" for cid, eq in entries]
    return "\n".join(lines) + "\n"
