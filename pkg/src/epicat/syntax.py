"""Formula ASTs, the concrete text syntax, parser and printer.

Concrete syntax::

    top  bot  p          constants and atoms
    #a   @x              nominal, conominal        (hybrid dialects only)
    f & g   f | g        meet binds tighter than join, both left-associative
    [i]f                 box of agent i
    C(f)                 common knowledge           (C dialects only)
    f |- g               sequent
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import DialectError, ParseError


class Dialect(enum.Enum):
    L = "L"
    LC = "LC"
    LH = "LH"
    LCH = "LCH"

    @property
    def common(self) -> bool:
        return "C" in self.value[1:]

    @property
    def hybrid(self) -> bool:
        return "H" in self.value


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Nominal:
    name: str


@dataclass(frozen=True)
class Conominal:
    name: str


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Box:
    agent: str
    sub: "Formula"


@dataclass(frozen=True)
class Common:
    sub: "Formula"


Formula = Union[Top, Bot, Atom, Nominal, Conominal, And, Or, Box, Common]

TOP = Top()
BOT = Bot()


@dataclass(frozen=True)
class Sequent:
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return f"{print_formula(self.lhs)} |- {print_formula(self.rhs)}"


def conj(fs: Iterable[Formula]) -> Formula:
    """Left-nested meet of ``fs``; the empty meet is top."""
    out = None
    for f in fs:
        out = f if out is None else And(out, f)
    return TOP if out is None else out


def boxes(seq: Iterable[str], f: Formula) -> Formula:
    """``[i1][i2]...[in] f`` for the sequence ``i1 ... in``."""
    for i in reversed(list(seq)):
        f = Box(i, f)
    return f


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, (And, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Box, Common)):
        yield from subformulas(f.sub)


def atoms_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def agents_of(f: Formula) -> set[str]:
    return {g.agent for g in subformulas(f) if isinstance(g, Box)}


def depth(f: Formula) -> int:
    if isinstance(f, (And, Or)):
        return 1 + max(depth(f.left), depth(f.right))
    if isinstance(f, (Box, Common)):
        return 1 + depth(f.sub)
    return 0


def required_dialect(f: Formula) -> Dialect:
    nodes = list(subformulas(f))
    c = any(isinstance(g, Common) for g in nodes)
    h = any(isinstance(g, (Nominal, Conominal)) for g in nodes)
    return {(False, False): Dialect.L, (True, False): Dialect.LC,
            (False, True): Dialect.LH, (True, True): Dialect.LCH}[(c, h)]


def substitute(f: Formula, mapping: dict[str, Formula]) -> Formula:
    """Uniform substitution of formulas for atoms."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, And):
        return And(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Or):
        return Or(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Box):
        return Box(f.agent, substitute(f.sub, mapping))
    if isinstance(f, Common):
        return Common(substitute(f.sub, mapping))
    return f


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<turnstile>\|-)
  | (?P<and>&)
  | (?P<or>\|)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<box>\[\s*(?P<agent>[A-Za-z0-9_][A-Za-z0-9_']*)\s*\])
  | (?P<nominal>\#(?P<nom>[A-Za-z_][A-Za-z0-9_']*))
  | (?P<conominal>@(?P<cnom>[A-Za-z_][A-Za-z0-9_']*))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

RESERVED = {"top", "bot", "C"}


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "agent":
            kind = "box"
        elif kind == "nom":
            kind = "nominal"
        elif kind == "cnom":
            kind = "conominal"
        if kind != "ws":
            value = m.group("agent") or m.group("nom") or m.group("cnom") or m.group(0)
            toks.append(_Tok(kind, value, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, dialect: Dialect, agents: frozenset[str] | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.dialect = dialect
        self.agents = agents

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            found = "end of input" if t.kind == "eof" else repr(t.value)
            raise ParseError(f"expected {what}, found {found}", t.pos)
        return self.take()

    def formula(self) -> Formula:
        f = self.conj()
        while self.peek().kind == "or":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "and":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        t = self.peek()
        if t.kind == "box":
            self.take()
            if self.agents is not None and t.value not in self.agents:
                raise ParseError(f"unknown agent {t.value!r}", t.pos)
            return Box(t.value, self.unary())
        if t.kind == "lparen":
            self.take()
            f = self.formula()
            if self.peek().kind != "rparen":
                raise ParseError("unbalanced parenthesis: missing ')'", t.pos)
            self.take()
            return f
        if t.kind == "nominal" or t.kind == "conominal":
            if not self.dialect.hybrid:
                raise DialectError(f"{t.kind} {t.value!r} requires a hybrid dialect (LH or LCH)", t.pos)
            self.take()
            return Nominal(t.value) if t.kind == "nominal" else Conominal(t.value)
        if t.kind == "ident":
            self.take()
            if t.value == "top":
                return TOP
            if t.value == "bot":
                return BOT
            if t.value == "C":
                if not self.dialect.common:
                    raise DialectError("C(...) requires a common-knowledge dialect (LC or LCH)", t.pos)
                lp = self.expect("lparen", "'(' after C")
                f = self.formula()
                if self.peek().kind != "rparen":
                    raise ParseError("unbalanced parenthesis: missing ')'", lp.pos)
                self.take()
                return Common(f)
            if self.agents is not None and t.value in self.agents:
                raise ParseError(f"{t.value!r} is an agent name, not an atom", t.pos)
            return Atom(t.value)
        if t.kind == "rparen":
            raise ParseError("unbalanced parenthesis: unexpected ')'", t.pos)
        found = "end of input" if t.kind == "eof" else repr(t.value)
        raise ParseError(f"expected a formula, found {found}", t.pos)


def _as_dialect(dialect: Dialect | str) -> Dialect:
    return dialect if isinstance(dialect, Dialect) else Dialect(dialect.upper())


def parse_formula(text: str, dialect: Dialect | str = Dialect.LCH,
                  agents: Iterable[str] | None = None) -> Formula:
    """Parse ``text`` as a formula of ``dialect``.

    If ``agents`` is given, boxes naming other agents are rejected and atoms
    may not reuse an agent name.
    """
    p = _Parser(text, _as_dialect(dialect), None if agents is None else frozenset(agents))
    f = p.formula()
    t = p.peek()
    if t.kind == "rparen":
        raise ParseError("unbalanced parenthesis: unexpected ')'", t.pos)
    if t.kind != "eof":
        raise ParseError(f"unexpected {t.value!r} after formula", t.pos)
    return f


def parse_sequent(text: str, dialect: Dialect | str = Dialect.LCH,
                  agents: Iterable[str] | None = None) -> Sequent:
    d = _as_dialect(dialect)
    ag = None if agents is None else frozenset(agents)
    p = _Parser(text, d, ag)
    lhs = p.formula()
    p.expect("turnstile", "'|-'")
    if p.peek().kind == "eof":
        raise ParseError("missing right-hand side of sequent", p.peek().pos)
    rhs = p.formula()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError(f"unexpected {t.value!r} after sequent", t.pos)
    return Sequent(lhs, rhs)


def parse_sequent_lines(text: str, dialect: Dialect | str = Dialect.LCH,
                        agents: Iterable[str] | None = None) -> list[tuple[int, Sequent]]:
    """Parse a ``.seq`` file body into ``(line_number, sequent)`` pairs.

    Blank lines and lines whose first character is ``#`` are skipped; a
    sequent starting with a nominal must therefore be indented or
    parenthesised.
    """
    out = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            out.append((n, parse_sequent(line, dialect, agents)))
        except ParseError as e:
            raise type(e)(e.message, e.position, line=n) from None
    return out


# ---------------------------------------------------------------- printer

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def _prec(f: Formula) -> int:
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    return _PREC_UNARY


def _render(f: Formula, need: int) -> str:
    if isinstance(f, Top):
        s = "top"
    elif isinstance(f, Bot):
        s = "bot"
    elif isinstance(f, Atom):
        s = f.name
    elif isinstance(f, Nominal):
        s = "#" + f.name
    elif isinstance(f, Conominal):
        s = "@" + f.name
    elif isinstance(f, (And, Or)):
        p = _prec(f)
        op = " & " if isinstance(f, And) else " | "
        # left-associative: a right operand of equal precedence needs parentheses
        s = _render(f.left, p) + op + _render(f.right, p + 1)
    elif isinstance(f, Box):
        s = f"[{f.agent}]" + _render(f.sub, _PREC_UNARY)
    elif isinstance(f, Common):
        s = "C(" + _render(f.sub, 0) + ")"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if _prec(f) < need else s


def print_formula(f: Formula) -> str:
    return _render(f, 0)
