"""Expression ASTs and a parser for user-defined scalar fields on R^n.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?       # exponent must fold to a constant
    atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

Identifiers ``x1`` .. ``xn`` are coordinates, ``r`` is the distance to the
origin, ``sqrt exp log sin cos`` are functions, and any other identifier is
a named parameter bound at evaluation time.  Power exponents are restricted
to constant subexpressions so derivative propagation stays closed-form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

FUNCTIONS = ("sqrt", "exp", "log", "sin", "cos")

_COORD_RE = re.compile(r"^x([0-9]+)$")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Coord(Expr):
    index: int  # 1-based


@dataclass(frozen=True)
class Radial(Expr):
    pass


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: float


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}",
                             len(text) - len(stripped))
        if m.lastgroup is None:  # pure whitespace tail
            break
        start = m.start(m.lastgroup)
        tokens.append(_Token(m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.advance()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {tok.text or 'end of input'!r}",
                             tok.pos)

    def parse(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            caret = self.advance()
            exp_node = self.unary()
            exponent = const_fold(exp_node)
            if exponent is None:
                raise ParseError("power exponent must be a constant", caret.pos)
            return Pow(base, exponent)
        return base

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if tok.kind == "ident":
            return self.ident(tok)
        raise ParseError(f"expected a value, found {tok.text or 'end of input'!r}",
                         tok.pos)

    def ident(self, tok: _Token) -> Expr:
        name = tok.text
        is_call = self.peek().kind == "op" and self.peek().text == "("
        if is_call:
            if name not in FUNCTIONS:
                raise ParseError(f"unknown function {name!r}", tok.pos)
            self.advance()
            arg = self.expr()
            self.expect_op(")")
            return Call(name, arg)
        if name in FUNCTIONS:
            raise ParseError(f"function name {name!r} used without arguments",
                             tok.pos)
        m = _COORD_RE.match(name)
        if m is not None:
            index = int(m.group(1))
            if not 1 <= index <= self.n:
                raise ParseError(
                    f"coordinate {name!r} out of range for dimension {self.n}",
                    tok.pos)
            return Coord(index)
        if name == "r":
            return Radial()
        return Param(name)


def parse(text: str, n: int) -> Expr:
    """Parse ``text`` as an expression over R^n."""
    if n < 1:
        raise ParseError(f"dimension must be >= 1, got {n}", 0)
    return _Parser(text, n).parse()


def const_fold(node: Expr) -> float | None:
    """Value of a constant subexpression, or None if it involves variables."""
    import math

    match node:
        case Num(v):
            return v
        case Neg(a):
            v = const_fold(a)
            return None if v is None else -v
        case Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b):
            va, vb = const_fold(a), const_fold(b)
            if va is None or vb is None:
                return None
            if isinstance(node, Add):
                return va + vb
            if isinstance(node, Sub):
                return va - vb
            if isinstance(node, Mul):
                return va * vb
            return va / vb
        case Pow(a, e):
            va = const_fold(a)
            return None if va is None else va ** e
        case Call(fn, a):
            va = const_fold(a)
            if va is None:
                return None
            return getattr(math, fn)(va)
        case _:
            return None


def param_names(node: Expr) -> tuple[str, ...]:
    """Sorted names of the free parameters of an expression."""
    names: set[str] = set()

    def walk(e: Expr) -> None:
        match e:
            case Param(name):
                names.add(name)
            case Neg(a) | Call(_, a):
                walk(a)
            case Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b):
                walk(a)
                walk(b)
            case Pow(a, _):
                walk(a)

    walk(node)
    return tuple(sorted(names))


_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(node: Expr) -> str:
    """Render an expression; ``parse(to_text(e), n)`` reproduces ``e``."""
    text, _ = _render(node)
    return text


def _render(node: Expr) -> tuple[str, int]:
    def wrap(child: Expr, minimum: int) -> str:
        text, prec = _render(child)
        return f"({text})" if prec < minimum else text

    match node:
        case Num(v):
            if v < 0:  # negative literal behaves like a unary minus
                return _fmt_number(v), _PREC_UNARY
            return _fmt_number(v), _PREC_ATOM
        case Coord(i):
            return f"x{i}", _PREC_ATOM
        case Radial():
            return "r", _PREC_ATOM
        case Param(name):
            return name, _PREC_ATOM
        case Neg(a):
            return f"-{wrap(a, _PREC_UNARY)}", _PREC_UNARY
        case Call(fn, a):
            text, _ = _render(a)
            return f"{fn}({text})", _PREC_ATOM
        case Add(a, b):
            return f"{wrap(a, _PREC_ADD)} + {wrap(b, _PREC_ADD + 1)}", _PREC_ADD
        case Sub(a, b):
            return f"{wrap(a, _PREC_ADD)} - {wrap(b, _PREC_ADD + 1)}", _PREC_ADD
        case Mul(a, b):
            return f"{wrap(a, _PREC_MUL)}*{wrap(b, _PREC_MUL + 1)}", _PREC_MUL
        case Div(a, b):
            return f"{wrap(a, _PREC_MUL)}/{wrap(b, _PREC_MUL + 1)}", _PREC_MUL
        case Pow(a, e):
            exp_text = _fmt_number(e)
            if e < 0:
                exp_text = f"({exp_text})"
            return f"{wrap(a, _PREC_ATOM)}^{exp_text}", _PREC_POW
    raise TypeError(f"not an expression node: {node!r}")
