"""Tokenizer and recursive-descent parser for the element grammar.

The grammar is shared by commutative polynomials and crossed-product
elements::

    expr   := ['-'|'+'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ['^' INT]
    atom   := NUMBER | NAME | '(' expr ')'

``NUMBER`` is an integer or a fraction literal ``a/b``.  The parser builds a
small tree which the caller evaluates in its own ring, so the product order
written by the user is preserved for noncommutative evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, TypeVar, Union

T = TypeVar("T")


class ParseError(ValueError):
    """Malformed expression; ``str()`` carries a caret under the offending column."""

    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.bare_message = message
        super().__init__(f"{message} at column {pos + 1}\n  {text}\n  {' ' * pos}^")


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))"
)


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Name:
    name: str
    pos: int


@dataclass(frozen=True)
class Sum:
    terms: tuple  # of (sign, node)


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


Node = Union[Num, Name, Sum, Product, Power]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def expr(self) -> Node:
        terms = []
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        terms.append((sign, self.term()))
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                terms.append((-1 if val == "-" else 1, self.term()))
            else:
                break
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms))

    def term(self) -> Node:
        factors = [self.factor()]
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, _ = tok = self.take()
            if kind != "num" or "/" in val:
                self.fail("exponent must be a nonnegative integer", tok)
            return Power(base, int(val))
        return base

    def atom(self) -> Node:
        kind, val, pos = tok = self.take()
        if kind == "num":
            num, _, den = val.partition("/")
            if den and int(den) == 0:
                self.fail("zero denominator", tok)
            return Num(Fraction(int(num), int(den) if den else 1))
        if kind == "name":
            return Name(val, pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            if not (self.peek()[0] == "op" and self.peek()[1] == ")"):
                self.fail("expected ')'")
            self.take()
            return inner
        if kind == "end":
            self.fail("unexpected end of expression", tok)
        self.fail(f"unexpected token {val!r}", tok)


def parse(text: str) -> Node:
    if not text.strip():
        raise ParseError("empty expression", text, 0)
    p = _Parser(text)
    node = p.expr()
    if p.peek()[0] != "end":
        p.fail(f"unexpected token {p.peek()[1]!r}")
    return node


def evaluate(
    node: Node,
    *,
    number: Callable[[Fraction], T],
    name: Callable[[str, int], T],
    add: Callable[[T, T], T],
    neg: Callable[[T], T],
    mul: Callable[[T, T], T],
    one: T,
) -> T:
    """Fold a parse tree into a ring using the supplied operations."""

    def ev(n):
        if isinstance(n, Num):
            return number(n.value)
        if isinstance(n, Name):
            return name(n.name, n.pos)
        if isinstance(n, Sum):
            acc = None
            for sign, t in n.terms:
                v = ev(t)
                if sign < 0:
                    v = neg(v)
                acc = v if acc is None else add(acc, v)
            return acc
        if isinstance(n, Product):
            acc = ev(n.factors[0])
            for f in n.factors[1:]:
                acc = mul(acc, ev(f))
            return acc
        if isinstance(n, Power):
            base = ev(n.base)
            acc = one
            for _ in range(n.exponent):
                acc = mul(acc, base)
            return acc
        raise TypeError(n)

    return ev(node)


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_terms(terms: list[tuple[Fraction, list[str]]]) -> str:
    """Join ``(coefficient, factor names)`` pairs into canonical text."""
    if not terms:
        return "0"
    out = []
    for k, (c, factors) in enumerate(terms):
        neg = c < 0
        a = -c if neg else c
        if not factors:
            body = format_rational(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = format_rational(a) + "*" + "*".join(factors)
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def power_factor(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"
