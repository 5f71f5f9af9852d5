"""Exact arithmetic in the base domain: rationals, Q[x1..xm] and Q[x]/(f).

Rationals are :class:`fractions.Fraction`.  Polynomials are immutable
:class:`CommPoly` values keyed by exponent tuples.  A :class:`BaseDomain`
bundles variable names with an optional single-relation quotient and is what
the crossed-product engine calls for every coefficient operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from . import _parse

__all__ = [
    "BOTTOM",
    "BaseDomain",
    "CommPoly",
    "DerivationSpec",
    "QuotientPresentation",
    "add",
    "apply_derivation",
    "mul",
    "reduce",
    "total_degree",
]


class _Bottom:
    """Degree of the zero polynomial: below every integer, absorbing under +."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "-inf"

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self

    def __hash__(self):
        return hash("crossprod.BOTTOM")


BOTTOM = _Bottom()


def _grlex_key(exp):
    return (sum(exp), exp)


class CommPoly:
    """Polynomial with rational coefficients in ``nvars`` commuting variables."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[tuple, object]] = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} does not have {nvars} entries")
                if c:
                    clean[tuple(exp)] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # terms already clean: tuple keys, nonzero Fraction values
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars, c):
        c = Fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars):
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars, k, power=1):
        exp = [0] * nvars
        exp[k] = power
        return cls._raw(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exp, c=1):
        c = Fraction(c)
        return cls._raw(len(exp), {tuple(exp): c} if c else {})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, CommPoly):
            other = CommPoly.const(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s += c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return CommPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return CommPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, CommPoly):
            other = CommPoly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return CommPoly.zero(self.nvars)
        return CommPoly._raw(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, CommPoly):
            return self.scale(other)
        self._check(other)
        if not self.terms or not other.terms:
            return CommPoly.zero(self.nvars)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return CommPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, CommPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == CommPoly.const(self.nvars, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self):
        """Terms in graded-lex descending order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def total_degree(self):
        return total_degree(self)

    def degree_in(self, k):
        if not self.terms:
            return BOTTOM
        return max(e[k] for e in self.terms)

    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        rows = []
        for exp, c in self.sorted_terms():
            rows.append((c, [_parse.power_factor(names[i], k) for i, k in enumerate(exp) if k]))
        return _parse.format_terms(rows)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"CommPoly({self.to_str()!r})"


@dataclass(frozen=True)
class QuotientPresentation:
    """Single relation, monic of degree ``leading_exponent`` in one variable."""

    relation: CommPoly
    eliminated_variable: int
    leading_exponent: int

    def __post_init__(self):
        v, e = self.eliminated_variable, self.leading_exponent
        if e < 1:
            raise ValueError("leading exponent must be positive")
        if not 0 <= v < self.relation.nvars:
            raise ValueError("eliminated variable out of range")
        top = [(exp, c) for exp, c in self.relation.terms.items() if exp[v] >= e]
        lead = tuple(e if i == v else 0 for i in range(self.relation.nvars))
        if top != [(lead, Fraction(1))]:
            raise ValueError(
                f"relation must be monic of degree {e} in variable {v + 1} "
                "with no other terms of that degree"
            )

    @property
    def tail(self) -> CommPoly:
        """The lower-order side of the rewrite rule ``x_v^e -> tail``."""
        lead = CommPoly.var(self.relation.nvars, self.eliminated_variable, self.leading_exponent)
        return lead - self.relation


@dataclass(frozen=True)
class DerivationSpec:
    """Images of the base variables; extended to all of A by the Leibniz rule."""

    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if self.images:
            n = self.images[0].nvars
            if len(self.images) != n or any(im.nvars != n for im in self.images):
                raise ValueError("derivation needs exactly one image per base variable")

    def __call__(self, p: CommPoly) -> CommPoly:
        return apply_derivation(self, p)

    def is_zero(self):
        return all(im.is_zero() for im in self.images)


def add(p: CommPoly, q: CommPoly) -> CommPoly:
    return p + q


def reduce(p: CommPoly, quotient: QuotientPresentation) -> CommPoly:
    v, e = quotient.eliminated_variable, quotient.leading_exponent
    if all(exp[v] < e for exp in p.terms):
        return p
    tail = quotient.tail
    out: dict = {}
    work = list(p.terms.items())
    while work:
        exp, c = work.pop()
        if exp[v] < e:
            s = out.get(exp)
            out[exp] = c if s is None else s + c
            continue
        rest = exp[:v] + (exp[v] - e,) + exp[v + 1:]
        for texp, tc in tail.terms.items():
            work.append((tuple(a + b for a, b in zip(rest, texp)), c * tc))
    return CommPoly._raw(p.nvars, {k: c for k, c in out.items() if c})


def mul(p: CommPoly, q: CommPoly, quotient: Optional[QuotientPresentation] = None) -> CommPoly:
    r = p * q
    return reduce(r, quotient) if quotient is not None else r


def apply_derivation(d: DerivationSpec, p: CommPoly) -> CommPoly:
    if p.nvars != len(d.images):
        raise ValueError("derivation and polynomial live in different domains")
    out = CommPoly.zero(p.nvars)
    for exp, c in p.terms.items():
        for k, ek in enumerate(exp):
            if ek == 0 or d.images[k].is_zero():
                continue
            lowered = exp[:k] + (ek - 1,) + exp[k + 1:]
            out = out + CommPoly.monomial(lowered, c * ek) * d.images[k]
    return out


def total_degree(p: CommPoly):
    if not p.terms:
        return BOTTOM
    return max(sum(e) for e in p.terms)


class BaseDomain:
    """The coefficient ring A: named variables plus an optional quotient."""

    def __init__(self, names: Sequence[str], quotient: Optional[QuotientPresentation] = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.nvars = len(self.names)
        self.quotient = quotient
        if quotient is not None and quotient.relation.nvars != self.nvars:
            raise ValueError("relation lives in a different polynomial ring")

    def __eq__(self, other):
        return (
            isinstance(other, BaseDomain)
            and self.names == other.names
            and self.quotient == other.quotient
        )

    def __hash__(self):
        return hash((self.names, self.quotient))

    def __repr__(self):
        rel = f", relation={self.format(self.quotient.relation)}" if self.quotient else ""
        return f"BaseDomain({list(self.names)}{rel})"

    @property
    def zero(self):
        return CommPoly.zero(self.nvars)

    @property
    def one(self):
        return CommPoly.one(self.nvars)

    def const(self, c):
        return CommPoly.const(self.nvars, c)

    def var(self, k):
        return self.reduce(CommPoly.var(self.nvars, k))

    def reduce(self, p: CommPoly) -> CommPoly:
        return reduce(p, self.quotient) if self.quotient is not None else p

    def mul(self, p: CommPoly, q: CommPoly) -> CommPoly:
        return mul(p, q, self.quotient)

    def is_reduced_exponent(self, exp) -> bool:
        q = self.quotient
        return q is None or exp[q.eliminated_variable] < q.leading_exponent

    def variable_index(self, name: str) -> Optional[int]:
        if name in self.names:
            return self.names.index(name)
        if name.startswith("x") and name[1:].isdigit():
            k = int(name[1:]) - 1
            if 0 <= k < self.nvars and name not in self.names:
                return k
        return None

    def parse(self, text: str) -> CommPoly:
        tree = _parse.parse(text)

        def name(nm, pos):
            k = self.variable_index(nm)
            if k is None:
                raise _parse.ParseError(f"unknown variable {nm!r}", text, pos)
            return self.var(k)

        return _parse.evaluate(
            tree,
            number=self.const,
            name=name,
            add=lambda a, b: a + b,
            neg=lambda a: -a,
            mul=self.mul,
            one=self.one,
        )

    def format(self, p: CommPoly) -> str:
        return p.to_str(self.names)

    def derivation(self, images: Iterable) -> DerivationSpec:
        ims = [self.parse(im) if isinstance(im, str) else im for im in images]
        return DerivationSpec(tuple(ims))


def polynomial_ring(nvars: int, names: Optional[Sequence[str]] = None) -> BaseDomain:
    return BaseDomain(names or [f"x{i + 1}" for i in range(nvars)])
