"""Crossed products A * U(g): presentations, PBW normal forms and multiplication.

Elements are stored as ``{pbw exponent tuple: CommPoly}`` with the base
coefficient written to the left of the ordered monomial ``g1^j1 ... gn^jn``.
Multiplication goes through memoised left multiplication by single
generators, which uses

* ``g r = r g + delta_g(r)`` to move a generator past a coefficient, and
* ``g_i g_j = g_j g_i + [g_i, g_j]`` (``i > j``) to sort generators,

where ``[g_i, g_j]`` is the linear bracket plus the cocycle term in A.  An
independent string-rewriting implementation (:func:`normal_form` with the
``leftmost``/``rightmost`` strategies) applies the same rules to letter words
and is used to cross-check the fast path.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from . import _parse
from .coefficients import (
    BOTTOM,
    BaseDomain,
    CommPoly,
    DerivationSpec,
    QuotientPresentation,
    apply_derivation,
)
from .semigroup import OrderRule, order_key

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class LiePresentation:
    """Brackets ``[g_i, g_j] = sum c^k g_k + a_ij`` for ``i < j`` (0-based)."""

    generator_names: tuple
    structure_constants: dict = field(default_factory=dict)  # (i, j) -> ((k, Fraction), ...)
    cocycles: dict = field(default_factory=dict)  # (i, j) -> CommPoly

    def __post_init__(self):
        n = len(self.generator_names)
        object.__setattr__(self, "generator_names", tuple(self.generator_names))
        sc = {}
        for (i, j), entries in self.structure_constants.items():
            if not (0 <= i < j < n):
                raise PresentationError(f"bracket index ({i + 1}, {j + 1}) must satisfy i < j <= {n}")
            acc: dict = {}
            for k, c in entries:
                if not 0 <= k < n:
                    raise PresentationError(f"bracket target g{k + 1} out of range")
                acc[k] = acc.get(k, Fraction(0)) + Fraction(c)
            cleaned = tuple(sorted((k, c) for k, c in acc.items() if c))
            if cleaned:
                sc[(i, j)] = cleaned
        object.__setattr__(self, "structure_constants", sc)
        co = {}
        for (i, j), a in self.cocycles.items():
            if not (0 <= i < j < n):
                raise PresentationError(f"cocycle index ({i + 1}, {j + 1}) must satisfy i < j <= {n}")
            if not a.is_zero():
                co[(i, j)] = a
        object.__setattr__(self, "cocycles", co)

    @property
    def n(self):
        return len(self.generator_names)

    def bracket_vector(self, i, j) -> dict:
        """Linear part of [g_i, g_j] as ``{k: c}`` for any ordered pair."""
        if i == j:
            return {}
        if i < j:
            return dict(self.structure_constants.get((i, j), ()))
        return {k: -c for k, c in self.structure_constants.get((j, i), ())}


class Label(NamedTuple):
    """A basis label ``x^coef * g^pbw`` of the crossed product over Q."""

    coef: tuple
    pbw: tuple

    @property
    def degree(self):
        return sum(self.coef) + sum(self.pbw)


def label_sort_key(label: Label):
    return (label.degree, sum(label.pbw), label.pbw, label.coef)


def _acc(out: dict, exp: tuple, poly: CommPoly):
    if poly.is_zero():
        return
    cur = out.get(exp)
    if cur is None:
        out[exp] = poly
    else:
        s = cur + poly
        if s.is_zero():
            del out[exp]
        else:
            out[exp] = s


class _Engine:
    """Memoised multiplication tables for one presentation."""

    def __init__(self, pres: "AlgebraPresentation"):
        self.pres = pres
        self.A = pres.base
        self.n = pres.n
        self.zero_exp = (0,) * self.n
        # brackets[(i, j)] for i > j: [g_i, g_j] as terms
        self.brackets = {}
        lie = pres.lie
        for i in range(self.n):
            for j in range(i):
                terms: dict = {}
                for k, c in lie.structure_constants.get((j, i), ()):
                    _acc(terms, self.unit(k), self.A.const(-c))
                a = lie.cocycles.get((j, i))
                if a is not None:
                    _acc(terms, self.zero_exp, -a)
                self.brackets[(i, j)] = terms
        self._gen_mono: dict = {}
        self._mono_mono: dict = {}
        self._mono_coef: dict = {}

    def unit(self, k):
        return tuple(1 if t == k else 0 for t in range(self.n))

    def derive(self, i, p: CommPoly) -> CommPoly:
        d = self.pres.derivations[i]
        if d.is_zero() or p.is_zero():
            return self.A.zero
        return self.A.reduce(apply_derivation(d, p))

    def gen_mono(self, i: int, beta: tuple) -> dict:
        key = (i, beta)
        hit = self._gen_mono.get(key)
        if hit is not None:
            return hit
        j = next((t for t, b in enumerate(beta) if b), None)
        if j is None or j >= i:
            out = {beta[:i] + (beta[i] + 1,) + beta[i + 1:]: self.A.one}
        else:
            rest = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
            out = self.lmul_gen(j, self.gen_mono(i, rest))
            for kexp, coef in self.brackets[(i, j)].items():
                if kexp == self.zero_exp:
                    _acc(out, rest, coef)
                else:
                    k = kexp.index(1)
                    for e, c in self.gen_mono(k, rest).items():
                        _acc(out, e, self.A.mul(coef, c))
        self._gen_mono[key] = out
        return out

    def lmul_gen(self, i: int, terms: dict) -> dict:
        out: dict = {}
        for gamma, s in terms.items():
            for e, c in self.gen_mono(i, gamma).items():
                _acc(out, e, self.A.mul(s, c))
            _acc(out, gamma, self.derive(i, s))
        return out

    def mono_mono(self, alpha: tuple, beta: tuple) -> dict:
        key = (alpha, beta)
        hit = self._mono_mono.get(key)
        if hit is not None:
            return hit
        f = next((t for t, a in enumerate(alpha) if a), None)
        if f is None:
            out = {beta: self.A.one}
        else:
            rest = alpha[:f] + (alpha[f] - 1,) + alpha[f + 1:]
            out = self.lmul_gen(f, self.mono_mono(rest, beta))
        self._mono_mono[key] = out
        return out

    def mono_coef(self, alpha: tuple, mu: tuple) -> dict:
        """``g^alpha * x^mu`` in normal form."""
        key = (alpha, mu)
        hit = self._mono_coef.get(key)
        if hit is not None:
            return hit
        f = next((t for t, a in enumerate(alpha) if a), None)
        if f is None:
            out = {alpha: self.A.reduce(CommPoly.monomial(mu))}
        else:
            rest = alpha[:f] + (alpha[f] - 1,) + alpha[f + 1:]
            out = self.lmul_gen(f, self.mono_coef(rest, mu))
        self._mono_coef[key] = out
        return out

    def multiply(self, t1: dict, t2: dict) -> dict:
        out: dict = {}
        A = self.A
        for alpha, r in t1.items():
            for beta, s in t2.items():
                for mu, c in s.terms.items():
                    for alpha2, p in self.mono_coef(alpha, mu).items():
                        left = A.mul(r, p.scale(c))
                        for e, q in self.mono_mono(alpha2, beta).items():
                            _acc(out, e, A.mul(left, q))
        return out


class AlgebraPresentation:
    """Base domain + Lie data + one derivation of A per generator.

    Treated as immutable after construction; equality and hashing go through
    the canonical text form.
    """

    def __init__(
        self,
        base: BaseDomain,
        lie: LiePresentation,
        derivations: Optional[Sequence[DerivationSpec]] = None,
        name: str = "",
    ):
        self.base = base
        self.lie = lie
        self.name = name
        n = lie.n
        if derivations is None:
            derivations = [DerivationSpec(tuple(base.zero for _ in range(base.nvars)))
                           for _ in range(n)]
        derivations = tuple(derivations)
        if len(derivations) != n:
            raise PresentationError(f"need {n} derivations, got {len(derivations)}")
        for d in derivations:
            if len(d.images) != base.nvars:
                raise PresentationError("derivation arity does not match the base domain")
        self.derivations = tuple(
            DerivationSpec(tuple(base.reduce(im) for im in d.images)) for d in derivations
        )
        for a in lie.cocycles.values():
            if a.nvars != base.nvars:
                raise PresentationError("cocycle lives outside the base domain")
        clash = set(base.names) & set(lie.generator_names)
        if clash:
            raise PresentationError(f"names used for both variables and generators: {sorted(clash)}")
        self._engine = None
        self._text = None

    @property
    def n(self) -> int:
        return self.lie.n

    @property
    def m(self) -> int:
        return self.base.nvars

    @property
    def engine(self) -> _Engine:
        if self._engine is None:
            self._engine = _Engine(self)
        return self._engine

    # -- construction helpers ---------------------------------------------

    def zero(self) -> "CrossedElement":
        return CrossedElement(self, {})

    def one(self) -> "CrossedElement":
        return self.scalar(1)

    def scalar(self, c) -> "CrossedElement":
        return self.coef(self.base.const(c))

    def coef(self, p: CommPoly) -> "CrossedElement":
        p = self.base.reduce(p)
        return CrossedElement(self, {} if p.is_zero() else {(0,) * self.n: p})

    def gen(self, i: int) -> "CrossedElement":
        e = tuple(1 if k == i else 0 for k in range(self.n))
        return CrossedElement(self, {e: self.base.one})

    def var(self, k: int) -> "CrossedElement":
        return self.coef(self.base.var(k))

    def label_element(self, label: Label) -> "CrossedElement":
        return CrossedElement(self, {label.pbw: self.base.reduce(CommPoly.monomial(label.coef))})

    def generator_index(self, name: str) -> Optional[int]:
        if name in self.lie.generator_names:
            return self.lie.generator_names.index(name)
        if name.startswith("g") and name[1:].isdigit():
            k = int(name[1:]) - 1
            if 0 <= k < self.n and self.base.variable_index(name) is None:
                return k
        return None

    def element(self, text: str) -> "CrossedElement":
        """Parse ``x^2*g1*g2^3 - 2*g1``; products are evaluated in the written order."""
        tree = _parse.parse(text)

        def name(nm, pos):
            k = self.base.variable_index(nm)
            if k is not None:
                return self.var(k)
            i = self.generator_index(nm)
            if i is not None:
                return self.gen(i)
            raise _parse.ParseError(f"unknown symbol {nm!r}", text, pos)

        return _parse.evaluate(
            tree,
            number=self.scalar,
            name=name,
            add=lambda a, b: a + b,
            neg=lambda a: -a,
            mul=lambda a, b: a * b,
            one=self.one(),
        )

    def element_from_word(self, word: Sequence) -> "CrossedElement":
        return normal_form(word, self)

    # -- identity ------------------------------------------------------------

    def to_text(self) -> str:
        return dump_presentation(self)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, AlgebraPresentation) and self.to_text() == other.to_text()

    def __hash__(self):
        return hash(self.to_text())

    def __repr__(self):
        label = self.name or f"{self.m} vars, {self.n} gens"
        return f"AlgebraPresentation({label})"

    def is_commutative_base_only(self) -> bool:
        return self.n == 0


class CrossedElement:
    """An element of B in PBW normal form.  Immutable by convention."""

    __slots__ = ("pres", "terms", "_hash")

    def __init__(self, pres: AlgebraPresentation, terms: dict):
        self.pres = pres
        self.terms = {e: p for e, p in terms.items() if not p.is_zero()}
        self._hash = None

    def _same(self, other):
        if not isinstance(other, CrossedElement):
            return self.pres.scalar(other)
        if other.pres is not self.pres and other.pres != self.pres:
            raise PresentationError("elements belong to different presentations")
        return other

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = self._same(other)
        out = dict(self.terms)
        for e, p in other.terms.items():
            _acc(out, e, p)
        return CrossedElement(self.pres, out)

    __radd__ = __add__

    def __neg__(self):
        return CrossedElement(self.pres, {e: -p for e, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        return CrossedElement(self.pres, {e: p.scale(c) for e, p in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return multiply(self, other, self.pres)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.pres.scalar(other)
        if not isinstance(other, CrossedElement):
            return NotImplemented
        return self.terms == other.terms and (self.pres is other.pres or self.pres == other.pres)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def labels(self) -> dict:
        """``{Label: Fraction}`` expansion over Q."""
        out = {}
        for pbw, p in self.terms.items():
            for mu, c in p.terms.items():
                out[Label(mu, pbw)] = c
        return out

    def generator_support(self) -> set:
        return {k for e in self.terms for k, v in enumerate(e) if v}

    def to_str(self, order: OrderRule = OrderRule.DEGLEX) -> str:
        key = order_key(order)
        gnames = [f"g{i + 1}" for i in range(self.pres.n)]
        rows = []
        for pbw in sorted(self.terms, key=key, reverse=True):
            poly = self.terms[pbw]
            gpart = [_parse.power_factor(gnames[i], k) for i, k in enumerate(pbw) if k]
            for mu, c in poly.sorted_terms():
                xpart = [_parse.power_factor(self.pres.base.names[i], k)
                         for i, k in enumerate(mu) if k]
                rows.append((c, xpart + gpart))
        return _parse.format_terms(rows)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"CrossedElement({self.to_str()!r})"


def multiply(e1: CrossedElement, e2: CrossedElement, pres: Optional[AlgebraPresentation] = None):
    pres = pres or e1.pres
    for e in (e1, e2):
        if e.pres is not pres and e.pres != pres:
            raise PresentationError("presentation mismatch")
    if e1.is_zero() or e2.is_zero():
        return pres.zero()
    return CrossedElement(pres, pres.engine.multiply(e1.terms, e2.terms))


# -- words and the independent rewriting path --------------------------------


@dataclass(frozen=True)
class Gen:
    """A generator symbol inside a word (0-based index)."""

    index: int


@dataclass(frozen=True)
class Var:
    """A base-variable symbol inside a word (0-based index)."""

    index: int


WordItem = Union[Gen, Var, CommPoly, int, Fraction]


def _item_element(item, pres):
    if isinstance(item, Gen):
        if not 0 <= item.index < pres.n:
            raise PresentationError(f"unknown generator g{item.index + 1}")
        return pres.gen(item.index)
    if isinstance(item, Var):
        if not 0 <= item.index < pres.m:
            raise PresentationError(f"unknown variable x{item.index + 1}")
        return pres.var(item.index)
    if isinstance(item, CommPoly):
        return pres.coef(item)
    if isinstance(item, CrossedElement):
        return item
    return pres.scalar(item)


def parse_word(text: str, pres: AlgebraPresentation) -> list:
    """Split ``d*x*d`` into word items without multiplying anything."""
    items = []
    for tok in text.replace(" ", "").split("*"):
        base, _, power = tok.partition("^")
        reps = int(power) if power else 1
        if base.lstrip("-").replace("/", "").isdigit():
            items.extend([Fraction(base)] * reps)
            continue
        k = pres.base.variable_index(base)
        if k is not None:
            items.extend([Var(k)] * reps)
            continue
        i = pres.generator_index(base)
        if i is None:
            raise PresentationError(f"unknown symbol {base!r}")
        items.extend([Gen(i)] * reps)
    return items


def _letters_of_poly(p: CommPoly):
    for mu, c in p.terms.items():
        letters = []
        for k, e in enumerate(mu):
            letters.extend([k] * e)
        yield tuple(letters), c


class _Rewriter:
    """Letter-word rewriting; variables are letters 0..m-1, generators m..m+n-1."""

    def __init__(self, pres: AlgebraPresentation):
        self.pres = pres
        self.m = pres.m
        q = pres.base.quotient
        self.quot = None
        if q is not None:
            self.quot = (q.eliminated_variable, q.leading_exponent,
                         list(_letters_of_poly(q.tail)))
        self.delta = {}
        for i, d in enumerate(pres.derivations):
            for k, im in enumerate(d.images):
                self.delta[(i, k)] = list(_letters_of_poly(im))
        eng = pres.engine
        self.bracket = {}
        for (i, j), terms in eng.brackets.items():
            out = []
            for kexp, poly in terms.items():
                if any(kexp):
                    out.append(((self.m + kexp.index(1),), poly.constant_term()))
                else:
                    out.extend(_letters_of_poly(poly))
            self.bracket[(i, j)] = out

    def redexes(self, w):
        out = []
        for p in range(len(w) - 1):
            if w[p] > w[p + 1]:
                out.append(("swap", p))
        if self.quot is not None:
            v, e, _ = self.quot
            run = 0
            for p, letter in enumerate(w):
                run = run + 1 if letter == v else 0
                if run >= e:
                    out.append(("quot", p - e + 1))
        return out

    def apply(self, w, redex):
        kind, p = redex
        if kind == "quot":
            _, e, tail = self.quot
            return [(w[:p] + t + w[p + e:], c) for t, c in tail]
        u, v = w[p], w[p + 1]
        pre, post = w[:p], w[p + 2:]
        m = self.m
        swapped = [(pre + (v, u) + post, Fraction(1))]
        if u < m:  # two variables commute
            return swapped
        i = u - m
        if v < m:
            return swapped + [(pre + t + post, c) for t, c in self.delta[(i, v)]]
        j = v - m
        return swapped + [(pre + t + post, c) for t, c in self.bracket[(i, j)]]

    def run(self, comb: dict, rightmost: bool) -> dict:
        done: dict = {}
        work = dict(comb)
        while work:
            w, c = work.popitem()
            reds = self.redexes(w)
            if not reds:
                done[w] = done.get(w, 0) + c
                continue
            redex = max(reds, key=lambda r: r[1]) if rightmost else min(reds, key=lambda r: r[1])
            for w2, c2 in self.apply(w, redex):
                s = work.get(w2, 0) + c * c2
                if s:
                    work[w2] = s
                else:
                    work.pop(w2, None)
        return {w: c for w, c in done.items() if c}

    def to_element(self, comb: dict) -> CrossedElement:
        pres = self.pres
        out: dict = {}
        for w, c in comb.items():
            mu = [0] * pres.m
            beta = [0] * pres.n
            for letter in w:
                if letter < self.m:
                    mu[letter] += 1
                else:
                    beta[letter - self.m] += 1
            _acc(out, tuple(beta), CommPoly.monomial(tuple(mu), c))
        return CrossedElement(pres, out)

    def word_combination(self, word) -> dict:
        comb = {(): Fraction(1)}
        for item in word:
            if isinstance(item, Gen):
                parts = [((self.m + item.index,), Fraction(1))]
            elif isinstance(item, Var):
                parts = [((item.index,), Fraction(1))]
            elif isinstance(item, CommPoly):
                parts = list(_letters_of_poly(item))
            elif isinstance(item, CrossedElement):
                parts = []
                for beta, poly in item.terms.items():
                    gl = tuple(l for i, e in enumerate(beta) for l in [self.m + i] * e)
                    parts.extend((t + gl, c) for t, c in _letters_of_poly(poly))
            else:
                parts = [((), Fraction(item))]
            new: dict = {}
            for w, c in comb.items():
                for t, c2 in parts:
                    new[w + t] = new.get(w + t, 0) + c * c2
            comb = {w: c for w, c in new.items() if c}
        return comb


STRATEGIES = ("multiply", "leftmost", "rightmost")


def normal_form(word: Sequence, pres: AlgebraPresentation, strategy: str = "multiply") -> CrossedElement:
    """Normal form of a product of word items.

    ``multiply`` folds the memoised product left to right; ``leftmost`` and
    ``rightmost`` rewrite letter words by always reducing the leftmost
    (resp. rightmost) out-of-order adjacent pair.
    """
    if strategy == "multiply":
        acc = pres.one()
        for item in word:
            acc = acc * _item_element(item, pres)
        return acc
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    for item in word:
        _item_element(item, pres)  # validates symbols
    rw = _Rewriter(pres)
    return rw.to_element(rw.run(rw.word_combination(word), strategy == "rightmost"))


# -- degree, type and filtration ---------------------------------------------


def type_of(e: CrossedElement, rule: OrderRule = OrderRule.DEGLEX) -> tuple:
    if e.is_zero():
        raise ValueError("the zero element has no type")
    return max(e.terms, key=order_key(rule))


def total_degree(e: CrossedElement):
    if e.is_zero():
        return BOTTOM
    return max(p.total_degree() + sum(beta) for beta, p in e.terms.items())


def filtration_index(e: CrossedElement) -> tuple:
    """Componentwise maximum of the (g2..gn)-exponents over all terms."""
    if e.is_zero():
        raise ValueError("the zero element has no filtration index")
    if e.pres.n < 1:
        return ()
    tails = [beta[1:] for beta in e.terms]
    return tuple(max(col) for col in zip(*tails)) if tails[0] else ()


def leading_filtration_index(e: CrossedElement, rule: OrderRule = OrderRule.DEGLEX) -> tuple:
    """Order-maximal (g2..gn)-exponent over all terms."""
    if e.is_zero():
        raise ValueError("the zero element has no filtration index")
    return max((beta[1:] for beta in e.terms), key=order_key(rule))


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def monomials_upto(nvars: int, bound: int):
    for d in range(bound + 1):
        yield from _compositions(d, nvars)


def pbw_basis(pres: AlgebraPresentation, degree_bound: int) -> list:
    """All labels of total degree <= bound, in canonical order."""
    if degree_bound < 0:
        return []
    labels = []
    for d in range(degree_bound + 1):
        for k in range(d + 1):
            for pbw in _compositions(k, pres.n):
                for mu in _compositions(d - k, pres.m):
                    if pres.base.is_reduced_exponent(mu):
                        labels.append(Label(mu, pbw))
    labels.sort(key=label_sort_key)
    return labels


@dataclass
class FreenessReport:
    passed: bool
    rows: list  # per degree: {"d", "dim_B", "predicted", "rank"}


def check_A1_freeness(pres: AlgebraPresentation, degree_bound: int) -> FreenessReport:
    """Dimension test that B is free over the subalgebra generated by A and g1.

    For each d the products a * w, with a running over basis monomials of
    the subalgebra and w over monomials in g2..gn, of total degree <= d must
    be linearly independent and span B_{<=d}.
    """
    if pres.n < 2:
        raise ValueError("freeness over A1 needs at least two generators")
    from .linalg import Echelon, sparse_vector

    a1 = [lab for lab in pbw_basis(pres, degree_bound) if not any(lab.pbw[1:])]
    omegas = [w for w in monomials_upto(pres.n - 1, degree_bound)]
    products = []
    for lab in a1:
        for w in omegas:
            level = lab.degree + sum(w)
            if level <= degree_bound:
                products.append((level, lab, w))
    products.sort(key=lambda p: (p[0], label_sort_key(p[1]), p[2]))
    ech = Echelon(track=False)
    rows = []
    it = iter(products)
    pending = next(it, None)
    passed = True
    for d in range(degree_bound + 1):
        while pending is not None and pending[0] <= d:
            _, lab, w = pending
            omega = CrossedElement(pres, {(0,) + tuple(w): pres.base.one})
            ech.insert(sparse_vector(pres.label_element(lab) * omega))
            pending = next(it, None)
        predicted = sum(1 for p in products if p[0] <= d)
        dim_b = len(pbw_basis(pres, d))
        ok = ech.rank == predicted == dim_b
        passed = passed and ok
        rows.append({"d": d, "dim_B": dim_b, "predicted": predicted, "rank": ech.rank})
    return FreenessReport(passed, rows)


# -- consistency -------------------------------------------------------------


@dataclass
class ConsistencyReport:
    passed: bool
    checked: int
    witness: Optional[str] = None
    detail: str = ""


def _jacobi_failure(lie: LiePresentation):
    n = lie.n

    def br(vec_a: dict, vec_b: dict) -> dict:
        out: dict = {}
        for i, ca in vec_a.items():
            for j, cb in vec_b.items():
                for k, c in lie.bracket_vector(i, j).items():
                    out[k] = out.get(k, 0) + ca * cb * c
        return {k: c for k, c in out.items() if c}

    for i, j, k in itertools.combinations(range(n), 3):
        total: dict = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for t, v in br({a: 1}, br({b: 1}, {c: 1})).items():
                total[t] = total.get(t, 0) + v
        if any(total.values()):
            return (i, j, k)
    return None


def _word_text(word, pres):
    parts = []
    for item in word:
        if isinstance(item, Gen):
            parts.append(f"g{item.index + 1}")
        elif isinstance(item, Var):
            parts.append(pres.base.names[item.index])
        elif isinstance(item, CommPoly):
            parts.append(f"({pres.base.format(item)})")
        else:
            parts.append(_parse.format_rational(Fraction(item)))
    return "*".join(parts)


def consistency_check(pres: AlgebraPresentation, trials: int = 200, seed: int = 0) -> ConsistencyReport:
    """Jacobi on the structure constants plus associativity on words."""
    bad = _jacobi_failure(pres.lie)
    if bad is not None:
        i, j, k = bad
        return ConsistencyReport(False, 0, f"g{i + 1}*g{j + 1}*g{k + 1}",
                                 "Jacobi identity fails on the structure constants")
    atoms = [Gen(i) for i in range(pres.n)] + [Var(k) for k in range(pres.m)]
    checked = 0

    def assoc_fails(word):
        left = pres.one()
        for item in word:
            left = left * _item_element(item, pres)
        right = pres.one()
        for item in reversed(word):
            right = _item_element(item, pres) * right
        return left != right

    for triple in itertools.product(atoms, repeat=3):
        checked += 1
        if assoc_fails(list(triple)):
            return ConsistencyReport(False, checked, _word_text(triple, pres),
                                     "(ab)c != a(bc) on generator/coefficient triple")
    rng = random.Random(seed)
    for _ in range(trials):
        length = rng.randint(2, 4)
        word = []
        for _ in range(length):
            if pres.m and rng.random() < 0.3:
                mu = tuple(rng.randint(0, 2) for _ in range(pres.m))
                word.append(pres.base.reduce(CommPoly.monomial(mu, rng.choice([1, -1, 2]))))
            elif atoms:
                word.append(rng.choice(atoms))
        checked += 1
        if assoc_fails(word):
            return ConsistencyReport(False, checked, _word_text(word, pres),
                                     "left and right folds of a word disagree")
        if normal_form(word, pres, "leftmost") != normal_form(word, pres, "multiply"):
            return ConsistencyReport(False, checked, _word_text(word, pres),
                                     "rewriting and multiplication disagree")
    return ConsistencyReport(True, checked)


# -- file format and presets -------------------------------------------------


def _rational_value(v):
    if isinstance(v, bool):
        raise PresentationError("boolean is not a rational")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float) and v.is_integer():
        return Fraction(int(v))
    raise PresentationError(f"bad rational {v!r}")


def _index_or_name(key: str, names: Sequence[str], what: str) -> int:
    if key.isdigit():
        k = int(key) - 1
        if 0 <= k < len(names):
            return k
    elif key in names:
        return list(names).index(key)
    raise PresentationError(f"unknown {what} {key!r}")


def load_presentation(text: str, name: str = "") -> AlgebraPresentation:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise PresentationError(f"malformed presentation: {exc}") from exc
    unknown = set(data) - {"base", "lie", "action"}
    if unknown:
        raise PresentationError(f"unknown sections {sorted(unknown)}")
    base_sec = data.get("base", {})
    names = list(base_sec.get("variables", []))
    quotient = None
    if "relation" in base_sec:
        plain = BaseDomain(names)
        relation = plain.parse(base_sec["relation"])
        elim = base_sec.get("eliminate", names[-1] if names else None)
        if elim is None:
            raise PresentationError("relation given without variables")
        v = plain.variable_index(elim)
        if v is None:
            raise PresentationError(f"unknown eliminated variable {elim!r}")
        try:
            quotient = QuotientPresentation(relation, v, relation.degree_in(v))
        except ValueError as exc:
            raise PresentationError(str(exc)) from exc
    base = BaseDomain(names, quotient)

    lie_sec = data.get("lie", {})
    gens = list(lie_sec.get("generators", []))
    n = len(gens)
    sc = {}
    for i_key, row in lie_sec.get("bracket", {}).items():
        i = _index_or_name(i_key, gens, "generator")
        for j_key, entries in row.items():
            j = _index_or_name(j_key, gens, "generator")
            vec = []
            for entry in entries:
                if len(entry) != 2:
                    raise PresentationError("bracket entries are [k, c] pairs")
                k = _index_or_name(str(entry[0]), gens, "generator")
                vec.append((k, _rational_value(entry[1])))
            if i > j:
                i, j = j, i
                vec = [(k, -c) for k, c in vec]
            sc[(i, j)] = tuple(vec)
    co = {}
    for i_key, row in lie_sec.get("cocycle", {}).items():
        i = _index_or_name(i_key, gens, "generator")
        for j_key, poly in row.items():
            j = _index_or_name(j_key, gens, "generator")
            a = base.parse(poly)
            if i > j:
                i, j, a = j, i, -a
            co[(i, j)] = a
    lie = LiePresentation(tuple(gens), sc, co)

    images = [[base.zero] * base.nvars for _ in range(n)]
    for g_key, row in data.get("action", {}).get("delta", {}).items():
        i = _index_or_name(g_key, gens, "generator")
        for v_key, poly in row.items():
            k = _index_or_name(v_key, names, "variable")
            images[i][k] = base.parse(poly)
    derivs = [DerivationSpec(tuple(ims)) for ims in images]
    return AlgebraPresentation(base, lie, derivs, name=name)


def dump_presentation(pres: AlgebraPresentation) -> str:
    if pres._text is not None:
        return pres._text
    q = json.dumps
    base = pres.base
    lines = ["[base]", f"variables = [{', '.join(q(v) for v in base.names)}]"]
    if base.quotient is not None:
        lines.append(f"relation = {q(base.format(base.quotient.relation))}")
        lines.append(f"eliminate = {q(base.names[base.quotient.eliminated_variable])}")
    lines += ["", "[lie]", f"generators = [{', '.join(q(g) for g in pres.lie.generator_names)}]"]
    for (i, j), vec in sorted(pres.lie.structure_constants.items()):
        entries = ", ".join(
            f"[{k + 1}, {c.numerator if c.denominator == 1 else q(str(c))}]" for k, c in vec
        )
        lines.append(f"bracket.{i + 1}.{j + 1} = [{entries}]")
    for (i, j), a in sorted(pres.lie.cocycles.items()):
        lines.append(f"cocycle.{i + 1}.{j + 1} = {q(base.format(a))}")
    lines += ["", "[action]"]
    for i, d in enumerate(pres.derivations):
        for k, im in enumerate(d.images):
            if not im.is_zero():
                lines.append(f"delta.{i + 1}.{k + 1} = {q(base.format(im))}")
    pres._text = "\n".join(lines) + "\n"
    return pres._text


_PRESETS = {
    "weyl": """
[base]
variables = ["x"]
[lie]
generators = ["d"]
[action]
delta.d.x = "1"
""",
    "weyl-ext-abelian": """
[base]
variables = ["x"]
[lie]
generators = ["d", "e"]
[action]
delta.d.x = "1"
""",
    "heisenberg": """
[base]
variables = []
[lie]
generators = ["g1", "g2", "g3"]
bracket.1.2 = [[3, 1]]
""",
    "weyl-ext-heisenberg": """
[base]
variables = ["x"]
[lie]
generators = ["d", "e", "f"]
bracket.1.2 = [[3, 1]]
[action]
delta.d.x = "1"
""",
}


def _poly_names(m):
    return ["x", "y", "z"][:m] if m <= 3 else [f"x{i + 1}" for i in range(m)]


def preset_names() -> list:
    return sorted(_PRESETS) + ["poly:<m>", "sphere:<n>"]


def preset(name: str) -> AlgebraPresentation:
    """Built-in presentations: weyl, weyl-ext-abelian, heisenberg,
    weyl-ext-heisenberg, poly:<m> (commutative Q[x..]) and sphere:<n>."""
    if name in _PRESETS:
        return load_presentation(_PRESETS[name], name=name)
    kind, _, arg = name.partition(":")
    if kind in ("poly", "sphere") and arg.isdigit():
        m = int(arg)
        if kind == "poly":
            return AlgebraPresentation(BaseDomain(_poly_names(m)), LiePresentation(()), name=name)
        if m < 1:
            raise PresentationError("sphere needs at least one variable")
        names = [f"x{i + 1}" for i in range(m)]
        plain = BaseDomain(names)
        rel = plain.parse(" + ".join(f"{v}^2" for v in names) + " - 1")
        base = BaseDomain(names, QuotientPresentation(rel, m - 1, 2))
        return AlgebraPresentation(base, LiePresentation(()), name=name)
    raise PresentationError(f"unknown preset {name!r}; known: {', '.join(preset_names())}")
