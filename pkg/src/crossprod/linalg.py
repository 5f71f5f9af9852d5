"""Degree-truncated exact linear algebra over Q.

Two engines live here.  :func:`rref` is a plain dense Gauss-Jordan used for
small matrices and as a reference.  :class:`Echelon` is the sparse
incremental workhorse: vectors are dicts keyed by totally ordered labels,
the pivot of a row is its *largest* key, and every stored row remembers
which inserted vectors it came from.  Because basis labels sort by total
degree first, the rows whose pivot has degree <= d span exactly the part of
the span lying in degree <= d; that gives filtered dimensions for free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Optional, Sequence

from .pbw import (
    AlgebraPresentation,
    CrossedElement,
    Label,
    label_sort_key,
    pbw_basis,
    total_degree,
)
from .coefficients import BOTTOM, CommPoly


class BoundError(ValueError):
    """An element does not fit in the truncated basis."""


class TruncBasis:
    def __init__(self, pres: AlgebraPresentation, degree_bound: int):
        self.pres = pres
        self.degree_bound = degree_bound
        self.labels = pbw_basis(pres, degree_bound)
        self.index = {lab: i for i, lab in enumerate(self.labels)}

    def __len__(self):
        return len(self.labels)

    def vectorize(self, e: CrossedElement) -> list:
        vec = [Fraction(0)] * len(self.labels)
        for lab, c in e.labels().items():
            i = self.index.get(lab)
            if i is None:
                raise BoundError(f"{e} exceeds degree bound {self.degree_bound}")
            vec[i] = c
        return vec

    def unvectorize(self, vec: Sequence) -> CrossedElement:
        return element_from_labels({self.labels[i]: c for i, c in enumerate(vec) if c}, self.pres)


def element_from_labels(coords: dict, pres: AlgebraPresentation) -> CrossedElement:
    terms: dict = {}
    for lab, c in coords.items():
        if c:
            terms.setdefault(lab.pbw, {})[lab.coef] = Fraction(c)
    return CrossedElement(pres, {pbw: CommPoly(pres.m, t) for pbw, t in terms.items()})


def sparse_vector(e: CrossedElement) -> dict:
    """``{label sort key: coefficient}``; keys compare in the canonical basis order."""
    return {label_sort_key(lab): c for lab, c in e.labels().items()}


def key_label(key) -> Label:
    return Label(key[3], key[2])


def element_from_sparse(vec: dict, pres: AlgebraPresentation) -> CrossedElement:
    return element_from_labels({key_label(k): c for k, c in vec.items()}, pres)


@dataclass
class RatMatrix:
    rows: int
    cols: int
    entries: list  # list of rows of Fraction

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "RatMatrix":
        data = [[Fraction(x) for x in r] for r in rows]
        cols = len(data[0]) if data else 0
        if any(len(r) != cols for r in data):
            raise ValueError("ragged matrix")
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n):
        m = cls.zeros(n, n)
        for i in range(n):
            m.entries[i][i] = Fraction(1)
        return m

    def copy(self):
        return RatMatrix(self.rows, self.cols, [list(r) for r in self.entries])

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.entries == other.entries and \
            (self.rows, self.cols) == (other.rows, other.cols)


def rref(M: RatMatrix):
    """Reduced row-echelon form; returns ``(R, pivot_columns, rank)``.

    The pivot for each column is the first remaining row with a nonzero
    entry, scanning columns left to right.
    """
    R = M.copy()
    a = R.entries
    pivots = []
    r = 0
    for c in range(R.cols):
        if r == R.rows:
            break
        src = next((i for i in range(r, R.rows) if a[i][c]), None)
        if src is None:
            continue
        a[r], a[src] = a[src], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(R.rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return R, pivots, len(pivots)


def _axpy(target: dict, f, src: dict):
    """target -= f * src, in place."""
    for k, v in src.items():
        s = target.get(k, 0) - f * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)


class Echelon:
    """Incremental sparse echelon form with max-key pivots and provenance.

    ``insert`` returns ``None`` when the vector was independent, otherwise
    the dependency ``{insertion id: coefficient}`` (including the new
    vector with coefficient 1) that sums to zero.
    """

    def __init__(self, track: bool = True):
        self.rows: dict = {}  # pivot key -> (vector, combo)
        self.track = track
        self.count = 0

    def reduce(self, vec: dict, combo: Optional[dict] = None):
        vec = dict(vec)
        combo = dict(combo or {})
        while vec:
            p = max(vec)
            hit = self.rows.get(p)
            if hit is None:
                break
            f = vec[p]
            _axpy(vec, f, hit[0])
            if self.track:
                _axpy(combo, f, hit[1])
        return vec, combo

    def insert(self, vec: dict, ident: Hashable = None):
        ident = self.count if ident is None else ident
        self.count += 1
        v, combo = self.reduce(vec, {ident: Fraction(1)} if self.track else None)
        if not v:
            return combo
        p = max(v)
        inv = 1 / v[p]
        self.rows[p] = ({k: x * inv for k, x in v.items()},
                        {k: x * inv for k, x in combo.items()} if self.track else {})
        return None

    @property
    def rank(self):
        return len(self.rows)

    def pivots(self):
        return sorted(self.rows)


@dataclass
class SolveReport:
    status: str  # solved | no-solution | inconclusive-bound
    cofactors: list = field(default_factory=list)
    rank: int = 0
    columns: int = 0
    cofactor_bound: int = 0

    @property
    def solved(self):
        return self.status == "solved"


def _right_products(gens, bound, pres):
    """Columns g_i * label for every label of degree <= bound, with ids (i, label)."""
    labels = pbw_basis(pres, bound)
    for i, g in enumerate(gens):
        for lab in labels:
            yield (i, lab), sparse_vector(g * pres.label_element(lab))


def right_combination_solve(
    gens: Sequence[CrossedElement],
    target: CrossedElement,
    cofactor_bound: int,
    pres: AlgebraPresentation,
    exact_bound: bool = False,
) -> SolveReport:
    """Find c_i of degree <= bound with sum gens[i] * c_i == target.

    A failure is reported as ``inconclusive-bound`` unless the caller
    vouches (``exact_bound``) that the bound settles the question, in which
    case it is ``no-solution``.
    """
    ech = Echelon()
    ncols = 0
    for ident, vec in _right_products(gens, cofactor_bound, pres):
        ech.insert(vec, ident)
        ncols += 1
    rest, combo = ech.reduce(sparse_vector(target))
    if rest:
        status = "no-solution" if exact_bound else "inconclusive-bound"
        return SolveReport(status, [], ech.rank, ncols, cofactor_bound)
    cof = [dict() for _ in gens]
    for (i, lab), c in combo.items():
        cof[i][lab] = -c
    cofactors = [element_from_labels(c, pres) for c in cof]
    check = pres.zero()
    for g, c in zip(gens, cofactors):
        check = check + g * c
    if check != target:
        raise ArithmeticError("right combination failed re-verification")
    return SolveReport("solved", cofactors, ech.rank, ncols, cofactor_bound)


def _degree(e):
    d = total_degree(e)
    if d is BOTTOM:
        raise ValueError("zero element")
    return d


@dataclass
class SyzygyTable:
    """Syzygies of (a, b) sorted by the degree of a*s.

    ``pairs[i]`` is a basis pair found at level ``levels[i]``; level d means
    deg s <= d - deg a and deg t <= d - deg b.  ``dims[d]`` counts pairs
    with level <= d.
    """

    a: CrossedElement
    b: CrossedElement
    cap: int
    pairs: list
    levels: list
    dims: dict


def syzygy_table(a: CrossedElement, b: CrossedElement, cap: int, pres: AlgebraPresentation) -> SyzygyTable:
    if a.is_zero() or b.is_zero():
        raise ValueError("syzygies need nonzero inputs")
    da, db = _degree(a), _degree(b)
    columns = []
    for lab in pbw_basis(pres, cap - da):
        columns.append((da + lab.degree, 0, lab))
    for lab in pbw_basis(pres, cap - db):
        columns.append((db + lab.degree, 1, lab))
    columns.sort(key=lambda c: (c[0], c[1], label_sort_key(c[2])))
    ech = Echelon()
    pairs, levels = [], []
    for level, side, lab in columns:
        factor = a if side == 0 else b
        dep = ech.insert(sparse_vector(factor * pres.label_element(lab)), (side, lab))
        if dep is not None:
            s = element_from_labels({l: c for (sd, l), c in dep.items() if sd == 0}, pres)
            t = element_from_labels({l: c for (sd, l), c in dep.items() if sd == 1}, pres)
            pairs.append((s, t))
            levels.append(level)
    dims = {d: sum(1 for lv in levels if lv <= d) for d in range(cap + 1)}
    return SyzygyTable(a, b, cap, pairs, levels, dims)


def syzygy_basis(a: CrossedElement, b: CrossedElement, degree_bound: int, pres: AlgebraPresentation) -> list:
    """Basis of {(s, t) : a*s + b*t = 0, deg s, deg t <= bound}."""
    if a.is_zero() or b.is_zero():
        raise ValueError("syzygies need nonzero inputs")
    labels = pbw_basis(pres, degree_bound)
    ech = Echelon()
    pairs = []
    for side, factor in ((0, a), (1, b)):
        for lab in labels:
            dep = ech.insert(sparse_vector(factor * pres.label_element(lab)), (side, lab))
            if dep is not None:
                s = element_from_labels({l: c for (sd, l), c in dep.items() if sd == 0}, pres)
                t = element_from_labels({l: c for (sd, l), c in dep.items() if sd == 1}, pres)
                pairs.append((s, t))
    for s, t in pairs:
        if not (a * s + b * t).is_zero():
            raise ArithmeticError("syzygy failed re-verification")
    return pairs


def filtered_dim(
    span_gens: Sequence[CrossedElement],
    right_cofactor_bound: int,
    degree_cap: int,
    pres: AlgebraPresentation,
) -> dict:
    """``{d: dim}`` of the degree <= d part of sum gens[i] * B_{<= bound}."""
    ech = Echelon(track=False)
    for _, vec in _right_products(span_gens, right_cofactor_bound, pres):
        ech.insert(vec)
    degs = [key[0] for key in ech.rows]
    return {d: sum(1 for x in degs if x <= d) for d in range(degree_cap + 1)}


def span_dim_by_degree(elements: Iterable[CrossedElement], degree_cap: int) -> dict:
    ech = Echelon(track=False)
    for e in elements:
        ech.insert(sparse_vector(e))
    degs = [key[0] for key in ech.rows]
    return {d: sum(1 for x in degs if x <= d) for d in range(degree_cap + 1)}
