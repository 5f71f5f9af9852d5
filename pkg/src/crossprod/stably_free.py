"""Unimodular rows, intersection ideals, splitting witnesses and certificates.

The central object is a right unimodular row (a, b) with a*u + b*v = 1.
Its kernel {(s, t) : a*s + b*t = 0} is identified with K = aB & bB through
(s, t) -> a*s, and K (+) B = B^2 is witnessed by the idempotent
E = I - (u, v)^T (a, b).  Non-principality of K is certified by comparing
dim K_{<=d} with dim B_{<=d-d0}, which must agree for all d when K = yB and
the degree is additive.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .coefficients import BOTTOM, BaseDomain, CommPoly, DerivationSpec, QuotientPresentation
from .linalg import (
    Echelon,
    filtered_dim,
    right_combination_solve,
    sparse_vector,
    syzygy_table,
)
from .pbw import (
    AlgebraPresentation,
    CrossedElement,
    LiePresentation,
    load_presentation,
    pbw_basis,
    total_degree,
)
from .sampling import random_element, trial_rng

DEFAULT_COFACTOR_BOUND = 6
DEFAULT_DEGREE_CAP = 10


class PreconditionError(ValueError):
    pass


@dataclass
class Inconclusive:
    reason: str
    bound: Optional[int] = None
    data: dict = field(default_factory=dict)

    def __bool__(self):
        return False


@dataclass(frozen=True)
class UnimodularRow:
    a: CrossedElement
    b: CrossedElement
    u: CrossedElement
    v: CrossedElement

    def __post_init__(self):
        if self.a * self.u + self.b * self.v != self.a.pres.one():
            raise ValueError("a*u + b*v != 1")

    @property
    def pres(self) -> AlgebraPresentation:
        return self.a.pres


@dataclass
class IdealSpec:
    """Generators of a right ideal, plus the row it came from when known."""

    generators: list
    provenance: str  # syzygy | lifted | user
    row: Optional[tuple] = None
    degree_bound: Optional[int] = None

    def __post_init__(self):
        if self.provenance not in ("syzygy", "lifted", "user"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if any(g.is_zero() for g in self.generators):
            raise ValueError("ideal generators must be nonzero")

    @property
    def pres(self):
        if self.row:
            return self.row[0].pres
        return self.generators[0].pres


def find_cofactors(a, b, cofactor_bound: int, pres: AlgebraPresentation):
    """A verified UnimodularRow, or Inconclusive when no cofactors exist at the bound."""
    if a.is_zero() or b.is_zero():
        raise ValueError("row entries must be nonzero")
    report = right_combination_solve([a, b], pres.one(), cofactor_bound, pres)
    if not report.solved:
        return Inconclusive(f"no cofactors of degree <= {cofactor_bound}", cofactor_bound,
                            {"rank": report.rank, "columns": report.columns})
    u, v = report.cofactors
    return UnimodularRow(a, b, u, v)


def _degree(e):
    d = total_degree(e)
    if d is BOTTOM:
        raise ValueError("zero element")
    return d


def build_intersection_ideal(row: UnimodularRow, degree_bound: int, pres: Optional[AlgebraPresentation] = None):
    """Generators of aB & bB among elements a*s with deg a + deg s <= bound.

    Syzygies are taken in order of that level and a new element a*s is kept
    only when it is not already a right multiple combination of the kept
    ones, so the list is a reduced generating set for the truncation.
    """
    pres = pres or row.pres
    a, b = row.a, row.b
    table = syzygy_table(a, b, degree_bound, pres)
    if not table.pairs:
        return Inconclusive(f"aB & bB has no element of level <= {degree_bound}", degree_bound)
    kept: list = []
    ech = Echelon(track=False)
    for (s, t), level in zip(table.pairs, table.levels):
        g = a * s
        if g != -(b * t):
            raise ArithmeticError("syzygy element is not a common right multiple")
        rest, _ = ech.reduce(sparse_vector(g))
        if not rest:
            continue
        kept.append(g)
        dg = _degree(g)
        for lab in pbw_basis(pres, degree_bound - dg):
            ech.insert(sparse_vector(g * pres.label_element(lab)))
    return IdealSpec(kept, "syzygy", (a, b), degree_bound)


# -- splitting witnesses ------------------------------------------------------


@dataclass
class StableFreenessWitness:
    """row * column = 1 and the complementary idempotent E = I - column * row."""

    row: list
    column: list
    E: list  # square matrix of CrossedElement
    checks: dict
    trace: Optional[CrossedElement] = None

    @property
    def verified(self):
        return all(self.checks.values())

    @property
    def size(self):
        return len(self.row)


def _matmul(X, Y, pres):
    n, k, m = len(X), len(Y), len(Y[0])
    out = []
    for i in range(n):
        r = []
        for j in range(m):
            acc = pres.zero()
            for t in range(k):
                acc = acc + X[i][t] * Y[t][j]
            r.append(acc)
        out.append(r)
    return out


def splitting_witness(row: Sequence[CrossedElement], column: Sequence[CrossedElement],
                      pres: AlgebraPresentation) -> StableFreenessWitness:
    """Idempotent splitting of B^k -> B, x -> row * x, by the section 1 -> column."""
    k = len(row)
    if k != len(column) or k == 0:
        raise ValueError("row and column must have the same positive length")
    one, zero = pres.one(), pres.zero()
    R = [list(row)]
    C = [[c] for c in column]
    CR = _matmul(C, R, pres)
    E = [[(one if i == j else zero) - CR[i][j] for j in range(k)] for i in range(k)]
    checks = {
        "row*column=1": _matmul(R, C, pres)[0][0] == one,
        "E*E=E": _matmul(E, E, pres) == E,
        "row*E=0": all(x.is_zero() for x in _matmul(R, E, pres)[0]),
        "E*column=0": all(r[0].is_zero() for r in _matmul(E, C, pres)),
    }
    trace = None
    if pres.n == 0:
        trace = sum((E[i][i] for i in range(k)), zero)
    return StableFreenessWitness(list(row), list(column), E, checks, trace)


def certify_stably_free(row: UnimodularRow) -> StableFreenessWitness:
    w = splitting_witness([row.a, row.b], [row.u, row.v], row.pres)
    if not w.verified:
        raise ArithmeticError(f"splitting identities failed: {w.checks}")
    return w


# -- non-cyclicity ----------------------------------------------------------


@dataclass
class NonCyclicityCertificate:
    d0: int
    d_witness: int
    dim_K: int
    dim_B: int
    degree_cap: int
    cofactor_bound: int
    dims_K: dict
    row: tuple
    provenance: str


def additivity_precondition(pres: AlgebraPresentation, trials: int = 30, seed: int = 0):
    """Sufficient check that total degree is additive, plus a random spot check.

    Returns ``(ok, reason)``.
    """
    if pres.base.quotient is not None:
        return False, "base domain has a relation; degree additivity is not guaranteed"
    for i, d in enumerate(pres.derivations):
        for k, im in enumerate(d.images):
            if not im.is_zero() and im.total_degree() > 1:
                return False, f"delta of g{i + 1} raises the degree of variable {k + 1}"
    for (i, j), a in pres.lie.cocycles.items():
        if a.total_degree() > 1:
            return False, f"cocycle ({i + 1},{j + 1}) has degree above 1"
    for t in range(trials):
        rng = trial_rng(seed, t)
        e1 = random_element(pres, rng, 3)
        e2 = random_element(pres, rng, 3)
        if _degree(e1 * e2) != _degree(e1) + _degree(e2):
            return False, f"deg({e1} * {e2}) is not additive"
    return True, "associated graded ring is a polynomial ring"


def certify_noncyclic(
    K: IdealSpec,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    cofactor_bound: int = DEFAULT_COFACTOR_BOUND,
    pres: Optional[AlgebraPresentation] = None,
):
    """A NonCyclicityCertificate or Inconclusive.

    Only ideals that carry their row (syzygy or lifted provenance) can be
    certified: their degree slices are computed exactly from syzygies.  For
    a bare generator list the slices are lower bounds and the minimal degree
    is not known, so the answer is always inconclusive.
    """
    pres = pres or K.pres
    ok, reason = additivity_precondition(pres)
    if not ok:
        raise PreconditionError(f"refusing to certify: {reason}")
    if K.row is None:
        dims = filtered_dim(K.generators, cofactor_bound, degree_cap, pres)
        return Inconclusive("ideal given by generators only; degree slices are lower bounds",
                            degree_cap, {"dims_lower_bound": dims})
    a, b = K.row
    cap = min(degree_cap, cofactor_bound + min(_degree(a), _degree(b)))
    table = syzygy_table(a, b, cap, pres)
    if not table.levels:
        return Inconclusive(f"no nonzero element of K up to degree {cap}", cap)
    d0 = min(table.levels)
    for d in range(d0, cap + 1):
        dim_b = len(pbw_basis(pres, d - d0))
        if table.dims[d] != dim_b:
            return NonCyclicityCertificate(
                d0, d, table.dims[d], dim_b, degree_cap, cofactor_bound,
                {dd: table.dims[dd] for dd in range(d + 1)}, (a, b), K.provenance,
            )
    return Inconclusive(f"dimensions agree with a principal ideal up to degree {cap}", cap,
                        {"d0": d0, "dims_K": dict(table.dims)})


# -- lifting -----------------------------------------------------------------


def extends(pres_b: AlgebraPresentation, pres_a1: AlgebraPresentation) -> bool:
    """Does pres_b contain pres_a1's base and first generator unchanged?"""
    return (
        pres_a1.n == 1
        and pres_b.n >= 2
        and pres_b.base == pres_a1.base
        and pres_b.derivations[0] == pres_a1.derivations[0]
    )


def embed(e: CrossedElement, pres_b: AlgebraPresentation) -> CrossedElement:
    if any(k != 0 for k in e.generator_support()):
        raise ValueError(f"{e} mentions generators beyond g1")
    out = {}
    for pbw, p in e.terms.items():
        out[(pbw[0],) + (0,) * (pres_b.n - 1)] = p
    return CrossedElement(pres_b, out)


def lift_ideal(K: IdealSpec, pres_b: AlgebraPresentation) -> IdealSpec:
    src = K.pres
    if not extends(pres_b, src):
        raise ValueError("target presentation does not extend the source Ore extension")
    gens = [embed(g, pres_b) for g in K.generators]
    row = tuple(embed(x, pres_b) for x in K.row) if K.row else None
    return IdealSpec(gens, "lifted", row, K.degree_bound)


@dataclass
class LiftReport:
    """Degree slices of KB against the free-module prediction, and KB & A1 against K."""

    cap: int
    predicted: dict
    actual: dict
    contraction: dict
    base_dims: dict

    @property
    def flat_ok(self):
        return self.predicted == self.actual

    @property
    def contraction_ok(self):
        return all(self.contraction[d] == self.base_dims[d] for d in self.contraction)


def lift_consistency(K: IdealSpec, K_lift: IdealSpec, cap: int) -> LiftReport:
    """Compare dim (KB)_{<=d} with sum_w dim K_{<=d-|w|} over monomials w in g2..gn.

    Also measures (KB & A1)_{<=d}, which should equal K_{<=d}.
    """
    low = syzygy_table(K.row[0], K.row[1], cap, K.pres)
    high = syzygy_table(K_lift.row[0], K_lift.row[1], cap, K_lift.pres)
    extra = K_lift.pres.n - 1
    from .pbw import monomials_upto

    omegas = list(monomials_upto(extra, cap))
    predicted = {d: sum(low.dims[d - sum(w)] for w in omegas if sum(w) <= d) for d in range(cap + 1)}

    a = K_lift.row[0]
    ech = Echelon(track=False)

    def key(k):
        # k = (deg, pbwsum, pbw, coef); coordinates outside A1 sort above all of A1
        outside = any(k[2][1:])
        return (int(outside),) + k

    for (s, _), level in sorted(zip(high.pairs, high.levels), key=lambda p: p[1]):
        ech.insert({key(k): c for k, c in sparse_vector(a * s).items()})
    inside = [k for k in ech.rows if k[0] == 0]
    contraction = {d: sum(1 for k in inside if k[1] <= d) for d in range(cap + 1)}
    return LiftReport(cap, predicted, dict(high.dims), contraction, dict(low.dims))


# -- derivation stability ---------------------------------------------------


@dataclass
class StabilityReport:
    status: str  # stable | unstable | inconclusive
    witness: Optional[CommPoly] = None
    image: Optional[CommPoly] = None
    bound: int = 0
    detail: str = ""


def derivation_stability(ideal_gens: Sequence[CommPoly], d: DerivationSpec, membership_bound: int,
                         domain: Optional[BaseDomain] = None) -> StabilityReport:
    """Does d map every generator back into the ideal they generate?

    Membership is a bounded linear solve.  A negative answer is definitive
    only for principal or monomial ideals in a polynomial ring with the bound
    at least deg d(m), where the bounded solve decides divisibility exactly.
    """
    if not ideal_gens:
        return StabilityReport("stable", bound=membership_bound, detail="zero ideal")
    nvars = ideal_gens[0].nvars
    domain = domain or BaseDomain([f"x{i + 1}" for i in range(nvars)])
    pres = AlgebraPresentation(domain, LiePresentation(()), name="commutative")
    gens = [pres.coef(g) for g in ideal_gens]
    monomial = all(len(g.terms) == 1 for g in ideal_gens)
    exact_family = domain.quotient is None and (len(ideal_gens) == 1 or monomial)
    undecided = None
    for m in ideal_gens:
        image = domain.reduce(d(m))
        if image.is_zero():
            continue
        rep = right_combination_solve(gens, pres.coef(image), membership_bound, pres)
        if rep.solved:
            continue
        if exact_family and membership_bound >= image.total_degree():
            return StabilityReport("unstable", m, image, membership_bound,
                                   "image provably outside the ideal")
        undecided = undecided or (m, image)
    if undecided is not None:
        return StabilityReport("inconclusive", undecided[0], undecided[1], membership_bound,
                               "membership not found at the bound")
    return StabilityReport("stable", bound=membership_bound, detail="all images lie in the ideal")


# -- sphere ------------------------------------------------------------------


@dataclass
class SphereInstance:
    n: int
    pres: AlgebraPresentation
    column: list
    cofactors: list

    def verify(self) -> bool:
        acc = self.pres.zero()
        for a, c in zip(self.cofactors, self.column):
            acc = acc + c * a
        return acc == self.pres.one()


def sphere_column(n: int) -> SphereInstance:
    if n < 3:
        raise ValueError("sphere column needs n >= 3")
    from .pbw import preset

    pres = preset(f"sphere:{n}")
    col = [pres.var(i) for i in range(n)]
    inst = SphereInstance(n, pres, col, list(col))
    if not inst.verify():
        raise ArithmeticError("sum of squares did not reduce to 1")
    return inst


def cokernel_presentation(inst: SphereInstance) -> StableFreenessWitness:
    """E = I - column * row projects A^n onto the cokernel P of 1 -> column."""
    w = splitting_witness(inst.cofactors, inst.column, inst.pres)
    if not w.verified:
        raise ArithmeticError(f"cokernel identities failed: {w.checks}")
    return w


# -- certificates ---------------------------------------------------------------

CERT_FORMAT = "crossprod-certificate/1"


def _pres_block(pres: AlgebraPresentation) -> dict:
    return {"text": pres.to_text(), "sha256": pres.digest}


def _finish(doc: dict) -> str:
    body = json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    doc = dict(doc, digest=hashlib.sha256(body.encode()).hexdigest())
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def certificate_for(obj, pres: Optional[AlgebraPresentation] = None) -> str:
    """Serialize a row, witness, sphere instance or non-cyclicity certificate."""
    if isinstance(obj, UnimodularRow):
        pres = obj.pres
        doc = {"kind": "unimodular-row", "row": [str(obj.a), str(obj.b)],
               "cofactors": [str(obj.u), str(obj.v)]}
    elif isinstance(obj, SphereInstance):
        pres = obj.pres
        w = cokernel_presentation(obj)
        doc = {"kind": "sphere", "n": obj.n, "column": [str(c) for c in obj.column],
               "cofactors": [str(c) for c in obj.cofactors], "trace": str(w.trace),
               "idempotent": [[str(x) for x in r] for r in w.E]}
    elif isinstance(obj, StableFreenessWitness):
        pres = pres or obj.row[0].pres
        doc = {"kind": "stably-free", "row": [str(x) for x in obj.row],
               "column": [str(x) for x in obj.column],
               "idempotent": [[str(x) for x in r] for r in obj.E]}
    elif isinstance(obj, NonCyclicityCertificate):
        pres = obj.row[0].pres
        doc = {"kind": "noncyclic", "row": [str(x) for x in obj.row], "provenance": obj.provenance,
               "d0": obj.d0, "d_witness": obj.d_witness, "dim_K": obj.dim_K, "dim_B": obj.dim_B,
               "degree_cap": obj.degree_cap, "cofactor_bound": obj.cofactor_bound,
               "dims_K": [obj.dims_K[d] for d in range(obj.d_witness + 1)]}
        unimodular = find_cofactors(obj.row[0], obj.row[1], obj.cofactor_bound, pres)
        if unimodular:
            doc["cofactors"] = [str(unimodular.u), str(unimodular.v)]
    else:
        raise TypeError(f"cannot certify {type(obj).__name__}")
    doc["format"] = CERT_FORMAT
    doc["presentation"] = _pres_block(pres)
    return _finish(doc)


@dataclass
class VerifyReport:
    ok: bool
    kind: str = ""
    checks: dict = field(default_factory=dict)
    error: str = ""


def _int_field(doc, name):
    v = doc[name]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValueError(f"{name} must be an integer")
    return v


def verify_certificate(text: str) -> VerifyReport:
    """Recheck a certificate using only multiplication and linear algebra."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return VerifyReport(False, error=f"not valid JSON: {exc}")
    if not isinstance(doc, dict) or doc.get("format") != CERT_FORMAT:
        return VerifyReport(False, error="unknown certificate format")
    kind = doc.get("kind", "")
    checks = {}
    try:
        claimed = doc.pop("digest", None)
        body = json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        checks["digest"] = claimed == hashlib.sha256(body.encode()).hexdigest()
        block = doc["presentation"]
        pres = load_presentation(block["text"])
        checks["presentation-hash"] = pres.digest == block["sha256"] and \
            hashlib.sha256(block["text"].encode()).hexdigest() == block["sha256"]
        el = pres.element
        if kind == "unimodular-row":
            a, b = map(el, doc["row"])
            u, v = map(el, doc["cofactors"])
            checks["a*u+b*v=1"] = a * u + b * v == pres.one()
        elif kind in ("stably-free", "sphere"):
            row = [el(x) for x in (doc["cofactors"] if kind == "sphere" else doc["row"])]
            col = [el(x) for x in doc["column"]]
            w = splitting_witness(row, col, pres)
            checks.update(w.checks)
            E = [[el(x) for x in r] for r in doc["idempotent"]]
            checks["idempotent-matches"] = E == w.E
            if kind == "sphere":
                n = _int_field(doc, "n")
                checks["n-matches"] = n == len(col) and pres == sphere_column(n).pres
                checks["trace=n-1"] = el(doc["trace"]) == w.trace == pres.scalar(n - 1)
        elif kind == "noncyclic":
            a, b = map(el, doc["row"])
            d0, dw = _int_field(doc, "d0"), _int_field(doc, "d_witness")
            cap, cb = _int_field(doc, "degree_cap"), _int_field(doc, "cofactor_bound")
            ok, _ = additivity_precondition(pres)
            checks["degree-additive"] = ok
            checks["within-bounds"] = d0 <= dw <= cap and dw - min(_degree(a), _degree(b)) <= cb
            table = syzygy_table(a, b, dw, pres)
            recorded = doc["dims_K"]
            checks["dims-recomputed"] = recorded == [table.dims[d] for d in range(dw + 1)]
            checks["d0-minimal"] = bool(table.levels) and min(table.levels) == d0
            dim_b = len(pbw_basis(pres, dw - d0))
            checks["dim-K"] = _int_field(doc, "dim_K") == table.dims[dw]
            checks["dim-B"] = _int_field(doc, "dim_B") == dim_b
            checks["dims-differ"] = table.dims[dw] != dim_b
            if "cofactors" in doc:
                u, v = map(el, doc["cofactors"])
                checks["a*u+b*v=1"] = a * u + b * v == pres.one()
        else:
            return VerifyReport(False, kind, checks, f"unknown kind {kind!r}")
    except (KeyError, TypeError, ValueError, ArithmeticError) as exc:
        return VerifyReport(False, kind, checks, f"{type(exc).__name__}: {exc}")
    return VerifyReport(all(checks.values()), kind, checks)
