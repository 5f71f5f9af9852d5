import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from crossprod.linalg import (
    BoundError,
    Echelon,
    RatMatrix,
    TruncBasis,
    element_from_sparse,
    filtered_dim,
    right_combination_solve,
    rref,
    sparse_vector,
    span_dim_by_degree,
    syzygy_basis,
    syzygy_table,
)
from crossprod.pbw import pbw_basis, preset, total_degree
from crossprod.sampling import random_element

WEYL = preset("weyl")
HEIS = preset("heisenberg")

matrices = st.integers(1, 5).flatmap(
    lambda c: st.lists(
        st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=c, max_size=c),
        min_size=1, max_size=5,
    )
)


def dense_nullity(columns, pres):
    """Kernel dimension of a list of elements, via sympy's exact rank."""
    if not columns:
        return 0
    bound = max(total_degree(c) for c in columns if c)
    basis = TruncBasis(pres, bound)
    M = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in basis.vectorize(c)] for c in columns])
    return len(columns) - M.rank()


# -- vectors and bases ----------------------------------------------------------------


def test_vectorize_round_trip():
    basis = TruncBasis(WEYL, 4)
    assert len(basis) == 15
    for t in range(50):
        e = random_element(WEYL, random.Random(t), 4)
        assert basis.unvectorize(basis.vectorize(e)) == e
        assert element_from_sparse(sparse_vector(e), WEYL) == e


def test_vectorize_rejects_out_of_bound():
    with pytest.raises(BoundError):
        TruncBasis(WEYL, 1).vectorize(WEYL.element("x*d"))


# -- dense row reduction ---------------------------------------------------------------


def test_rref_example():
    M = RatMatrix.from_rows([[2, 4, 2], [1, 2, 3], [0, 0, 1]])
    R, pivots, rank = rref(M)
    assert pivots == [0, 2] and rank == 2
    assert R.entries == [[1, 2, 0], [0, 0, 1], [0, 0, 0]]


def test_rref_identity_and_zero():
    assert rref(RatMatrix.identity(3))[0] == RatMatrix.identity(3)
    assert rref(RatMatrix.zeros(2, 3))[2] == 0


def test_ragged_matrix_rejected():
    with pytest.raises(ValueError):
        RatMatrix.from_rows([[1, 2], [3]])


@settings(max_examples=150)
@given(matrices)
def test_rref_properties(rows):
    M = RatMatrix.from_rows(rows)
    R, pivots, rank = rref(M)
    assert rref(R)[0] == R
    assert rank == sp.Matrix(rows).rank()
    for i, c in enumerate(pivots):
        col = [R.entries[r][c] for r in range(R.rows)]
        assert col == [Fraction(int(r == i)) for r in range(R.rows)]
    # same row space: stacking does not raise the rank
    assert sp.Matrix(rows + R.entries).rank() == rank


@settings(max_examples=100)
@given(matrices)
def test_sparse_echelon_rank_matches_dense(rows):
    ech = Echelon()
    deps = 0
    for r in rows:
        vec = {k: v for k, v in enumerate(r) if v}
        combo = ech.insert(vec)
        if combo is not None:
            deps += 1
            total = {}
            for ident, c in combo.items():
                for k, v in enumerate(rows[ident]):
                    total[k] = total.get(k, 0) + c * v
            assert not any(total.values())
    assert ech.rank == sp.Matrix(rows).rank()
    assert ech.rank + deps == len(rows)


# -- right-combination solve -----------------------------------------------------------------


def test_solve_unit_from_x_and_d():
    x, d = WEYL.element("x"), WEYL.element("d")
    report = right_combination_solve([x, d], WEYL.one(), 1, WEYL)
    assert report.solved
    u, v = report.cofactors
    assert x * u + d * v == WEYL.one()


def test_solve_reports_inconclusive_then_exact_no_solution():
    x = WEYL.element("x")
    report = right_combination_solve([x], WEYL.one(), 3, WEYL)
    assert report.status == "inconclusive-bound" and report.cofactors == []
    assert right_combination_solve([x], WEYL.one(), 3, WEYL, exact_bound=True).status == "no-solution"


def test_solve_recovers_known_cofactor():
    pres = preset("weyl-ext-heisenberg")
    for t in range(20):
        rng = random.Random(t)
        g = random_element(pres, rng, 2)
        c = random_element(pres, rng, 2)
        report = right_combination_solve([g], g * c, 2, pres)
        assert report.solved and g * report.cofactors[0] == g * c


def test_principal_product_lies_in_right_span():
    # (1 + x d) x^2 is a right multiple of both generators of its defining row
    y = WEYL.element("(1+x*d)*x^2")
    assert right_combination_solve([WEYL.element("x^2")], y, 2, WEYL).solved
    assert right_combination_solve([WEYL.element("1+x*d")], y, 2, WEYL).solved


# -- syzygies ----------------------------------------------------------------------------------


def test_commutative_syzygy_example():
    pres = preset("poly:1")
    a, b = pres.element("x"), pres.element("x+1")
    pairs = syzygy_basis(a, b, 1, pres)
    assert len(pairs) == 1
    s, t = pairs[0]
    assert a * s + b * t == pres.zero()
    assert total_degree(s) == 1


def test_weyl_row_has_no_low_syzygies():
    assert syzygy_basis(WEYL.element("x"), WEYL.element("d"), 0, WEYL) == []
    assert len(syzygy_basis(WEYL.element("x"), WEYL.element("d"), 2, WEYL)) > 0


@pytest.mark.parametrize("name,a,b,bound", [
    ("weyl", "x", "d", 3),
    ("weyl", "x^2", "1+x*d", 3),
    ("heisenberg", "g1", "g2", 2),
    ("weyl-ext-abelian", "x", "d+1", 2),
    ("sphere:3", "x1", "x2", 2),
])
def test_syzygy_basis_complete(name, a, b, bound):
    pres = preset(name)
    a, b = pres.element(a), pres.element(b)
    labels = pbw_basis(pres, bound)
    columns = [a * pres.label_element(l) for l in labels] + [b * pres.label_element(l) for l in labels]
    pairs = syzygy_basis(a, b, bound, pres)
    assert len(pairs) == dense_nullity(columns, pres)
    for s, t in pairs:
        assert a * s + b * t == pres.zero()


@pytest.mark.parametrize("name,a,b,cap", [
    ("weyl", "x", "d+1", 5),
    ("weyl", "x^2", "1+x*d", 6),
    ("heisenberg", "g1", "g2", 4),
])
def test_syzygy_table_levels_match_dense_kernel(name, a, b, cap):
    pres = preset(name)
    a, b = pres.element(a), pres.element(b)
    table = syzygy_table(a, b, cap, pres)
    da, db = total_degree(a), total_degree(b)
    for d in range(cap + 1):
        cols = [a * pres.label_element(l) for l in pbw_basis(pres, d - da)]
        cols += [b * pres.label_element(l) for l in pbw_basis(pres, d - db)]
        assert table.dims[d] == dense_nullity(cols, pres)
    assert table.levels == sorted(table.levels)


def test_syzygy_rejects_zero():
    with pytest.raises(ValueError):
        syzygy_basis(WEYL.zero(), WEYL.one(), 1, WEYL)
    with pytest.raises(ValueError):
        syzygy_table(WEYL.one(), WEYL.zero(), 1, WEYL)


# -- filtered dimensions ------------------------------------------------------------------------


def test_filtered_dim_example():
    # x * {1, x, d} = {x, x^2, x d}
    assert filtered_dim([WEYL.element("x")], 1, 3, WEYL) == {0: 0, 1: 1, 2: 3, 3: 3}


def test_filtered_dim_monotone():
    gens = [WEYL.element("x^2"), WEYL.element("1+x*d")]
    prev = None
    for bound in range(4):
        dims = filtered_dim(gens, bound, 6, WEYL)
        assert all(dims[d] <= dims[d + 1] for d in range(6))
        if prev is not None:
            assert all(prev[d] <= dims[d] for d in dims)
        prev = dims


def test_span_dim_by_degree():
    elems = [HEIS.element(t) for t in ("g1", "g2", "g1+g2", "g1*g2", "g2*g1")]
    # g1*g2 - g2*g1 = g3 drops into degree 1
    assert span_dim_by_degree(elems, 2) == {0: 0, 1: 3, 2: 4}
