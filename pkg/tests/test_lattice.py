from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from lwecert.lattice import (BoundTooSmallError, LatticeBasis, ResourceLimitError, centered_rep,
                             dual_basis, in_qary_lattice, inner_product, is_full_rank_mod_q,
                             lambda1_enum, lambda1_qary_via_modular, left_inverse_mod_q, lll_reduce,
                             norm_sq, qary_basis, successive_minima_enum)
from lwecert.matrix import MatrixError, ModMatrix, RatMatrix, SingularMatrixError, rat_rank
from lwecert.owf import uniform_matrix


def box_sets(A: ModMatrix):
    """Points of [-q, q]^m in L(qary_basis(A)) and in Delta_q(A)."""
    q, m = A.q, A.rows
    Binv = qary_basis(A).inverse()
    in_basis, in_qary = set(), set()
    for x in product(range(-q, q + 1), repeat=m):
        coeffs = [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in Binv.entries]
        if all(c.denominator == 1 for c in coeffs):
            in_basis.add(x)
        if in_qary_lattice(x, A):
            in_qary.add(x)
    return in_basis, in_qary


# -- centered_rep --------------------------------------------------------------

@pytest.mark.parametrize("x,q,expected", [((6, 1), 5, (1, 1)), ((0, 0), 7, (0, 0)),
                                          ((4, 3), 5, (-1, -2)), ((2, 3), 4, (2, -1))])
def test_centered_rep_examples(x, q, expected):
    assert centered_rep(x, q) == expected


@pytest.mark.parametrize("q", range(2, 12))
def test_centered_rep_is_norm_minimal(q):
    half = q // 2
    for x in range(-2 * q, 2 * q):
        (c,) = centered_rep((x,), q)
        reps = [y for y in range(-half, half + 1) if (y - x) % q == 0]
        assert c in reps and abs(c) == min(abs(y) for y in reps)
        assert centered_rep((c,), q) == (c,)


# -- left inverse --------------------------------------------------------------

def test_left_inverse_identity():
    assert left_inverse_mod_q(ModMatrix.identity(3, 5)) == ModMatrix.identity(3, 5)


def test_left_inverse_zero_divisor_absent():
    assert left_inverse_mod_q(ModMatrix.from_rows([[2]], 4)) is None


def test_left_inverse_random(rng):
    found = 0
    for _ in range(40):
        A = uniform_matrix(2, 4, 7, rng)
        L = left_inverse_mod_q(A)
        assert (L is not None) == is_full_rank_mod_q(A)
        if L is not None:
            found += 1
            assert L @ A == ModMatrix.identity(2, 7)
    assert found > 30


def test_left_inverse_exhaustive_oracle():
    # q = 3, n = 1: a left inverse is any row l with <l, a> = 1
    for col in product(range(3), repeat=3):
        A = ModMatrix.from_rows([[c] for c in col], 3)
        exists = any(sum(l * c for l, c in zip(row, col)) % 3 == 1 for row in product(range(3), repeat=3))
        assert (left_inverse_mod_q(A) is not None) == exists


@pytest.mark.parametrize("q", [4, 6, 12])
def test_left_inverse_composite_modulus(rng, q):
    for _ in range(30):
        A = uniform_matrix(2, 3, q, rng)
        L = left_inverse_mod_q(A)
        if L is not None:
            assert L @ A == ModMatrix.identity(2, q)


# -- dual basis ----------------------------------------------------------------

def test_dual_basis_examples():
    assert dual_basis(RatMatrix.identity(2)) == RatMatrix.identity(2)
    assert dual_basis(RatMatrix.from_rows([[2]])) == RatMatrix.from_rows([[Fraction(1, 2)]])
    B = RatMatrix.from_columns([(1, 0, 1), (0, 1, 1)])
    D = dual_basis(B)
    assert B.transpose() @ D == RatMatrix.identity(2)
    for i, b in enumerate(B.columns()):
        for j, d in enumerate(D.columns()):
            assert inner_product(b, d) == (i == j)


def test_dual_basis_dependent_columns():
    with pytest.raises(SingularMatrixError):
        dual_basis(RatMatrix.from_columns([(1, 2), (2, 4)]))


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.integers(n, 5).flatmap(
    lambda m: st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=m, max_size=m))))
def test_dual_basis_identity_property(rows):
    B = RatMatrix.from_rows(rows)
    if rat_rank(B.columns()) < B.cols:
        return
    assert B.transpose() @ dual_basis(B) == RatMatrix.identity(B.cols)


# -- q-ary basis ---------------------------------------------------------------

def test_qary_basis_examples():
    assert qary_basis(ModMatrix.identity(2, 5)) == RatMatrix.identity(2)
    assert qary_basis(ModMatrix.from_rows([[1], [0]], 5)) == RatMatrix.from_rows([[1, 0], [0, 5]])


def test_qary_basis_rank_deficient():
    with pytest.raises(ValueError):
        qary_basis(ModMatrix.from_rows([[0], [0]], 5))


def test_qary_basis_point_sets(rng):
    checked = 0
    while checked < 3:
        A = uniform_matrix(2, 3, 3, rng)
        if not is_full_rank_mod_q(A):
            continue
        a, b = box_sets(A)
        assert a == b
        checked += 1


def test_qary_basis_permuted_pivot():
    # first row is zero, so the pivot row set is not the leading one
    A = ModMatrix.from_rows([[0], [2], [1]], 5)
    a, b = box_sets(A)
    assert a == b


def test_qary_basis_without_unit_minor():
    # (2, 3) is unimodular mod 6 although neither entry is a unit
    A = ModMatrix.from_rows([[2], [3]], 6)
    assert is_full_rank_mod_q(A)
    a, b = box_sets(A)
    assert a == b
    assert qary_basis(A).is_integral()


# -- enumeration ---------------------------------------------------------------

def test_lambda1_unit_lattice():
    r = lambda1_enum(LatticeBasis.integer(RatMatrix.identity(2)), 4)
    assert r.length_squared == 1 and r.witness == (1, 0)


def test_lambda1_modular_example():
    r = lambda1_enum(LatticeBasis.modular(ModMatrix.from_rows([[2], [1]], 5)), 25)
    assert r.length_squared == 5


def test_lambda1_qary_capped_at_q():
    # every nonzero multiple of the all-ones vector has squared length 10 > 9
    A = ModMatrix.from_rows([[1]] * 10, 3)
    assert lambda1_enum(LatticeBasis.qary(A), 9).length_squared == 9
    assert lambda1_qary_via_modular(A) == 9


def test_lambda1_qary_matches_modular(rng):
    for _ in range(20):
        A = uniform_matrix(1, 3, 7, rng)
        if is_full_rank_mod_q(A):
            direct = lambda1_enum(LatticeBasis.qary(A), 49).length_squared
            assert direct == lambda1_qary_via_modular(A)


def test_lambda1_bound_too_small():
    with pytest.raises(BoundTooSmallError):
        lambda1_enum(LatticeBasis.integer(RatMatrix.from_rows([[3]])), 8)


def test_resource_limit_is_explicit():
    A = ModMatrix.from_rows([[1, 2, 3]] * 4, 101)
    with pytest.raises(ResourceLimitError):
        lambda1_enum(LatticeBasis.modular(A), 10, max_nodes=1000)


def test_successive_minima_examples():
    rs = successive_minima_enum(LatticeBasis.integer(RatMatrix.identity(2)), 2, 4)
    assert [(r.length_squared, r.witness) for r in rs] == [(1, (1, 0)), (1, (0, 1))]
    rs = successive_minima_enum(LatticeBasis.integer(RatMatrix.from_rows([[1, 0], [0, 3]])), 2, 9)
    assert [r.length_squared for r in rs] == [1, 9]


def test_successive_minima_of_dual_are_independent(rng):
    done = 0
    while done < 5:
        A = uniform_matrix(1, 3, 5, rng)
        if not is_full_rank_mod_q(A):
            continue
        D = dual_basis(qary_basis(A))
        rs = successive_minima_enum(LatticeBasis.integer(D), 3, 1)
        assert rat_rank([r.witness for r in rs]) == 3
        assert [r.length_squared for r in rs] == sorted(r.length_squared for r in rs)
        for r in rs:
            assert norm_sq(r.witness) == r.length_squared
            # dual membership against the generators of Delta_q(A)
            assert all(inner_product(a, r.witness).denominator == 1 for a in A.columns())
            assert all((5 * x).denominator == 1 for x in r.witness)
        done += 1


def test_lll_preserves_lattice():
    B = RatMatrix.from_columns([(1, 0, 0), (7, 1, 0), (13, 5, 1)])
    R, U = lll_reduce(B)
    assert B @ RatMatrix.from_rows(U) == R
    assert RatMatrix.from_rows(U).inverse().is_integral()


# -- inner product -------------------------------------------------------------

def test_inner_product_examples():
    assert inner_product((1, 0), (0, 1)) == 0
    assert inner_product((Fraction(1, 2), Fraction(1, 3)), (2, 3)) == 2
    with pytest.raises(MatrixError):
        inner_product((1,), (1, 2))


@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
def test_inner_product_is_transpose_product(u, v):
    U, V = RatMatrix.from_columns([u]), RatMatrix.from_columns([v])
    assert (U.transpose() @ V).entries[0][0] == inner_product(u, v)
