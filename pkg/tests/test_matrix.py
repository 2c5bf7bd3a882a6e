from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lwecert.matrix import (MatrixError, ModMatrix, RatMatrix, SingularMatrixError, matrix_from_json,
                            matrix_to_json, parse_rational)


def test_modmatrix_reduces_entries():
    A = ModMatrix.from_rows([[7, -1], [5, 10]], 5)
    assert A.entries == ((2, 4), (0, 0))


def test_modmatrix_rejects_small_modulus():
    with pytest.raises(MatrixError):
        ModMatrix.from_rows([[1]], 1)


def test_ratmatrix_inverse():
    M = RatMatrix.from_rows([[2, 1], [1, 1]])
    assert M @ M.inverse() == RatMatrix.identity(2)


def test_singular_inverse_rejected():
    with pytest.raises(SingularMatrixError):
        RatMatrix.from_rows([[1, 2], [2, 4]]).inverse()


def test_json_round_trip():
    M = RatMatrix.from_rows([[Fraction(1, 2), -3], [0, Fraction(-7, 9)]])
    d = matrix_to_json(M)
    assert d["entries"] == ["1/2", -3, 0, "-7/9"]
    assert matrix_from_json(d) == M
    A = ModMatrix.from_rows([[1, 2, 3]], 7)
    assert matrix_from_json(matrix_to_json(A)) == A


@pytest.mark.parametrize("bad", ["2/4", "1/-2", "1/0"])
def test_json_rejects_unreduced_or_negative_denominator(bad):
    with pytest.raises(MatrixError):
        matrix_from_json({"rows": 1, "cols": 1, "entries": [bad]})


def test_json_rejects_out_of_range_modular_entry():
    with pytest.raises(MatrixError):
        matrix_from_json({"rows": 1, "cols": 1, "modulus": 5, "entries": [5]})


def test_parse_rational_rejects_decimals():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    with pytest.raises(MatrixError):
        parse_rational("0.5")


small = st.integers(-9, 9)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=2, max_size=2),
       st.lists(st.lists(small, min_size=2, max_size=2), min_size=3, max_size=3))
def test_transpose_of_product(a, b):
    A, B = RatMatrix.from_rows(a), RatMatrix.from_rows(b)
    assert (A @ B).transpose() == B.transpose() @ A.transpose()
