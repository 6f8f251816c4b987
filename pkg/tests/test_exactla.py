from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opentcft.exactla import (QuotientCoordinates, SparseMatrix, SubspaceNotContained, format_rational,
                              kernel_basis, parse_rational, quotient_dim, rank, rref_rows)

small = st.integers(-3, 3).map(Fraction)


@st.composite
def matrices(draw, max_rows=7, max_cols=7):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    rows = [[draw(small) for _ in range(c)] for _ in range(r)]
    return SparseMatrix.from_dense(rows) if r and c else SparseMatrix(r, c)


def dense_rank(rows):
    # textbook elimination on a copy, used as an independent oracle
    m = [list(r) for r in rows]
    rk, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(rk, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[rk], m[p] = m[p], m[rk]
        for i in range(len(m)):
            if i != rk and m[i][c]:
                f = m[i][c] / m[rk][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rk])]
        rk += 1
    return rk


def test_parse_rational():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational(" 4 ") == 4
    assert parse_rational(7) == 7
    with pytest.raises(ValueError):
        parse_rational("1/0")
    with pytest.raises(ValueError):
        parse_rational(True)
    assert format_rational(Fraction(-2, 4)) == "-1/2"
    assert format_rational(Fraction(3)) == "3"


def test_rank_of_known_matrices():
    assert rank(SparseMatrix.identity(4)) == 4
    assert rank(SparseMatrix(3, 5)) == 0
    assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1
    assert rank(SparseMatrix.from_dense([[1, 2, 3], [4, 5, 6], [7, 8, 9]])) == 2


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_nullity_and_kernel(m):
    r = rank(m)
    ker = kernel_basis(m)
    assert r + len(ker) == m.cols
    assert r == rank(m.transpose())
    if m.rows and m.cols:
        assert r == dense_rank(m.to_dense())
    for v in ker:
        assert not m.apply(v)
    if ker:
        assert rank(SparseMatrix.from_columns(m.cols, ker)) == len(ker)


@st.composite
def composable_pair(draw):
    n, k, m = (draw(st.integers(1, 5)) for _ in range(3))
    a = SparseMatrix.from_dense([[draw(small) for _ in range(k)] for _ in range(n)])
    b = SparseMatrix.from_dense([[draw(small) for _ in range(m)] for _ in range(k)])
    return a, b


@settings(max_examples=200, deadline=None)
@given(composable_pair())
def test_product_rank_bound(pair):
    a, b = pair
    assert rank(a @ b) <= min(rank(a), rank(b))
    assert rank(a) + rank(b) - b.rows <= rank(a @ b)  # Sylvester


@settings(max_examples=100, deadline=None)
@given(matrices(6, 6))
def test_rref_pivots(m):
    rows, piv = rref_rows(m)
    assert len(rows) == len(piv) == rank(m)
    for row, p in zip(rows, piv):
        assert row[p] == 1
        assert all(p == q or q not in row for q in piv)


def test_quotient_dim_and_coordinates():
    big = SparseMatrix.from_dense([[1, 0, 1], [0, 1, 1], [0, 0, 0]])
    sub = SparseMatrix.from_dense([[1], [1], [0]])
    assert quotient_dim(big, sub) == 1
    with pytest.raises(SubspaceNotContained):
        quotient_dim(sub, SparseMatrix.from_dense([[1], [0], [0]]))
    qc = QuotientCoordinates(3, [{0: 1}, {1: 1}], [{0: 1, 1: 1}])
    assert qc.dim == 1
    # e0 and -e1 agree modulo e0 + e1
    assert qc.coords({0: 1}) == [-x for x in qc.coords({1: 1})]
    assert qc.coords({0: 1, 1: 1}) == [0]


def test_sparse_arithmetic():
    a = SparseMatrix.from_dense([[1, 2], [0, 1]])
    assert (a - a).is_zero()
    assert (a @ SparseMatrix.identity(2)) == a
    assert (-a).scale(-1) == a
    assert sorted(a.entries()) == [(0, 0, 1), (0, 1, 2), (1, 1, 1)]
