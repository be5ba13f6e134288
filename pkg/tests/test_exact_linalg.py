from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from invpenrose.coeff_ring import Polynomial, X, layout
from invpenrose.exact_linalg import SingularMatrixError, bareiss_inverse, matmul, nullspace, rank, solve_rows

L = layout(2)


def c(x):
    return (mpq(x), mpq(0))


def test_bareiss_inverse_polynomial_matrix():
    x = Polynomial.var(L, X(1))
    one = Polynomial.const(L, 1)
    m = [[one, x], [x, one + x * x + x * x]]
    d, adj = bareiss_inverse(m)
    prod = matmul(m, adj)
    zero = Polynomial.zero(L)
    assert prod == [[d, zero], [zero, d]]
    assert d == one + x * x


def test_singular_matrix():
    one = Polynomial.const(L, 1)
    with pytest.raises(SingularMatrixError):
        bareiss_inverse([[one, one], [one, one]])


def test_rank_and_nullspace():
    rows = [{0: c(1), 1: c(2)}, {0: c(2), 1: c(4)}, {2: c(1)}]
    assert rank(rows) == 2
    ns = nullspace(rows, 3)
    assert len(ns) == 1
    v = ns[0]
    for r in rows:
        acc = sum((Fraction(r[k][0]) * Fraction(v.get(k, c(0))[0]) for k in r), Fraction(0))
        assert acc == 0


def test_solve_rows_inconsistent():
    rows = [{0: c(1)}, {0: c(1)}]
    assert solve_rows(rows, [c(1), c(2)], 1) is None
    assert solve_rows(rows, [c(3), c(3)], 1) == {0: c(3)}


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=4))
@settings(max_examples=100, deadline=None)
def test_rank_nullity(matrix):
    rows = [{j: c(x) for j, x in enumerate(r) if x} for r in matrix]
    assert rank(rows) + len(nullspace(rows, 3)) == 3
