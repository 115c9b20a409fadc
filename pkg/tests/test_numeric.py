"""Numeric kernel: exact scalars and the rank/kernel/solve primitives."""

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from einconn.numeric import (DenseMatrix, IncrementalRankModP, QQi,
                             PresolvedSystem, hermitian_signature,
                             kernel_basis, rank, rank_mod_p, solve_linear)


def test_qqi_field_ops():
    a = QQi(Fraction(1, 2), Fraction(-3))
    b = QQi(2, 5)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a * QQi(1) == a
    assert (QQi.i() * QQi.i()) == QQi(-1)
    assert a.conj().conj() == a
    with pytest.raises(ZeroDivisionError):
        a / QQi(0)


def test_rank_identity_and_zero():
    assert rank(DenseMatrix.from_rows([[1, 0], [0, 1]])) == 2
    assert rank(DenseMatrix.from_rows([[0, 0], [0, 0]])) == 0
    assert rank(DenseMatrix.from_rows([[Fraction(1), Fraction(2)],
                                       [Fraction(2), Fraction(4)]])) == 1


def test_kernel_examples():
    assert kernel_basis(DenseMatrix.from_rows([[1, 0], [0, 1]])) == []
    z3 = DenseMatrix.from_rows([[Fraction(0)] * 3 for _ in range(3)])
    assert len(kernel_basis(z3)) == 3
    kb = kernel_basis(DenseMatrix.from_rows([[Fraction(1), Fraction(1)]]))
    assert len(kb) == 1
    v = kb[0]
    assert v[0] == -v[1] and v[1] != 0


def test_solve_examples():
    M = DenseMatrix.from_rows([[Fraction(1), Fraction(0)],
                               [Fraction(0), Fraction(1)]])
    assert solve_linear(M, [Fraction(5), Fraction(-2)]) == [5, -2]
    # first-pivot convention
    assert solve_linear(DenseMatrix.from_rows([[Fraction(1), Fraction(1)]]),
                        [Fraction(2)]) == [2, 0]
    assert solve_linear(DenseMatrix.from_rows([[Fraction(1)], [Fraction(1)]]),
                        [Fraction(1), Fraction(2)]) is None


@st.composite
def small_matrix(draw):
    r = draw(st.integers(1, 5))
    c = draw(st.integers(1, 5))
    ent = st.fractions(min_value=-3, max_value=3, max_denominator=3)
    rows = [[draw(ent) for _ in range(c)] for _ in range(r)]
    return DenseMatrix.from_rows(rows)


@given(small_matrix())
@settings(max_examples=60, deadline=None)
def test_rank_plus_nullity(M):
    assert rank(M) + len(kernel_basis(M)) == M.cols
    for v in kernel_basis(M):
        for i in range(M.rows):
            assert sum(M.at(i, k) * v[k] for k in range(M.cols)) == 0


@given(small_matrix(), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_rank_permutation_invariant(M, rnd):
    rows = [list(M.row(i)) for i in range(M.rows)]
    rnd.shuffle(rows)
    cols = list(range(M.cols))
    rnd.shuffle(cols)
    per = [[row[c] for c in cols] for row in rows]
    assert rank(DenseMatrix.from_rows(per)) == rank(M)


@given(small_matrix(), st.data())
@settings(max_examples=40, deadline=None)
def test_solve_consistency(M, data):
    x0 = [data.draw(st.fractions(min_value=-2, max_value=2, max_denominator=2))
          for _ in range(M.cols)]
    b = [sum(M.at(i, k) * x0[k] for k in range(M.cols))
         for i in range(M.rows)]
    x = solve_linear(M, b)
    assert x is not None
    for i in range(M.rows):
        assert sum(M.at(i, k) * x[k] for k in range(M.cols)) == b[i]


def test_float_rank_and_kernel():
    M = DenseMatrix.from_rows([[1.0, 2.0], [2.0, 4.0]])
    assert rank(M) == 1
    kb = kernel_basis(M)
    assert len(kb) == 1
    A = M.to_numpy()
    v = np.array(kb[0])
    assert np.abs(A @ v).max() < 1e-9
    assert solve_linear(DenseMatrix.from_rows([[1.0], [1.0]]), [1.0, 2.0]) is None


def test_presolved_system_matches_solve_linear():
    rng = random.Random(3)
    rows = [[Fraction(rng.randint(-3, 3)) for _ in range(5)] for _ in range(3)]
    M = DenseMatrix.from_rows(rows)
    ps = PresolvedSystem(M)
    for _ in range(5):
        b = [Fraction(rng.randint(-3, 3)) for _ in range(3)]
        assert ps.solve(b) == solve_linear(M, b)


def test_rank_mod_p_bounds():
    rows = [[2, 4], [1, 2]]
    assert rank_mod_p(rows) == 1
    tr = IncrementalRankModP()
    assert tr.add([1, 0, 0])
    assert not tr.add([2, 0, 0])
    assert tr.add([0, 3, 0])
    assert tr.rank == 2


def test_hermitian_signature():
    B = [[QQi(2), QQi(0)], [QQi(0), QQi(-3)]]
    assert hermitian_signature(B) == (1, 1, 0)
    B = [[QQi(0), QQi(0, 1)], [QQi(0, -1), QQi(0)]]
    # eigenvalues +-1
    assert hermitian_signature(B) == (1, 1, 0)
    B = [[QQi(0), QQi(0)], [QQi(0), QQi(0)]]
    assert hermitian_signature(B) == (0, 0, 2)
    with pytest.raises(ValueError):
        hermitian_signature([[QQi(0, 1)]])
