"""The displayed-identity suite runner and its one-off helpers."""

import random

import numpy as np
import pytest

from einconn import tensors as tn
from einconn.identities import (ad_invariance_check, delta_kernel_dimension,
                                delta_matrix_float, jacobi_check,
                                run_identity_suite)

from conftest import algebra, algebra_float


@pytest.mark.parametrize("kind,n,l,j,eps", [
    ("sl_r", 3, None, None, "1"),
    ("su", 3, 2, 1, "i"),
    ("sl_c", 3, None, None, "i"),
])
def test_suite_exact(kind, n, l, j, eps):
    alg = algebra(kind, n, l, j, eps)
    rng = random.Random(61)
    rep = run_identity_suite(alg, 3, rng)
    assert rep.passed, [d[0] for d in rep.details if not d[1]]


def test_suite_float_n4():
    algf = algebra_float("sl_r", 4)
    rng = random.Random(62)
    rep = run_identity_suite(algf, 3, rng)
    assert rep.passed, [d[0] for d in rep.details if not d[1]]
    non_fd = [d for d in rep.details if "dhz" not in d[0]]
    assert max(d[2] for d in non_fd) < 1e-9


def test_jacobi_and_ad_invariance(sl3r, sl2h):
    assert jacobi_check(sl3r)
    assert jacobi_check(sl2h)
    assert jacobi_check(algebra_float("sl_r", 4))
    rng = random.Random(63)
    ok, worst = ad_invariance_check(sl3r, 10, rng, 1e-9)
    assert ok


def test_delta_kernel_dimension_exact(sl3r):
    assert delta_kernel_dimension(sl3r) == sl3r.m


def test_delta_kernel_dimension_float():
    algf = algebra_float("sl_r", 4)
    assert delta_kernel_dimension(algf) == algf.m


def test_delta_matrix_float_matches_direct():
    """The batched Delta matrix assembly agrees with per-element evaluation."""
    algf = algebra_float("sl_r", 3)
    M = delta_matrix_float(algf)
    m = algf.m
    pairs = [(j, k) for j in range(m) for k in range(j, m)]
    rng = random.Random(64)
    for _ in range(4):
        j, k = pairs[rng.randrange(len(pairs))]
        l = rng.randrange(m)
        S = np.zeros((m, m, m))
        S[j, k, l] = 1.0
        S[k, j, l] = 1.0
        dS = tn.delta(algf, S)
        vec = np.concatenate([dS[a, b] for (a, b) in pairs])
        col = pairs.index((j, k)) * m + l
        assert np.abs(M[:, col] - vec).max() < 1e-12


def test_fd_jacobian_of_H_is_delta():
    """Finite differences of the weakly-Einstein map at 0 reproduce Delta."""
    algf = algebra_float("sl_r", 3)
    rng = random.Random(65)
    S = tn.random_sym_conn(algf, rng)
    step = 1e-4
    fd = (tn.weakly_einstein_residual(algf, step * S)
          - tn.weakly_einstein_residual(algf, -step * S)) / (2 * step)
    assert tn.residual(fd, tn.delta(algf, S)) < 1e-6
