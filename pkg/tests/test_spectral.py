"""Certified curvature-operator spectra (small cases; n >= 4 in acceptance)."""

import random
from fractions import Fraction

import pytest

from einconn import tensors as tn
from einconn.spectral import (eigvec_witness, expected_real_form_table,
                              expected_table, float_spectrum, iota_tensors,
                              spectrum, spectrum_csv_rows)

from conftest import algebra, algebra_float


def test_expected_tables():
    assert expected_table(2) == [(Fraction(-1), 5), (Fraction(2), 1)]
    assert expected_table(3) == [(Fraction(-2, 3), 27), (Fraction(1), 8),
                                 (Fraction(2), 1)]
    assert expected_table(4) == [(Fraction(-1, 2), 84), (Fraction(1, 2), 20),
                                 (Fraction(1), 15), (Fraction(2), 1)]
    assert expected_table(5) == [(Fraction(-2, 5), 200), (Fraction(2, 5), 75),
                                 (Fraction(1), 24), (Fraction(2), 1)]
    # multiplicities fill dim T = m(m+1)/2 with m = n^2 - 1
    for n in (2, 3, 4, 5, 6):
        m = n * n - 1
        assert sum(mult for _, mult in expected_table(n)) == m * (m + 1) // 2
    assert expected_real_form_table(3) == [
        (Fraction(-2, 3), 54), (Fraction(1), 16), (Fraction(2), 2),
        (Fraction(0), 64)]


def test_spectrum_sl2(sl2r):
    rep = spectrum(sl2r)
    assert rep.entries == [(Fraction(-1), 5), (Fraction(2), 1)]
    assert rep.complete and rep.diagonalizable


def test_spectrum_sl3(sl3r):
    rep = spectrum(sl3r)
    assert rep.entries == expected_table(3)
    assert rep.complete and rep.diagonalizable
    rows = spectrum_csv_rows(rep)
    assert rows == [("sl(3,R)", "-2/3", 27), ("sl(3,R)", "1", 8),
                    ("sl(3,R)", "2", 1)]


def test_spectrum_su21(su21):
    rep = spectrum(su21)
    assert rep.entries == expected_table(3)
    assert rep.complete


def test_float_spectrum_cross_check():
    algf = algebra_float("sl_r", 3)
    clusters = float_spectrum(algf)
    assert [(round(ev, 9), mult) for ev, mult in clusters] == \
        [(-round(2 / 3, 9), 27), (1.0, 8), (2.0, 1)]


def test_eigvec_witnesses(sl3r, sl4r):
    rng = random.Random(31)
    for alg in (sl3r, sl4r):
        a = alg.uncoords(tn.random_vector(alg, rng))
        b = alg.uncoords(tn.random_vector(alg, rng))
        w = eigvec_witness(alg, a, b)  # raises unless exact eigenvectors
        assert "iota-" in w and "tau_e" in w and "beta" in w
    # at n = 3 the plus-family is identically zero (multiplicity d+ = 0)
    a = sl3r.uncoords(tn.random_vector(sl3r, rng))
    io = iota_tensors(sl3r, a)
    assert tn.is_zero_exact(io["+"])


def test_tau_norm_identity(sl3r, sl4r):
    """n <tau_a,tau_a> = 2 eps^2 (n^2-4) (a,a) on random elements."""
    rng = random.Random(32)
    from einconn.algebras import inner
    for alg in (sl3r, sl4r):
        for _ in range(5):
            a = alg.uncoords(tn.random_vector(alg, rng))
            ta = tn.tau_tensor(alg, a)
            lhs = alg.n * tn.inner_T(alg, ta, ta)
            aa = alg.f_scalar(alg.eps * alg.eps * inner(a, a))
            assert lhs == 2 * (alg.n ** 2 - 4) * aa


def test_tau_injective_rank(sl3r):
    """a -> tau_a is injective onto Ker(Omega - Id) for n >= 3."""
    from einconn.numeric import DenseMatrix, rank
    cols = tn.tau_kernel_matrix(sl3r)
    dimT = len(cols[0])
    rows = [[cols[c][r] for c in range(sl3r.m)] for r in range(dimT)]
    assert rank(DenseMatrix.from_rows(rows)) == sl3r.m


def test_eigenspaces_orthogonal_nondegenerate(sl3r):
    """Pairwise inner_T-orthogonality and nondegeneracy of the eigenspaces."""
    from einconn.numeric import DenseMatrix, kernel_basis, rank
    OM = tn.omega_matrix(sl3r)
    dimT = len(OM)
    spaces = {}
    for lam, mult in expected_table(3):
        rows = [[OM[r][c] - (lam if r == c else 0) for c in range(dimT)]
                for r in range(dimT)]
        kb = kernel_basis(DenseMatrix.from_rows(rows))
        assert len(kb) == mult
        spaces[lam] = kb
    # Ker(Omega - 2 Id) is spanned by beta
    bvec = tn.sym_vec(sl3r, tn.beta_sym(sl3r))
    kb2 = spaces[Fraction(2)]
    assert len(kb2) == 1
    # proportionality
    ratio = None
    for x, y in zip(kb2[0], bvec):
        if y:
            ratio = x / y
            break
    assert all(x == ratio * y for x, y in zip(kb2[0], bvec))
    # orthogonality and nondegeneracy via Gram matrices
    def unvec(v):
        return tn.sym_unvec(sl3r, v)
    lams = list(spaces)
    for i, l1 in enumerate(lams):
        for l2 in lams[i:]:
            G = [[tn.inner_T(sl3r, unvec(x), unvec(y))
                  for y in spaces[l2]] for x in spaces[l1]]
            if l1 == l2:
                assert rank(DenseMatrix.from_rows(G)) == len(spaces[l1])
            else:
                assert all(not v for row in G for v in row)


def test_real_form_spectrum_small(sl3c_real):
    from einconn.spectral import real_form_spectrum
    rep = real_form_spectrum(sl3c_real)
    assert rep.entries == expected_real_form_table(3)
    assert rep.complete and rep.diagonalizable
    assert sum(m for _, m in rep.entries) == 136
    # the 2-eigenspace is the image of F beta under Re and Re(i beta)
    from einconn.numeric import DenseMatrix, kernel_basis
    OM = tn.omega_matrix(sl3c_real)
    dimT = len(OM)
    rows = [[OM[r][c] - (2 if r == c else 0) for c in range(dimT)]
            for r in range(dimT)]
    kb = kernel_basis(DenseMatrix.from_rows(rows))
    assert len(kb) == 2
    from einconn.families import realify_sym
    from conftest import algebra
    sl3c = algebra("sl_c", 3, eps="1")
    re_b = realify_sym(sl3c, sl3c_real, tn.beta_sym(sl3c), scale=1)
    v1 = tn.sym_vec(sl3c_real, re_b)
    from einconn.numeric import QQi
    ib = tn.sym_scale(tn.beta_sym(sl3c), QQi(0, 1))
    re_ib = realify_sym(sl3c, sl3c_real, ib, scale=1)
    v2 = tn.sym_vec(sl3c_real, re_ib)
    # both witnesses lie in the kernel: (Omega - 2) v = 0
    for v in (v1, v2):
        img = [sum((OM[r][c] * v[c] for c in range(dimT) if v[c]),
                   sl3c_real.f_zero()) for r in range(dimT)]
        assert all(img[r] == 2 * v[r] for r in range(dimT))


def test_spectrum_requires_exact(sl3r):
    with pytest.raises(ValueError):
        spectrum(algebra_float("sl_r", 3))
