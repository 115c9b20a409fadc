"""Family tensors, multiplication tables, the Einstein family, the general
weakly-Einstein construction, the non-Einstein example, recovery, holomorphy."""

import random
from fractions import Fraction

import numpy as np
import pytest

from einconn import families as fam
from einconn import nilpotents as nil
from einconn import tensors as tn
from einconn.algebras import (bracket, inner, mat_mul, mat_scale, mat_sub,
                              _eij, _mat)
from einconn.numeric import QQi
from einconn.quadric import Nonuple, base_solution, non_einstein_nonuple

from conftest import algebra, algebra_float


def test_family_tensors_zero(sl3r):
    f = fam.family_tensors(sl3r, _mat(3))
    assert tn.is_zero_exact(f.tau)
    assert tn.is_zero_exact(f.theta)
    assert tn.is_zero_exact(f.mu)
    assert f.xi == 0


def test_family_membership_rejected(sl3r):
    bad = _mat(3)
    bad[0][0] = QQi(1)  # nonzero trace
    with pytest.raises(ValueError):
        fam.family_tensors(sl3r, bad)


def test_n2_degeneration(sl2r):
    """At n = 2: tau_a = 0 and 2 theta_{a,b} = mu_{a,b} + eps^2 (a,b) beta/2."""
    rng = random.Random(41)
    for _ in range(5):
        a = sl2r.uncoords(tn.random_vector(sl2r, rng))
        b = sl2r.uncoords(tn.random_vector(sl2r, rng))
        assert tn.is_zero_exact(tn.tau_tensor(sl2r, a))
        th = tn.theta_tensor(sl2r, a, b)
        mu = tn.mu_tensor(sl2r, a, b)
        ab = sl2r.f_scalar(sl2r.eps * sl2r.eps * inner(a, b))
        rhs = tn.sym_add(mu, tn.sym_scale(tn.beta_sym(sl2r),
                                          ab * Fraction(1, 2)))
        assert tn.tensors_equal(sl2r, tn.sym_scale(th, 2), rhs)


def test_theta_mu_bilinear_symmetric(sl3r):
    rng = random.Random(42)
    a = sl3r.uncoords(tn.random_vector(sl3r, rng))
    b = sl3r.uncoords(tn.random_vector(sl3r, rng))
    assert tn.tensors_equal(sl3r, tn.theta_tensor(sl3r, a, b),
                            tn.theta_tensor(sl3r, b, a))
    assert tn.tensors_equal(sl3r, tn.mu_tensor(sl3r, a, b),
                            tn.mu_tensor(sl3r, b, a))
    two_a = mat_scale(a, QQi(2))
    assert tn.tensors_equal(sl3r, tn.theta_tensor(sl3r, two_a, b),
                            tn.sym_scale(tn.theta_tensor(sl3r, a, b), 2))


@pytest.mark.parametrize("kind,n,l,j,eps,trials", [
    ("sl_r", 3, None, None, "1", 4),
    ("sl_c", 3, None, None, "1", 3),
    ("sl_c", 3, None, None, "i", 3),
    ("su", 3, 2, 1, "i", 4),
    ("sl_h", 4, None, None, "1", 2),
])
def test_multiplication_tables_exact(kind, n, l, j, eps, trials):
    alg = algebra(kind, n, l, j, eps)
    rng = random.Random(43)
    rep = fam.check_multiplication_tables(alg, trials, rng)
    assert rep.passed, [d[0] for d in rep.details if not d[1]]


def test_multiplication_tables_float():
    algf = algebra_float("sl_r", 4)
    rng = random.Random(44)
    rep = fam.check_multiplication_tables(algf, 5, rng)
    assert rep.passed, [d[0] for d in rep.details if not d[1]]
    assert rep.max_residual < 1e-9


def test_eta_examples(sl3r):
    assert tn.is_zero_exact(fam.eta_tensor(sl3r, _mat(3)))
    # n = 3 coefficients: eta = tau - 36/5 theta + 13/5 mu
    rng = random.Random(45)
    a = sl3r.uncoords(tn.random_vector(sl3r, rng))
    eta = fam.eta_tensor(sl3r, a)
    want = tn.sym_add(
        tn.sym_sub(tn.tau_tensor(sl3r, a),
                   tn.sym_scale(tn.theta_tensor(sl3r, a), Fraction(36, 5))),
        tn.sym_scale(tn.mu_tensor(sl3r, a), Fraction(13, 5)))
    assert tn.tensors_equal(sl3r, eta, want)
    # square-zero a: Pi eta_a = tau_a
    a = _eij(3, 0, 2)
    pl, t, _ = tn.project_ker_T(sl3r, fam.eta_tensor(sl3r, a))
    assert tn.tensors_equal(sl3r, pl, tn.tau_tensor(sl3r, a))


def test_build_lambda_psi(sl3r):
    a = _eij(3, 0, 2)
    v = base_solution(3)
    lam, psi = fam.build_lambda_psi(sl3r, a, v)
    eta = fam.eta_tensor(sl3r, a)
    assert tn.tensors_equal(sl3r, lam, eta)
    assert tn.tensors_equal(sl3r, psi, tn.sym_scale(eta, -1))
    zero = Nonuple(*[Fraction(0)] * 9)
    lam0, psi0 = fam.build_lambda_psi(sl3r, a, zero)
    assert tn.is_zero_exact(lam0) and tn.is_zero_exact(psi0)
    xonly = zero.replace(x=Fraction(1))
    lam1, _ = fam.build_lambda_psi(sl3r, a, xonly)
    assert tn.tensors_equal(sl3r, lam1, tn.tau_tensor(sl3r, a))


@pytest.mark.parametrize("kind,n,l,j,eps", [
    ("sl_r", 3, None, None, "1"),
    ("sl_c", 3, None, None, "i"),
    ("su", 3, 2, 1, "i"),
    ("sl_h", 4, None, None, "1"),
])
def test_einstein_family_all_labels(kind, n, l, j, eps):
    alg = algebra(kind, n, l, j, eps)
    for lab in nil.enumerate_orbits(alg):
        a = nil.canonical_nilpotent(alg, lab)
        nab, rep = fam.einstein_from_nilpotent(alg, a)
        assert rep.passed(), (lab, {k: v for k, v in rep.flags.items() if not v})


def test_einstein_rejects_non_nilpotent(sl3r):
    a = _mat(3)
    a[0][0] = QQi(1)
    a[1][1] = QQi(-1)
    with pytest.raises(ValueError):
        fam.einstein_from_nilpotent(sl3r, a)


def test_einstein_a_zero_gives_standard(sl3r):
    nab, rep = fam.einstein_from_nilpotent(sl3r, _mat(3))
    assert rep.passed()
    D = tn.standard_connection(sl3r)
    assert tn.tensors_equal(sl3r, nab, D)
    rho = tn.ricci(sl3r, nab)
    assert tn.tensors_equal(sl3r, rho,
                            tn.sym_scale(tn.beta_sym(sl3r), Fraction(-1, 4)))


def test_eta_endo_nilpotent_for_square_zero(sl3r):
    """Sigma^3 = 0 for the endomorphism of eta_a when a^2 = 0."""
    a = _eij(3, 0, 2)
    eta = fam.eta_tensor(sl3r, a)
    mixed = tn.sym_to_endo(sl3r, eta)
    m = sl3r.m

    def matmul(A, B):
        return [[sum((A[i][k] * B[k][jj] for k in range(m)
                      if A[i][k] and B[k][jj]), sl3r.f_zero())
                 for jj in range(m)] for i in range(m)]

    sq = matmul(mixed, mixed)
    cb = matmul(sq, mixed)
    assert any(any(row) for row in sq)
    assert all(not x for row in cb for x in row)


def test_explicit_nabla_examples(sl3r):
    rng = random.Random(46)
    v = sl3r.uncoords(tn.random_vector(sl3r, rng))
    w = sl3r.uncoords(tn.random_vector(sl3r, rng))
    # a = 0: the formula collapses to [v,w]/2
    out = fam.explicit_nabla(sl3r, _mat(3), v, w)
    half_br = mat_scale(bracket(v, w), QQi(Fraction(1, 2)))
    assert all(out[i][jx] == half_br[i][jx] for i in range(3) for jx in range(3))
    # symmetry of the correction term in (v, w)
    a = _eij(3, 0, 2)
    s1 = fam.explicit_nabla(sl3r, a, v, w)
    s2 = fam.explicit_nabla(sl3r, a, w, v)
    corr = mat_sub(s1, half_br)
    corr2 = mat_sub(s2, mat_scale(bracket(w, v), QQi(Fraction(1, 2))))
    assert all(corr[i][jx] == corr2[i][jx] for i in range(3) for jx in range(3))


def test_recovery_examples(sl3r):
    D = tn.standard_connection(sl3r)
    assert fam.recover_nilpotent(sl3r, D) == sl3r.coords(_mat(3))
    a = _eij(3, 0, 2)
    a2 = mat_scale(a, QQi(2))
    eta2 = fam.eta_tensor(sl3r, a2)
    nab = tn.conn_add(D, tn.grad(sl3r, D, eta2))
    assert fam.recover_nilpotent(sl3r, nab) == sl3r.coords(a2)


def test_general_weakly_einstein_base(sl3r):
    a = _eij(3, 0, 2)
    nab, rep, psi = fam.general_weakly_einstein(sl3r, a, base_solution(3))
    assert rep.flags["einstein"]
    nab2, rep2 = fam.einstein_from_nilpotent(sl3r, a)
    assert tn.tensors_equal(sl3r, nab, nab2)


def test_general_weakly_einstein_zero(sl3r):
    # the zero nonuple satisfies everything except the normalization (iii),
    # and with a = 0 it produces exactly the standard connection
    zero = Nonuple(*[Fraction(0)] * 9)
    nab, rep, psi = fam.general_weakly_einstein(sl3r, _mat(3), zero)
    assert tn.tensors_equal(sl3r, nab, tn.standard_connection(sl3r))
    # a nonuple violating (iv) is rejected
    bad = zero.replace(y=Fraction(1))
    with pytest.raises(ValueError):
        fam.general_weakly_einstein(sl3r, _mat(3), bad)
    # the base solution also reproduces D at a = 0
    nab2, rep2, _ = fam.general_weakly_einstein(sl3r, _mat(3), base_solution(3))
    assert tn.tensors_equal(sl3r, nab2, tn.standard_connection(sl3r))


def test_ahx_precondition(sl3r):
    # base solution has xi = h = 0, so (ahx) forces a^2 = 0
    a = _mat(3)
    a[0][0] = QQi(1)
    a[1][1] = QQi(-1)
    with pytest.raises(ValueError):
        fam.general_weakly_einstein(sl3r, a, base_solution(3))


@pytest.mark.parametrize("kind,n,l,j", [
    ("sl_r", 4, None, None),
    ("sl_c", 4, None, None),
    ("su", 4, 2, 2),
    ("sl_h", 4, None, None),
])
def test_non_einstein_example(kind, n, l, j):
    algf = algebra_float(kind, n, l, j, "i" if kind == "su" else "1")
    a, v, nab, rep = fam.non_einstein_example(algf)
    assert rep.flags["weakly_einstein"]
    assert rep.flags["unimodular"]
    assert rep.flags["ricci_parallel"]
    assert rep.flags["a_in_ricci_nullspace"]
    assert not rep.flags["ricci_nondegenerate"]
    assert rep.flags["not_einstein"]
    # the nullspace witness is nonzero
    assert np.abs(np.asarray(a)).max() > 0
    # the pairing <beta, beta + psi> is nonzero (the non-flatness witness)
    assert abs(complex(rep.scalars["psi_trace_pairing"])) > 1e-6


def test_non_einstein_rejects_odd_and_exact(sl3r):
    with pytest.raises(ValueError):
        fam.non_einstein_example(algebra_float("sl_r", 3))
    with pytest.raises(ValueError):
        fam.non_einstein_example(sl3r)
    # quaternionic kind with odd k admits no parameter
    with pytest.raises(ValueError):
        fam.non_einstein_example(algebra_float("sl_h", 6))


def test_non_einstein_values_n4():
    ne = non_einstein_nonuple(4)
    assert ne.z == Fraction(-14, 15)
    assert ne.xi == Fraction(15, 196)
    algf = algebra_float("sl_r", 4)
    a, v, nab, rep = fam.non_einstein_example(algf)
    # trace expression from the closing computation: 15 - 17/15 = 208/15
    assert abs(rep.scalars["trace_z_expression"] - 208.0 / 15.0) < 1e-9
    # honest pairing <beta,beta+psi> = (z+2)/z^2 * 208/15 = 832/49
    assert abs(complex(rep.scalars["psi_trace_pairing"]) - 832.0 / 49.0) < 1e-9


def test_holomorphy(sl3c, sl3c_real):
    a = _eij(3, 0, 2)
    nab_c, rep_c = fam.einstein_from_nilpotent(sl3c, a)
    assert rep_c.passed()
    S_c = tn.conn_sub(nab_c, tn.standard_connection(sl3c))
    S_r = fam.realify_connection(sl3c, sl3c_real, S_c)
    assert fam.holomorphy_check(sl3c_real, S_r)
    assert fam.holomorphy_check(sl3c_real, tn.zeros_conn(sl3c_real))
    tw = fam.antilinear_twist(sl3c_real, S_r)
    assert not tn.is_zero_exact(tw)
    assert not fam.holomorphy_check(sl3c_real, tw)


def test_realified_einstein_report(sl3c, sl3c_real):
    """Every complex Einstein connection re-verifies in the real algebra
    with the Ricci tensor 2 Re rho."""
    a = _eij(3, 0, 2)
    nab_c, _ = fam.einstein_from_nilpotent(sl3c, a)
    S_c = tn.conn_sub(nab_c, tn.standard_connection(sl3c))
    S_r = fam.realify_connection(sl3c, sl3c_real, S_c)
    D_r = tn.standard_connection(sl3c_real)
    nab_r = tn.conn_add(D_r, S_r)
    assert fam.is_torsion_free(sl3c_real, nab_r)
    assert all(not x for x in tn.contraction(sl3c_real, S_r))
    assert tn.is_zero_exact(tn.weakly_einstein_residual(sl3c_real, S_r))
    rho_c = tn.ricci(sl3c, nab_c)
    rho_r = tn.ricci(sl3c_real, nab_r)
    assert tn.tensors_equal(sl3c_real, rho_r,
                            fam.realify_sym(sl3c, sl3c_real, rho_c, scale=2))
    assert tn.is_zero_exact(tn.grad(sl3c_real, nab_r, rho_r))
    assert fam._sym_rank(sl3c_real, rho_r) == sl3c_real.m


def test_su_n0_single_case():
    su30 = algebra("su", 3, 3, 0)
    labels = nil.enumerate_orbits(su30)
    assert labels == [nil.OrbitLabel(0, 0)]
    a = nil.canonical_nilpotent(su30, labels[0])
    assert tn.is_zero_exact(a)
    nab, rep = fam.einstein_from_nilpotent(su30, a)
    assert rep.passed()
