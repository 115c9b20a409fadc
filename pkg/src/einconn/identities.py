"""The operator-identity suite: every displayed identity of the operator
calculus, checked on random samples (exactly in exact mode, residual-bounded
in float mode), plus the structural checks (Jacobi, ad-invariance, Killing
normalization, kernel dimensions, self-adjointness, direct sums).
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .algebras import bracket, inner, mat_mul
from .families import CheckReport, family_tensors
from .numeric import DEFAULT_TOL, DenseMatrix, QQi, rank
from . import tensors as tn


def _push(alg, out, name, lhs, rhs, tol):
    if alg.mode == "exact":
        ok = tn.tensors_equal(alg, lhs, rhs)
        out.append((name, ok, 0.0 if ok else tn.residual(lhs, rhs)))
    else:
        r = tn.residual(lhs, rhs)
        out.append((name, r < tol, r))


def _push_scalar(alg, out, name, x, y, tol):
    if alg.mode == "exact":
        out.append((name, x == y, 0.0))
    else:
        d = abs(complex(x) - complex(y))
        s = max(1.0, abs(complex(x)), abs(complex(y)))
        out.append((name, d / s < tol, d / s))


def jacobi_check(alg) -> bool:
    """ad([e_j,e_k]) = [ad e_j, ad e_k] for all basis pairs."""
    m = alg.m
    if alg.mode == "float":
        C = alg.C_dense
        # ad([e_j,e_k])_ab = C_jk^s C_sa^b must equal
        # [ad_j, ad_k] stored row-wise:  C_ka^s C_js^b - C_ja^s C_ks^b
        left = np.einsum("jks,sab->jkab", C, C)
        right = np.einsum("kas,jsb->jkab", C, C) - np.einsum("jas,ksb->jkab", C, C)
        return float(np.abs(left - right).max()) < 1e-9 * max(1.0, float(np.abs(C).max()) ** 2)
    ads = [alg.ad_matrix(j) for j in range(m)]
    zero = alg.f_zero()
    for j in range(m):
        for k in range(j + 1, m):
            # ad([e_j,e_k]) assembled from the structure constants
            target = [[zero] * m for _ in range(m)]
            for (l, v) in alg.C_rows[j][k]:
                Al = ads[l]
                for a in range(m):
                    ra = Al[a]
                    ta = target[a]
                    for b in range(m):
                        if ra[b]:
                            ta[b] = ta[b] + v * ra[b]
            # row-storage composition: (ad_j o ad_k)[a][b] = (A_k @ A_j)[a][b]
            Aj, Ak = ads[j], ads[k]
            for a in range(m):
                for b in range(m):
                    s = zero
                    for t in range(m):
                        if Ak[a][t] and Aj[t][b]:
                            s = s + Ak[a][t] * Aj[t][b]
                        if Aj[a][t] and Ak[t][b]:
                            s = s - Aj[a][t] * Ak[t][b]
                    if s != target[a][b]:
                        return False
    return True


def ad_invariance_check(alg, trials, rng, tol) -> Tuple[bool, float]:
    """beta([u,v],w) + beta(v,[u,w]) = 0 on random triples."""
    worst = 0.0
    bt = tn.beta_sym(alg)
    for _ in range(trials):
        u = tn.random_vector(alg, rng)
        v = tn.random_vector(alg, rng)
        w = tn.random_vector(alg, rng)
        if alg.mode == "exact":
            um, vm, wm = alg.uncoords(u), alg.uncoords(v), alg.uncoords(w)
            t1 = tn.eval_sym(alg, bt, alg.coords(bracket(um, vm)), w)
            t2 = tn.eval_sym(alg, bt, v, alg.coords(bracket(um, wm)))
            if t1 + t2 != (Fraction(0) if alg.field == "R" else QQi(0)):
                return False, 1.0
        else:
            uv = np.einsum("jkl,j,k->l", alg.C_dense, u, v)
            uw = np.einsum("jkl,j,k->l", alg.C_dense, u, w)
            t = complex(tn.eval_sym(alg, bt, uv, w)) + complex(tn.eval_sym(alg, bt, v, uw))
            s = max(1.0, tn.max_abs(bt))
            worst = max(worst, abs(t) / s)
    return worst < tol, worst


def killing_normalization_check(alg, trials, rng) -> bool:
    """<a,b> = 2n tr(ab) on random exact pairs (2 Re for the real form)."""
    base = alg if alg.mode == "exact" else alg.exact
    for _ in range(trials):
        a = base.uncoords(tn.random_vector(base, rng))
        b = base.uncoords(tn.random_vector(base, rng))
        base.killing(a, b)  # raises on mismatch
    return True


def delta_kernel_dimension(alg) -> int:
    """dim Ker Delta, by the method appropriate to the problem size.

    exact and dim S <= 400: exact rank of the Delta matrix;
    float: SVD rank (dim S <= 2000);
    larger exact problems use the two-sided route: m independent exact
    kernel vectors D(tau_{e_i}) plus the isomorphism with Ker(Omega - Id),
    whose dimension the spectrum module certifies exactly.
    """
    m = alg.m
    pairs = [(j, k) for j in range(m) for k in range(j, m)]
    dimS = len(pairs) * m
    if alg.mode == "exact" and dimS <= 400:
        rows = _delta_matrix_exact(alg, pairs)
        return dimS - rank(DenseMatrix.from_rows(rows))
    if alg.mode == "float" and dimS <= 2200:
        M = delta_matrix_float(alg)
        sv = np.linalg.svd(M, compute_uv=False)
        return int(dimS - np.sum(sv > 1e-9 * sv[0]))
    raise ValueError("problem too large for a direct kernel computation")


def _delta_matrix_exact(alg, pairs):
    cols = []
    for (j, k) in pairs:
        for l in range(alg.m):
            S = tn.zeros_conn(alg)
            one = alg.f_one()
            S[j][k][l] = one
            S[k][j][l] = one
            dS = tn.delta(alg, S)
            col = []
            for (a, b) in pairs:
                col.extend(dS[a][b])
            cols.append(col)
    dimS = len(cols)
    return [[cols[c][r] for c in range(dimS)] for r in range(dimS)]


def delta_matrix_float(alg) -> np.ndarray:
    """Delta as a dim S x dim S float matrix on the symmetric basis (batched)."""
    m = alg.m
    pairs = [(j, k) for j in range(m) for k in range(j, m)]
    dimS = len(pairs) * m
    D = tn.standard_connection(alg)
    binv = alg.beta_inv
    beta = alg.beta
    cols = np.zeros((dimS, dimS),
                    dtype=np.float64 if alg.field == "R" else np.complex128)
    batch = 600
    idx = 0
    basis_batch = []
    col_ids = []

    def flush():
        nonlocal basis_batch, col_ids
        if not basis_batch:
            return
        B = np.stack(basis_batch)           # (B, m, m, m)
        ds = np.einsum("rjs,Bskr->Bjk", D, B)
        ds = ds + np.einsum("rjs,Bskr->Bkj" if False else "Brjs,skr->Bjk", B, D)
        ds = ds / 2.0
        t1 = np.einsum("pjr,Brk->Bpjk", D, ds)
        g1 = -np.einsum("lp,Bpjk->Bjkl", binv, t1 + t1.transpose(0, 1, 3, 2))
        t2 = np.einsum("Bpjr,rk->Bpjk", B, beta)
        g2 = -np.einsum("lp,Bpjk->Bjkl", binv, t2 + t2.transpose(0, 1, 3, 2))
        out = 8.0 * g1 + g2
        for bi, cid in enumerate(col_ids):
            vec = np.concatenate([out[bi, a, b] for (a, b) in pairs])
            cols[:, cid] = vec
        basis_batch = []
        col_ids = []

    for (j, k) in pairs:
        for l in range(m):
            S = np.zeros((m, m, m),
                         dtype=np.float64 if alg.field == "R" else np.complex128)
            S[j, k, l] = 1.0
            S[k, j, l] = 1.0
            basis_batch.append(S)
            col_ids.append(idx)
            idx += 1
            if len(basis_batch) >= batch:
                flush()
    flush()
    return cols


def run_identity_suite(alg, trials: int, rng,
                       tol: Optional[float] = None) -> CheckReport:
    """The displayed-identity suite on `trials` random samples."""
    tol = DEFAULT_TOL if tol is None else tol
    out: List[Tuple[str, bool, float]] = []
    D = tn.standard_connection(alg)
    bt = tn.beta_sym(alg)
    zero_T = tn.zeros_sym(alg)
    zero_S = tn.zeros_conn(alg)

    # one-off structural identities
    _push(alg, out, "fdd.a 4{D.D}=beta",
          tn.sym_scale(tn.pair_conn(alg, D, D), 4), bt, tol)
    _push(alg, out, "fdd.b 4 ricci(D)=-beta",
          tn.sym_scale(tn.ricci(alg, D), 4), tn.sym_scale(bt, -1), tol)
    _push(alg, out, "fdd.c D beta = 0", tn.grad(alg, D, bt), zero_S, tol)
    _push(alg, out, "H(0) = 0",
          tn.weakly_einstein_residual(alg, zero_S), zero_S, tol)
    _push(alg, out, "Omega beta = 2 beta",
          tn.omega(alg, bt), tn.sym_scale(bt, 2), tol)
    OM = tn.omega_matrix(alg)
    trace = sum((OM[i][i] for i in range(len(OM))), alg.f_zero()) \
        if alg.mode == "exact" else complex(np.trace(np.asarray(OM)))
    _push_scalar(alg, out, "tr Omega = -dim", trace,
                 -alg.m if alg.mode == "exact" else complex(-alg.m), tol)
    _push_scalar(alg, out, "<beta,beta> = dim",
                 tn.inner_T(alg, bt, bt),
                 alg.m if alg.mode == "exact" else complex(alg.m), tol)
    out.append(("jacobi", jacobi_check(alg), 0.0))
    ok, worst = ad_invariance_check(alg, trials, rng, tol)
    out.append(("ad-invariance", ok, worst))
    out.append(("killing = 2n tr",
                killing_normalization_check(alg, min(trials, 50), rng), 0.0))

    for t in range(trials):
        sig = tn.random_sym(alg, rng)
        tau = tn.random_sym(alg, rng)
        S = tn.random_sym_conn(alg, rng)
        ds = tn.grad(alg, D, sig)
        dt = tn.grad(alg, D, tau)

        # cnd: c(D sigma) = 0
        c = tn.contraction(alg, ds)
        if alg.mode == "exact":
            out.append(("cnd c(D sigma)=0", not any(c), 0.0))
        else:
            r = float(np.abs(np.asarray(c)).max()) / max(1.0, tn.max_abs(ds))
            out.append(("cnd c(D sigma)=0", r < tol, r))

        # tsb
        _push(alg, out, "tsb 2{s.b}=Omega s",
              tn.sym_scale(tn.pair_sym(alg, sig, bt), 2),
              tn.omega(alg, sig), tol)
        # dss
        _push_scalar(alg, out, "dss.a <S,Ds>=2<{D.S},s>",
                     tn.inner_S(alg, S, ds),
                     2 * tn.inner_T(alg, tn.pair_conn(alg, D, S), sig), tol)
        _push(alg, out, "dss.b {D.(S beta)}={D.S}",
              tn.pair_conn(alg, D, tn.grad(alg, S, bt)),
              tn.pair_conn(alg, D, S), tol)
        # dsd
        _push_scalar(alg, out, "dsd 4<Dt,Ds>=<Om t-2t,s>",
                     4 * tn.inner_S(alg, dt, ds),
                     tn.inner_T(alg, tn.sym_sub(tn.omega(alg, tau),
                                                tn.sym_scale(tau, 2)), sig),
                     tol)
        # edd a-d
        _push(alg, out, "edd.a (Ds)beta = Ds",
              tn.grad(alg, ds, bt), ds, tol)
        _push(alg, out, "edd.b 8{D.(Ds)}=(Om-2)s",
              tn.sym_scale(tn.pair_conn(alg, D, ds), 8),
              tn.sym_sub(tn.omega(alg, sig), tn.sym_scale(sig, 2)), tol)
        _push(alg, out, "edd.c 4{Ds.Ds}={ss}+[(1-Om)s]*s",
              tn.sym_scale(tn.pair_conn(alg, ds, ds), 4),
              tn.sym_add(tn.pair_sym(alg, sig, sig),
                         tn.star(alg, tn.sym_sub(sig, tn.omega(alg, sig)), sig)),
              tol)
        bmins = tn.sym_sub(bt, sig)
        _push(alg, out, "edd.d",
              tn.sym_scale(tn.pair_conn(alg, tn.conn_add(D, ds),
                                        tn.conn_add(D, ds)), 4),
              tn.sym_add(tn.sym_add(bmins, tn.pair_sym(alg, sig, sig)),
                         tn.star(alg, tn.sym_sub(tn.omega(alg, sig), sig),
                                 bmins)),
              tol)
        # chs / fsb
        _push(alg, out, "chs.a Phi(Ds)=-Ds",
              tn.christoffel(alg, ds), tn.conn_scale(ds, -1), tol)
        _push(alg, out, "chs.b Phi(Ss)=-sS",
              tn.christoffel(alg, tn.grad(alg, S, sig)),
              tn.conn_scale(tn.act(alg, sig, S), -1), tol)
        _push(alg, out, "fsb.a Phi(S beta)=-S",
              tn.christoffel(alg, tn.grad(alg, S, bt)),
              tn.conn_scale(S, -1), tol)
        _push(alg, out, "fsb.b {D.(Phi S)}=-{D.S}",
              tn.pair_conn(alg, D, tn.christoffel(alg, S)),
              tn.sym_scale(tn.pair_conn(alg, D, S), -1), tol)
        # chc.i componentwise: 2 Phi S + S = -(S beta)
        _push(alg, out, "chc.i 2 Phi S + S = -S beta",
              tn.conn_add(tn.conn_scale(tn.christoffel(alg, S), 2), S),
              tn.conn_scale(tn.grad(alg, S, bt), -1), tol)
        # Phi annihilates (Phi - 1/2)(Phi + 1)
        half = Fraction(1, 2) if alg.mode == "exact" else 0.5
        p1 = tn.conn_sub(tn.christoffel(alg, S), tn.conn_scale(S, half))
        _push(alg, out, "Phi eigenvalues {1/2,-1}",
              tn.conn_add(tn.christoffel(alg, p1), p1), zero_S, tol)
        # dio
        _push(alg, out, "dio Delta(Ds)=D[(Om-1)s]",
              tn.delta(alg, ds),
              tn.grad(alg, D, tn.sym_sub(tn.omega(alg, sig), sig)), tol)
        # self-adjointness (sfadj)
        S2 = tn.random_sym_conn(alg, rng)
        _push_scalar(alg, out, "sfadj <Delta S,S2>=<S,Delta S2>",
                     tn.inner_S(alg, tn.delta(alg, S), S2),
                     tn.inner_S(alg, S, tn.delta(alg, S2)), tol)
        _push_scalar(alg, out, "sfadj <Phi S,S2>=<S,Phi S2>",
                     tn.inner_S(alg, tn.christoffel(alg, S), S2),
                     tn.inner_S(alg, S, tn.christoffel(alg, S2)), tol)
        _push_scalar(alg, out, "sfadj Omega self-adjoint",
                     tn.inner_T(alg, tn.omega(alg, sig), tau),
                     tn.inner_T(alg, sig, tn.omega(alg, tau)), tol)
        # psidl on a family instance: psi (D lambda) = D chi => (D lambda) psi = D chi
        if alg.n >= 3:
            a = alg.uncoords(tn.random_vector(alg, rng)) if alg.mode == "exact" \
                else alg.uncoords(tn.random_vector(alg, rng))
            ta = tn.tau_tensor(alg, a, check=False) if alg.mode == "exact" \
                else tn.tau_tensor(alg, a)
            dta = tn.grad(alg, D, ta)
            # tau_a (D tau_a) = D tau_c  (an instance of the hypothesis)
            if alg.mode == "exact":
                from .algebras import mat_scale, traceless_part
                cmat = traceless_part(mat_scale(mat_mul(a, a), alg.eps))
                tc = tn.tau_tensor(alg, cmat, check=False)
            else:
                am = np.asarray(a, dtype=complex)
                cmat = tn.traceless_np(alg.eps * (am @ am))
                tc = tn.tau_tensor(alg, cmat)
            dtc = tn.grad(alg, D, tc)
            _push(alg, out, "psidl hypothesis", tn.act(alg, ta, dta), dtc, tol)
            _push(alg, out, "psidl conclusion", tn.grad(alg, dta, ta), dtc, tol)
        # dhz: finite-difference differential of H at 0 equals Delta (float)
        if alg.mode == "float" and t == 0:
            step = 1e-4
            hp = tn.weakly_einstein_residual(alg, step * np.asarray(S))
            hm = tn.weakly_einstein_residual(alg, -step * np.asarray(S))
            fd = (hp - hm) / (2 * step)
            r = tn.residual(fd, tn.delta(alg, S))
            out.append(("dhz dH_0 = Delta (fd)", r < 1e-6, r))

    # krd: dim Ker Delta = m  (direct where feasible)
    m = alg.m
    dimS = m * m * (m + 1) // 2
    if (alg.mode == "exact" and dimS <= 400) or \
            (alg.mode == "float" and dimS <= 2200):
        kd = delta_kernel_dimension(alg)
        out.append(("krd dim Ker Delta = dim g", kd == m, 0.0))
    else:
        # two-sided: the gradients D tau_{e_i} are m independent kernel
        # vectors, and Ker Delta ~ Ker(Omega - Id) has dimension m by the
        # exact spectrum certificate (see the spectral module)
        ok = True
        cols = []
        for i in range(m):
            ta = tn.tau_tensor(alg, alg.basis[i])
            dta = tn.grad(alg, D, ta)
            r = tn.max_abs(tn.delta(alg, dta)) / max(1.0, tn.max_abs(dta))
            if alg.mode == "float":
                ok = ok and r < tol
                cols.append(np.asarray(dta).reshape(-1))
            else:
                ok = ok and tn.is_zero_exact(tn.delta(alg, dta))
        if alg.mode == "float":
            A = np.stack(cols, axis=1)
            sv = np.linalg.svd(A, compute_uv=False)
            ok = ok and int(np.sum(sv > 1e-9 * sv[0])) == m
        out.append(("krd witnesses (large case)", ok, 0.0))

    # drsum at direct sizes: rank + kernel partition with trivial intersection
    if alg.mode == "float" and dimS <= 2200:
        M = delta_matrix_float(alg)
        sv = np.linalg.svd(M, compute_uv=False)
        rk = int(np.sum(sv > 1e-9 * sv[0]))
        u, s2, vh = np.linalg.svd(M)
        img = u[:, :rk]
        ta_cols = []
        for i in range(m):
            dta = tn.grad(alg, D, tn.tau_tensor(alg, alg.basis[i]))
            pairs = [(j, k) for j in range(m) for k in range(j, m)]
            vec = np.concatenate([np.asarray(dta)[a, b] for (a, b) in pairs])
            ta_cols.append(vec)
        K = np.stack(ta_cols, axis=1)
        both = np.concatenate([img, K], axis=1)
        sv2 = np.linalg.svd(both, compute_uv=False)
        full = int(np.sum(sv2 > 1e-9 * sv2[0]))
        out.append(("drsum S = Delta(S) + Ker Delta",
                    rk + m == dimS and full == dimS, 0.0))

    # dpepd: D(Pi lambda) = Pi_S(D lambda), certified by exhibiting the
    # complement part as an explicit Delta-image
    if alg.mode == "exact" and alg.n >= 3:
        lam = tn.random_sym(alg, rng)
        pl, tvec, sigma_sol = tn.project_ker_T(alg, lam)
        dlam = tn.grad(alg, D, lam)
        dpl = tn.grad(alg, D, pl)
        ok = tn.is_zero_exact(tn.delta(alg, dpl)) and tn.tensors_equal(
            alg, tn.conn_sub(dlam, dpl),
            tn.delta(alg, tn.grad(alg, D, sigma_sol)))
        out.append(("dpepd D(Pi l) = Pi(D l)", ok, 0.0))

    worst = max((r[2] for r in out), default=0.0)
    return CheckReport("identities", all(r[1] for r in out), worst, out)
