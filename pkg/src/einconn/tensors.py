"""Invariant operators on symmetric 2-tensors and torsion-free connections.

Conventions (components relative to the algebra's canonical basis):

* ``sig[j][k]``      -- symmetric 2-tensor, sigma_jk
* ``conn[j][k][l]``  -- connection / symmetric operation, Gamma_jk^l
* ``endo[j][k]``     -- mixed components sigma_j^k = sigma_js beta^sk,
                        acting on coordinates by (Sigma v)^k = v^j sigma_j^k

Every operation has an exact path (nested lists over Fraction/QQi) and a
float path (numpy + einsum), selected by ``alg.mode``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

import numpy as np

from .algebras import (FloatAlgebra, LieAlgebra, mat_add, mat_mul, mat_scale,
                       traceless_part, inner, _mat)
from .numeric import DenseMatrix, QQi, as_float, kernel_basis, solve_linear


# ---------------------------------------------------------------------------
# constructors and generic helpers
# ---------------------------------------------------------------------------

def zeros_sym(alg):
    if alg.mode == "float":
        dt = np.float64 if alg.field == "R" else np.complex128
        return np.zeros((alg.m, alg.m), dtype=dt)
    z = alg.f_zero()
    return [[z] * alg.m for _ in range(alg.m)]


def zeros_conn(alg):
    if alg.mode == "float":
        dt = np.float64 if alg.field == "R" else np.complex128
        return np.zeros((alg.m, alg.m, alg.m), dtype=dt)
    z = alg.f_zero()
    return [[[z] * alg.m for _ in range(alg.m)] for _ in range(alg.m)]


def sym_add(a, b):
    if isinstance(a, np.ndarray):
        return a + b
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sym_sub(a, b):
    if isinstance(a, np.ndarray):
        return a - b
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sym_scale(a, s):
    if isinstance(a, np.ndarray):
        return a * s
    return [[s * x for x in ra] for ra in a]


def conn_add(a, b):
    if isinstance(a, np.ndarray):
        return a + b
    return [[[x + y for x, y in zip(ca, cb)] for ca, cb in zip(ra, rb)]
            for ra, rb in zip(a, b)]


def conn_sub(a, b):
    if isinstance(a, np.ndarray):
        return a - b
    return [[[x - y for x, y in zip(ca, cb)] for ca, cb in zip(ra, rb)]
            for ra, rb in zip(a, b)]


def conn_scale(a, s):
    if isinstance(a, np.ndarray):
        return a * s
    return [[[s * x for x in ca] for ca in ra] for ra in a]


def _flat(x):
    if isinstance(x, np.ndarray):
        return x.reshape(-1).tolist()
    out = []
    stack = [x]
    while stack:
        t = stack.pop()
        if isinstance(t, list):
            stack.extend(t)
        else:
            out.append(t)
    return out


def max_abs(x) -> float:
    if isinstance(x, np.ndarray):
        return float(np.abs(x).max()) if x.size else 0.0
    vals = [abs(complex(as_float(v))) for v in _flat(x)]
    return max(vals) if vals else 0.0


def is_zero_exact(x) -> bool:
    return all(not v for v in _flat(x))


def residual(a, b) -> float:
    """Scale-normalized sup-norm difference, for float comparisons."""
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        d = float(np.abs(np.asarray(a) - np.asarray(b)).max())
    else:
        d = max_abs(sym_sub(a, b) if not isinstance(a[0][0], list)
                    else conn_sub(a, b))
    return d / max(1.0, max_abs(a), max_abs(b))


def tensors_equal(alg, a, b, tol: Optional[float] = None) -> bool:
    if alg.mode == "exact":
        fa, fb = _flat(a), _flat(b)
        return all(x == y for x, y in zip(fa, fb)) and len(fa) == len(fb)
    from .numeric import DEFAULT_TOL
    return residual(a, b) < (DEFAULT_TOL if tol is None else tol)


def beta_sym(alg):
    """The Killing form as an element of the tensor space."""
    if alg.mode == "float":
        return alg.beta.copy()
    return [row[:] for row in alg.beta]


def random_vector(alg, rng):
    if alg.mode == "float":
        v = rng_floats(rng, alg.m)
        if alg.field == "C":
            v = v + 1j * rng_floats(rng, alg.m)
        return v
    if alg.field == "R":
        return [Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                for _ in range(alg.m)]
    return [QQi(Fraction(rng.randint(-3, 3), rng.randint(1, 2)),
                Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
            for _ in range(alg.m)]


def rng_floats(rng, k):
    return np.array([rng.uniform(-1.0, 1.0) for _ in range(k)])


def random_sym(alg, rng):
    if alg.mode == "float":
        a = rng_floats(rng, alg.m * alg.m).reshape(alg.m, alg.m)
        if alg.field == "C":
            a = a + 1j * rng_floats(rng, alg.m * alg.m).reshape(alg.m, alg.m)
        return a + a.T
    s = zeros_sym(alg)
    for j in range(alg.m):
        for k in range(j, alg.m):
            v = random_scalar(alg, rng)
            s[j][k] = v
            s[k][j] = v
    return s


def random_scalar(alg, rng):
    if alg.field == "R":
        return Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return QQi(Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3)))


def random_sym_conn(alg, rng):
    """A random element of the symmetric-operation space."""
    if alg.mode == "float":
        a = rng_floats(rng, alg.m ** 3).reshape(alg.m, alg.m, alg.m)
        if alg.field == "C":
            a = a + 1j * rng_floats(rng, alg.m ** 3).reshape(alg.m, alg.m, alg.m)
        return a + a.transpose(1, 0, 2)
    c = zeros_conn(alg)
    for j in range(alg.m):
        for k in range(j, alg.m):
            for l in range(alg.m):
                v = random_scalar(alg, rng)
                c[j][k][l] = v
                c[k][j][l] = v
    return c


# ---------------------------------------------------------------------------
# basic maps
# ---------------------------------------------------------------------------

def standard_connection(alg):
    """D_jk^l = C_jk^l / 2."""
    if alg.mode == "float":
        return alg.C_dense / 2.0
    out = zeros_conn(alg)
    half = Fraction(1, 2)
    for (j, k, l, v) in alg.C_nnz:
        out[j][k][l] = v * half
    return out


def sym_to_endo(alg, sig):
    """sigma_j^k = sigma_js beta^sk."""
    if alg.mode == "float":
        return np.asarray(sig) @ alg.beta_inv
    m = alg.m
    out = [[alg.f_zero()] * m for _ in range(m)]
    for j in range(m):
        row = sig[j]
        for s in range(m):
            v = row[s]
            if v:
                bs = alg.beta_inv[s]
                oj = out[j]
                for k in range(m):
                    if bs[k]:
                        oj[k] = oj[k] + v * bs[k]
    return out


def endo_to_sym(alg, endo):
    """sigma_jk = sigma_j^s beta_sk."""
    if alg.mode == "float":
        return np.asarray(endo) @ alg.beta
    m = alg.m
    out = zeros_sym(alg)
    for j in range(m):
        row = endo[j]
        for s in range(m):
            v = row[s]
            if v:
                bs = alg.beta[s]
                oj = out[j]
                for k in range(m):
                    if bs[k]:
                        oj[k] = oj[k] + v * bs[k]
    return out


def apply_endo(alg, endo, v):
    """(Sigma v)^k = v^j sigma_j^k."""
    if alg.mode == "float":
        return np.asarray(v) @ np.asarray(endo)
    m = alg.m
    out = [alg.f_zero()] * m
    for j in range(m):
        if v[j]:
            row = endo[j]
            for k in range(m):
                if row[k]:
                    out[k] = out[k] + v[j] * row[k]
    return out


def apply_conn(alg, conn, v, w):
    """[nabla_v w]^l = Gamma_jk^l v^j w^k."""
    if alg.mode == "float":
        return np.einsum("jkl,j,k->l", conn, v, w)
    m = alg.m
    out = [alg.f_zero()] * m
    for j in range(m):
        if not v[j]:
            continue
        for k in range(m):
            if not w[k]:
                continue
            cjk = conn[j][k]
            vw = v[j] * w[k]
            for l in range(m):
                if cjk[l]:
                    out[l] = out[l] + cjk[l] * vw
    return out


def eval_sym(alg, sig, v, w):
    """sigma(v, w) = sigma_jk v^j w^k."""
    if alg.mode == "float":
        return complex(np.einsum("jk,j,k->", sig, v, w))
    out = alg.f_zero()
    for j in range(alg.m):
        if not v[j]:
            continue
        row = sig[j]
        for k in range(alg.m):
            if w[k] and row[k]:
                out = out + row[k] * v[j] * w[k]
    return out


# ---------------------------------------------------------------------------
# the operator calculus
# ---------------------------------------------------------------------------

def grad(alg, conn, sig):
    """nabla-gradient: S_jk^l = -beta^lp (G_pj^r sig_rk + G_pk^r sig_jr)."""
    if alg.mode == "float":
        tmp = np.einsum("pjr,rk->pjk", conn, sig)
        tot = tmp + tmp.transpose(0, 2, 1)
        return -np.einsum("lp,pjk->jkl", alg.beta_inv, tot)
    m = alg.m
    z = alg.f_zero()
    tmp = [[[z] * m for _ in range(m)] for _ in range(m)]
    for p in range(m):
        cp = conn[p]
        tp = tmp[p]
        for j in range(m):
            cpj = cp[j]
            tpj = tp[j]
            for r in range(m):
                v = cpj[r]
                if v:
                    sr = sig[r]
                    for k in range(m):
                        if sr[k]:
                            tpj[k] = tpj[k] + v * sr[k]
    out = zeros_conn(alg)
    for l in range(m):
        bl = alg.beta_inv[l]
        for p in range(m):
            blp = bl[p]
            if not blp:
                continue
            tp = tmp[p]
            for j in range(m):
                tpj = tp[j]
                for k in range(m):
                    v = tpj[k]
                    w = tp[k][j]
                    if v or w:
                        out[j][k][l] = out[j][k][l] - blp * (v + w)
    return out


def act(alg, sig, conn):
    """The product sigma nabla: Gamma~_jk^l = sigma_r^l Gamma_jk^r."""
    mixed = sym_to_endo(alg, sig)
    if alg.mode == "float":
        return np.einsum("jkr,rl->jkl", conn, mixed)
    m = alg.m
    out = zeros_conn(alg)
    for j in range(m):
        for k in range(m):
            cjk = conn[j][k]
            ojk = out[j][k]
            for r in range(m):
                v = cjk[r]
                if v:
                    mr = mixed[r]
                    for l in range(m):
                        if mr[l]:
                            ojk[l] = ojk[l] + v * mr[l]
    return out


def pair_conn(alg, A, B):
    """{A . B}_jk = (A_rj^s B_sk^r + B_rj^s A_sk^r) / 2."""
    if alg.mode == "float":
        e1 = np.einsum("rjs,skr->jk", A, B)
        e2 = np.einsum("rjs,skr->jk", B, A)
        return (e1 + e2) / 2.0
    m = alg.m
    half = Fraction(1, 2)
    out = zeros_sym(alg)
    for j in range(m):
        for k in range(m):
            t = alg.f_zero()
            for r in range(m):
                Arj = A[r][j]
                Brj = B[r][j]
                for s in range(m):
                    a1 = Arj[s]
                    if a1 and B[s][k][r]:
                        t = t + a1 * B[s][k][r]
                    b1 = Brj[s]
                    if b1 and A[s][k][r]:
                        t = t + b1 * A[s][k][r]
            out[j][k] = t * half
    return out


def _c_by_third(alg):
    if "_c_by_third" not in alg.__dict__:
        idx = {}
        for (j, k, l, v) in alg.C_nnz:
            idx.setdefault(l, []).append((j, k, v))
        alg._c_by_third = idx
    return alg._c_by_third


def pair_sym(alg, sig, tau):
    """2{sig.tau}_jk = C_jr^p sig_q^r C_ks^q tau_p^s + (sig <-> tau)."""
    smix = sym_to_endo(alg, sig)
    tmix = sym_to_endo(alg, tau)
    if alg.mode == "float":
        C = alg.C_dense
        t1 = np.einsum("jrp,qr,ksq,ps->jk", C, smix, C, tmix, optimize=True)
        t2 = np.einsum("jrp,qr,ksq,ps->jk", C, tmix, C, smix, optimize=True)
        return (t1 + t2) / 2.0
    out = zeros_sym(alg)
    half = Fraction(1, 2)
    nnz = alg.C_nnz
    for (j, r, p, v1) in nnz:
        for (k, s, q, v2) in nnz:
            x = smix[q][r]
            y = tmix[p][s]
            if x and y:
                out[j][k] = out[j][k] + v1 * v2 * x * y * half
            x = tmix[q][r]
            y = smix[p][s]
            if x and y:
                out[j][k] = out[j][k] + v1 * v2 * x * y * half
    return out


def star(alg, sig, tau):
    """sig (*) tau: half the anticommutator of the associated endomorphisms.

    In components 2(sig (*) tau)_jk = sig_j^s tau_sk + tau_j^s sig_sk.
    """
    smix = sym_to_endo(alg, sig)
    tmix = sym_to_endo(alg, tau)
    if alg.mode == "float":
        return (smix @ np.asarray(tau) + tmix @ np.asarray(sig)) / 2.0
    m = alg.m
    out = zeros_sym(alg)
    half = Fraction(1, 2)
    for j in range(m):
        for k in range(m):
            t = alg.f_zero()
            for s in range(m):
                if smix[j][s] and tau[s][k]:
                    t = t + smix[j][s] * tau[s][k]
                if tmix[j][s] and sig[s][k]:
                    t = t + tmix[j][s] * sig[s][k]
            out[j][k] = t * half
    return out


def sym_inverse(alg, sig):
    """gamma^{-1} with gamma (*) gamma^{-1} = beta (exact, nondegenerate)."""
    if alg.mode == "float":
        mixed = np.asarray(sig) @ alg.beta_inv
        inv_mixed = np.linalg.inv(mixed)
        return inv_mixed @ alg.beta
    mixed = sym_to_endo(alg, sig)
    from .numeric import invert
    inv_mixed = invert(DenseMatrix.from_rows(mixed))
    rows = [[inv_mixed.at(i, k) for k in range(alg.m)] for i in range(alg.m)]
    return endo_to_sym(alg, rows)


def omega(alg, sig):
    """Normalized curvature operator: [Omega sig]_jk = 2 C_jq^r C_ks^q sig_r^s."""
    smix = sym_to_endo(alg, sig)
    if alg.mode == "float":
        C = alg.C_dense
        return 2.0 * np.einsum("jqr,ksq,rs->jk", C, C, smix, optimize=True)
    out = zeros_sym(alg)
    by3 = _c_by_third(alg)
    for (j, q, r, v1) in alg.C_nnz:
        for (k, s, v2) in by3.get(q, ()):
            x = smix[r][s]
            if x:
                out[j][k] = out[j][k] + 2 * v1 * v2 * x
    return out


def contraction(alg, conn):
    """[c nabla]_j = Gamma_kj^k."""
    if alg.mode == "float":
        return np.einsum("kjk->j", conn)
    m = alg.m
    return [sum((conn[k][j][k] for k in range(m)), alg.f_zero())
            for j in range(m)]


def christoffel(alg, S):
    """Phi S = -(S beta + S)/2, with S beta the S-gradient of beta."""
    sb = grad(alg, S, beta_sym(alg))
    half = 0.5 if alg.mode == "float" else Fraction(1, 2)
    return conn_scale(conn_add(sb, S), -half)


def delta(alg, S):
    """Delta S = 8 D{D.S} + S beta."""
    D = standard_connection(alg)
    ds = pair_conn(alg, D, S)
    return conn_add(conn_scale(grad(alg, D, ds), 8),
                    grad(alg, S, beta_sym(alg)))


def weakly_einstein_residual(alg, S):
    """H(S) = 4 nabla {nabla . nabla} for nabla = D + S."""
    nab = conn_add(standard_connection(alg), S)
    return conn_scale(grad(alg, nab, pair_conn(alg, nab, nab)), 4)


def ricci(alg, conn, require_unimodular: bool = True):
    """rho = -{nabla.nabla}; valid for unimodular torsion-free connections."""
    if require_unimodular:
        c = contraction(alg, conn)
        if alg.mode == "exact":
            if any(c):
                raise ValueError("connection is not unimodular (cS != 0)")
        else:
            from .numeric import DEFAULT_TOL
            if max_abs(np.asarray(c)) > DEFAULT_TOL * max(1.0, max_abs(conn)):
                raise ValueError("connection is not unimodular (cS != 0)")
    return sym_scale(pair_conn(alg, conn, conn), -1)


def inner_T(alg, sig, tau):
    """<sig,tau> = beta^jp beta^kq sig_jk tau_pq."""
    if alg.mode == "float":
        up = alg.beta_inv @ np.asarray(sig) @ alg.beta_inv
        return complex(np.einsum("jk,jk->", up, tau))
    m = alg.m
    up_rows = []
    for j in range(m):
        row = [alg.f_zero()] * m
        for p in range(m):
            v = alg.beta_inv[j][p]
            if v:
                sp = sig[p]
                for q in range(m):
                    if sp[q]:
                        row[q] = row[q] + v * sp[q]
        up_rows.append(row)
    out = alg.f_zero()
    for j in range(m):
        for k in range(m):
            t = alg.f_zero()
            for q in range(m):
                if up_rows[j][q] and alg.beta_inv[q][k]:
                    t = t + up_rows[j][q] * alg.beta_inv[q][k]
            if t and tau[j][k]:
                out = out + t * tau[j][k]
    return out


def inner_S(alg, A, B):
    """<A,B> = beta^jp beta^kq beta_lr A_jk^l B_pq^r."""
    if alg.mode == "float":
        t = np.einsum("jp,kq,lr,jkl,pqr->", alg.beta_inv, alg.beta_inv,
                      alg.beta, A, B, optimize=True)
        return complex(t)
    m = alg.m
    # lower the third index of A, raise the first two of B, contract
    out = alg.f_zero()
    binv = alg.beta_inv
    beta = alg.beta
    # B2[j][k][r] = beta^jp beta^kq B[p][q][r]
    B2 = zeros_conn(alg)
    for j in range(m):
        for p in range(m):
            v1 = binv[j][p]
            if not v1:
                continue
            Bp = B[p]
            for k in range(m):
                for q in range(m):
                    v2 = binv[k][q]
                    if not v2:
                        continue
                    Bpq = Bp[q]
                    t = v1 * v2
                    B2jk = B2[j][k]
                    for r in range(m):
                        if Bpq[r]:
                            B2jk[r] = B2jk[r] + t * Bpq[r]
    for j in range(m):
        for k in range(m):
            Ajk = A[j][k]
            B2jk = B2[j][k]
            for l in range(m):
                if not Ajk[l]:
                    continue
                bl = beta[l]
                for r in range(m):
                    if bl[r] and B2jk[r]:
                        out = out + Ajk[l] * bl[r] * B2jk[r]
    return out


# ---------------------------------------------------------------------------
# sym-tensor vectorization and the Omega matrix
# ---------------------------------------------------------------------------

def sym_pairs(m: int):
    return [(j, k) for j in range(m) for k in range(j, m)]


def sym_vec(alg, sig):
    prs = sym_pairs(alg.m)
    if alg.mode == "float":
        return np.array([np.asarray(sig)[j, k] for (j, k) in prs])
    return [sig[j][k] for (j, k) in prs]


def sym_unvec(alg, vec):
    s = zeros_sym(alg)
    for idx, (j, k) in enumerate(sym_pairs(alg.m)):
        if isinstance(s, np.ndarray):
            s[j, k] = vec[idx]
            s[k, j] = vec[idx]
        else:
            s[j][k] = vec[idx]
            s[k][j] = vec[idx]
    return s


def omega_matrix(alg):
    """Omega as a dim(T) x dim(T) matrix on the j<=k component basis (cached)."""
    if "_omega_matrix" in alg.__dict__:
        return alg._omega_matrix
    prs = sym_pairs(alg.m)
    dimT = len(prs)
    if alg.mode == "float":
        M = np.zeros((dimT, dimT),
                     dtype=np.float64 if alg.field == "R" else np.complex128)
        for col, (r, p) in enumerate(prs):
            b = zeros_sym(alg)
            b[r, p] = 1.0
            b[p, r] = 1.0
            M[:, col] = sym_vec(alg, omega(alg, b))
        alg._omega_matrix = M
        return M
    cols = []
    for (r, p) in prs:
        b = zeros_sym(alg)
        one = alg.f_one()
        b[r][p] = one
        b[p][r] = one
        cols.append(sym_vec(alg, omega(alg, b)))
    M = [[cols[c][r] for c in range(dimT)] for r in range(dimT)]
    alg._omega_matrix = M
    return M


# ---------------------------------------------------------------------------
# family generator tensors (used by the projection and by spectra)
# ---------------------------------------------------------------------------

def _endo_tensor_from_images(alg, images, check: bool = True):
    """Tensor whose endomorphism sends e_j to images[j] (exact mode)."""
    mixed = [alg.coords(img, check=check) for img in images]
    return endo_to_sym(alg, mixed)


def _endo_tensor_from_images_float(alg, images):
    mixed = np.array([alg.coords(img) for img in images])
    if alg.field == "R":
        mixed = mixed.real if np.iscomplexobj(mixed) else mixed
    return mixed @ alg.beta


def tau_tensor(alg, a, check: bool = True):
    """tau_a: corresponds to v -> eps(av + va)_0."""
    if alg.mode == "float":
        a = np.asarray(a, dtype=np.complex128)
        imgs = [traceless_np(alg.eps * (a @ b + b @ a)) for b in alg.basis]
        return _endo_tensor_from_images_float(alg, imgs)
    imgs = [traceless_part(mat_scale(mat_add(mat_mul(a, b), mat_mul(b, a)),
                                     alg.eps)) for b in alg.basis]
    return _endo_tensor_from_images(alg, imgs, check=check)


def theta_tensor(alg, a, b=None, check: bool = True):
    """theta_{a,b}: corresponds to v -> eps^2 [(a,v)b + (b,v)a] / (2n)."""
    if b is None:
        b = a
    n = alg.n
    if alg.mode == "float":
        a = np.asarray(a, dtype=np.complex128)
        b = np.asarray(b, dtype=np.complex128)
        e2 = alg.eps ** 2
        imgs = [e2 * (np.trace(a @ v) * b + np.trace(b @ v) * a) / (2 * n)
                for v in alg.basis]
        return _endo_tensor_from_images_float(alg, imgs)
    e2 = alg.eps * alg.eps
    imgs = []
    for v in alg.basis:
        t1 = mat_scale(b, e2 * inner(a, v) / (2 * n))
        t2 = mat_scale(a, e2 * inner(b, v) / (2 * n))
        imgs.append(mat_add(t1, t2))
    return _endo_tensor_from_images(alg, imgs, check=check)


def mu_tensor(alg, a, b=None, check: bool = True):
    """mu_{a,b}: corresponds to v -> eps^2 (avb + bva)_0 / 2."""
    if b is None:
        b = a
    if alg.mode == "float":
        a = np.asarray(a, dtype=np.complex128)
        b = np.asarray(b, dtype=np.complex128)
        e2 = alg.eps ** 2
        imgs = [traceless_np(e2 * (a @ v @ b + b @ v @ a) / 2)
                for v in alg.basis]
        return _endo_tensor_from_images_float(alg, imgs)
    e2 = alg.eps * alg.eps
    half = QQi(Fraction(1, 2))
    imgs = []
    for v in alg.basis:
        t = mat_add(mat_mul(mat_mul(a, v), b), mat_mul(mat_mul(b, v), a))
        imgs.append(traceless_part(mat_scale(t, e2 * half)))
    return _endo_tensor_from_images(alg, imgs, check=check)


def traceless_np(w: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    return w - np.trace(w) / n * np.eye(n)


# ---------------------------------------------------------------------------
# the projection onto Ker(Omega - Id)
# ---------------------------------------------------------------------------

def tau_kernel_matrix(alg):
    """Columns vec(tau_{e_i}), a basis of Ker(Omega - Id) for n >= 3 (cached)."""
    if "_tau_kernel" not in alg.__dict__:
        cols = []
        for i in range(alg.m):
            if alg.mode == "float":
                a = alg.basis[i]
            else:
                a = alg.basis[i]
            cols.append(sym_vec(alg, tau_tensor(alg, a)))
        alg._tau_kernel = cols
    return alg._tau_kernel


def project_ker_T(alg, lam):
    """Projection onto Ker(Omega - Id) along (Omega - Id)(T).

    Solves  sum_i t_i tau_{e_i} + (Omega - Id) sigma = lam  and returns
    (Pi lam, t, sigma).
    """
    if alg.n < 3:
        raise ValueError("projection needs n >= 3")
    prs = sym_pairs(alg.m)
    dimT = len(prs)
    K = tau_kernel_matrix(alg)
    OM = omega_matrix(alg)
    if alg.mode == "float":
        A = np.zeros((dimT, alg.m + dimT), dtype=np.complex128)
        for i in range(alg.m):
            A[:, i] = K[i]
        A[:, alg.m:] = OM - np.eye(dimT)
        rhs = sym_vec(alg, lam)
        x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        t = x[:alg.m]
        pl = zeros_sym(alg)
        for i in range(alg.m):
            pl += t[i] * sym_unvec(alg, K[i])
        sigma = sym_unvec(alg, x[alg.m:])
        return pl, t, sigma
    if "_proj_solver" not in alg.__dict__:
        one = alg.f_one()
        rows = []
        for r in range(dimT):
            row = [K[i][r] for i in range(alg.m)]
            orow = OM[r]
            row.extend(orow[c] - (one if c == r else alg.f_zero())
                       for c in range(dimT))
            rows.append(row)
        from .numeric import PresolvedSystem
        alg._proj_solver = PresolvedSystem(DenseMatrix.from_rows(rows))
    rhs = sym_vec(alg, lam)
    x = alg._proj_solver.solve(rhs)
    if x is None:
        raise ValueError("projection system is inconsistent")
    t = x[:alg.m]
    pl = zeros_sym(alg)
    for i in range(alg.m):
        if t[i]:
            pl = sym_add(pl, sym_scale(sym_unvec(alg, K[i]), t[i]))
    sigma = sym_unvec(alg, x[alg.m:])
    return pl, t, sigma
