"""Witt bases for indefinite Hermitian forms, canonical square-zero
representatives, orbit invariants/counts, and moduli-dimension arithmetic.

Conventions.  The sesquilinear form on C^n is <v,w> = conj(v)^T eta w
(antilinear in the first slot) with eta = diag(1_l, -1_j).  Witt vectors are
kept rational: e_r = delta_r + delta_{l+r} and ehat_r = (delta_r -
delta_{l+r})/2, which reproduces the normalized pairing table exactly.
The orbit invariant ind_+ is the positive index of the Hermitian form
i<a(.),.>; for the canonical representative a ehat_r = i s_r e_r the index
equals the number of +1 signs s_r.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .algebras import LieAlgebra, mat_mul, _mat
from .numeric import (DenseMatrix, QQi, hermitian_signature, invert, rank)


@dataclass(frozen=True)
class OrbitLabel:
    rank: int
    ind_plus: Optional[int] = None  # su only

    def key(self):
        return (self.rank, -1 if self.ind_plus is None else self.ind_plus)


@dataclass
class WittBasis:
    l: int
    j: int
    k: int
    e: List[list]      # null vectors, paired with ehat
    ehat: List[list]
    u: List[list]      # orthonormal complement (unit vectors)

    def all_vectors(self):
        return self.e + self.ehat + self.u


def _delta(n, i):
    v = [QQi(0)] * n
    v[i] = QQi(1)
    return v


def herm_pair(l: int, j: int, v, w):
    """<v,w> = sum conj(v_i) eta_i w_i."""
    t = QQi(0)
    for i in range(l + j):
        s = 1 if i < l else -1
        t = t + v[i].conj() * w[i] * s
    return t


def witt_basis(l: int, j: int, k: int) -> WittBasis:
    """Canonical Witt basis adapted to a k-dimensional totally null subspace."""
    if not (0 <= k <= j <= l):
        raise ValueError("needs 0 <= k <= j <= l")
    n = l + j
    e = []
    ehat = []
    half = QQi(Fraction(1, 2))
    for r in range(k):
        er = [QQi(0)] * n
        er[r] = QQi(1)
        er[l + r] = QQi(1)
        e.append(er)
        hr = [QQi(0)] * n
        hr[r] = half
        hr[l + r] = -half
        ehat.append(hr)
    used = set(range(k)) | set(range(l, l + k))
    u = [_delta(n, i) for i in range(n) if i not in used]
    wb = WittBasis(l, j, k, e, ehat, u)
    _check_witt(wb)
    return wb


def _check_witt(wb: WittBasis) -> None:
    l, j, k = wb.l, wb.j, wb.k
    for r in range(k):
        for s in range(k):
            if herm_pair(l, j, wb.e[r], wb.e[s]) != QQi(0):
                raise AssertionError("<e_r,e_s> != 0")
            if herm_pair(l, j, wb.ehat[r], wb.ehat[s]) != QQi(0):
                raise AssertionError("<ehat_r,ehat_s> != 0")
            want = QQi(1) if r == s else QQi(0)
            if herm_pair(l, j, wb.e[r], wb.ehat[s]) != want:
                raise AssertionError("<e_r,ehat_s> != delta_rs")
    for r in range(k):
        for p, up in enumerate(wb.u):
            if herm_pair(l, j, wb.e[r], up) != QQi(0):
                raise AssertionError("<e_r,u_p> != 0")
            if herm_pair(l, j, wb.ehat[r], up) != QQi(0):
                raise AssertionError("<ehat_r,u_p> != 0")
    for p, up in enumerate(wb.u):
        for q, uq in enumerate(wb.u):
            v = herm_pair(l, j, up, uq)
            if p == q:
                if v != QQi(1) and v != QQi(-1):
                    raise AssertionError("<u_p,u_p> not a unit")
            elif v != QQi(0):
                raise AssertionError("<u_p,u_q> != 0 for p != q")


# ---------------------------------------------------------------------------
# canonical representatives
# ---------------------------------------------------------------------------

def max_rank(alg) -> int:
    kind = alg.spec.kind
    if kind in ("sl_r", "sl_c", "sl_c_real"):
        return alg.n // 2
    if kind == "su":
        return alg.spec.j
    if kind == "sl_h":
        return (alg.n // 2) // 2
    raise ValueError(kind)


def enumerate_orbits(alg) -> List[OrbitLabel]:
    kind = alg.spec.kind
    if kind == "su":
        out = []
        for k in range(alg.spec.j + 1):
            for p in range(k + 1):
                out.append(OrbitLabel(k, p))
        return out
    return [OrbitLabel(k) for k in range(max_rank(alg) + 1)]


def canonical_nilpotent(alg, label: OrbitLabel):
    """A square-zero representative of the given orbit label (exact)."""
    kind = alg.spec.kind
    n = alg.n
    k = label.rank
    if k < 0 or k > max_rank(alg):
        raise ValueError(f"rank {k} out of range for {alg.spec.label()}")
    a = _mat(n)
    if kind in ("sl_r", "sl_c", "sl_c_real"):
        if label.ind_plus not in (None, 0):
            raise ValueError("ind_plus only labels su orbits")
        for r in range(k):
            a[r][k + r] = QQi(1)
    elif kind == "sl_h":
        if label.ind_plus not in (None, 0):
            raise ValueError("ind_plus only labels su orbits")
        kq = n // 2
        # quaternionic E_{r, k+r}: Z-block nilpotent, W = 0
        for r in range(k):
            a[r][k + r] = QQi(1)
            a[kq + r][kq + k + r] = QQi(1)
    else:  # su
        p = label.ind_plus
        if p is None or not (0 <= p <= k):
            raise ValueError("su labels need 0 <= ind_plus <= rank")
        l = alg.spec.l
        wb = witt_basis(l, alg.spec.j, k)
        for r in range(k):
            s = 1 if r < p else -1
            # a = i sum s_r e_r <e_r, .>  so that a ehat_r = i s_r e_r
            er = wb.e[r]
            for row in range(n):
                if not er[row]:
                    continue
                for col in range(n):
                    eta = 1 if col < l else -1
                    coef = QQi(0, s) * er[row] * er[col].conj() * eta
                    a[row][col] = a[row][col] + coef
    if not alg.member_check(a):
        raise AssertionError("canonical representative escaped the algebra")
    sq = mat_mul(a, a)
    if any(sq[i][jx] for i in range(n) for jx in range(n)):
        raise AssertionError("canonical representative is not square-zero")
    return a


def complex_rank(a) -> int:
    return rank(DenseMatrix.from_rows(a))


def orbit_invariants(alg, a) -> OrbitLabel:
    """(rank, ind_+) of a square-zero element; rank over the right skew field."""
    n = alg.n
    sq = mat_mul(a, a)
    if any(sq[i][jx] for i in range(n) for jx in range(n)):
        raise ValueError("element does not square to zero")
    rk = complex_rank(a)
    kind = alg.spec.kind
    if kind == "sl_h":
        if rk % 2:
            raise AssertionError("quaternionic matrix with odd complex rank")
        return OrbitLabel(rk // 2)
    if kind != "su":
        return OrbitLabel(rk)
    l = alg.spec.l
    # Gram matrix of B(v,w) = i <a v, w> on the standard basis
    B = [[QQi(0)] * n for _ in range(n)]
    for i in range(n):
        av = [a[row][i] for row in range(n)]   # a * delta_i
        for jx in range(n):
            w = _delta(n, jx)
            B[i][jx] = QQi(0, 1) * herm_pair(l, alg.spec.j, av, w)
    plus, minus, zero = hermitian_signature(B)
    return OrbitLabel(rk, plus)


def random_group_conjugation(alg, rng):
    """An exact group element: the Cayley transform of a random algebra element.

    (I - X)(I + X)^{-1} lies in the relevant matrix group whenever X lies in
    the algebra (and I + X is invertible): the Cayley transform of a
    traceless / skew-eta-Hermitian / quaternionic matrix preserves the
    defining antiautomorphism conditions, and conjugation by it preserves
    orbit invariants.
    """
    n = alg.n
    for _ in range(60):
        co = []
        for _ in range(alg.m):
            if alg.field == "R":
                co.append(Fraction(rng.randint(-1, 1), rng.randint(1, 3)))
            else:
                co.append(QQi(Fraction(rng.randint(-1, 1), rng.randint(1, 3)),
                              Fraction(rng.randint(-1, 1), rng.randint(1, 3))))
        X = alg.uncoords(co)
        eye = _mat(n)
        for i in range(n):
            eye[i][i] = QQi(1)
        ipx = [[eye[i][jx] + X[i][jx] for jx in range(n)] for i in range(n)]
        imx = [[eye[i][jx] - X[i][jx] for jx in range(n)] for i in range(n)]
        try:
            inv = invert(DenseMatrix.from_rows(ipx))
        except ZeroDivisionError:
            continue
        invm = [[inv.at(i, jx) for jx in range(n)] for i in range(n)]
        return mat_mul(imx, invm), ipx, invm
    raise RuntimeError("could not draw an invertible Cayley transform")


def conjugate(alg, g_parts, a):
    """g a g^{-1} computed from the Cayley pieces ((I-X)(I+X)^{-1}, ...)."""
    g, ipx, ipx_inv = g_parts
    ginv = invert(DenseMatrix.from_rows(g))
    gm = [[ginv.at(i, jx) for jx in range(alg.n)] for i in range(alg.n)]
    return mat_mul(mat_mul(g, a), gm)


def moduli_dimension(alg) -> int:
    """Dimension over F of the Einstein-family parameter space."""
    if alg.n < 3:
        raise ValueError("needs n >= 3")
    kind = alg.spec.kind
    n = alg.n
    if kind in ("sl_r", "sl_c"):
        return (n * n) // 2
    if kind == "su":
        return 2 * alg.spec.l * alg.spec.j
    if kind == "sl_h":
        return 4 * ((n * n) // 8)
    raise ValueError(f"no moduli dimension for {kind}")


def bundle_dimension_table(alg) -> dict:
    """The base/fibre arithmetic behind the moduli dimension."""
    kind = alg.spec.kind
    n = alg.n
    if kind in ("sl_r", "sl_c"):
        k = n // 2
        base = k * k if n % 2 == 0 else (k + 2) * k
        fibre = k * k
    elif kind == "su":
        l, j = alg.spec.l, alg.spec.j
        base = (2 * l - j) * j
        fibre = j * j
    elif kind == "sl_h":
        kq = n // 2
        k = kq // 2
        base_q = k * k if kq % 2 == 0 else (k + 2) * k
        return {"base": 4 * base_q, "fibre": 4 * k * k,
                "total": 4 * (base_q + k * k)}
    else:
        raise ValueError(kind)
    return {"base": base, "fibre": fibre, "total": base + fibre}


def tangent_dimension(alg, a) -> int:
    """dim over F of {x in g : a x + x a = 0} at a max-rank square-zero a.

    At non-maximal rank the square-zero variety is singular and the kernel
    overshoots the stratum dimension, so such inputs are refused.
    """
    sq = mat_mul(a, a)
    if any(sq[i][jx] for i in range(alg.n) for jx in range(alg.n)):
        raise ValueError("element does not square to zero")
    lab = orbit_invariants(alg, a)
    if lab.rank != max_rank(alg):
        raise ValueError("tangent dimension is only meaningful at maximal rank")
    m = alg.m
    rows = []
    # columns indexed by the algebra basis; rows by flattened matrix entries
    imgs = []
    for i in range(m):
        b = alg.basis[i]
        img = [[sum((a[r][s] * b[s][c2] + b[r][s] * a[s][c2]
                     for s in range(alg.n)), QQi(0))
                for c2 in range(alg.n)] for r in range(alg.n)]
        imgs.append(img)
    if alg.field == "R":
        for r in range(alg.n):
            for c2 in range(alg.n):
                rows.append([imgs[i][r][c2].re for i in range(m)])
                rows.append([imgs[i][r][c2].im for i in range(m)])
    else:
        for r in range(alg.n):
            for c2 in range(alg.n):
                rows.append([imgs[i][r][c2] for i in range(m)])
    M = DenseMatrix.from_rows(rows)
    return alg.m - rank(M)


def su_null_endo_dimension(l: int, j: int, k: int) -> int:
    """dim of {a in su(l,j): a(C^n) inside the canonical null subspace V}."""
    return _su_condition_dimension(l, j, k, image_only=True)


def su_null_stabilizer_dimension(l: int, j: int, k: int) -> int:
    """dim of {a in su(l,j): a(V) inside V}."""
    return _su_condition_dimension(l, j, k, image_only=False)


def _su_condition_dimension(l: int, j: int, k: int, image_only: bool) -> int:
    from .algebras import AlgebraSpec, build_algebra
    alg = build_algebra(AlgebraSpec("su", l + j, l, j), verify=False)
    n = l + j
    wb = witt_basis(l, j, k)
    # a(C^n) in V  <=>  P a = 0 for the coordinate projection P onto a
    # complement of V = span(e_1..e_k); P comes from the Witt basis change.
    cols = wb.e + wb.ehat + wb.u
    T = DenseMatrix.from_rows([[cols[c][r] for c in range(n)]
                               for r in range(n)])
    Tinv = invert(T)
    # rows k..n-1 of Tinv extract the non-V coordinates
    proj_rows = [[Tinv.at(r, c) for c in range(n)] for r in range(k, n)]
    rows = []
    for bidx in range(alg.m):
        b = alg.basis[bidx]
        if image_only:
            # columns of b: the images of the standard basis vectors
            conds = []
            for c2 in range(n):
                colv = [b[r][c2] for r in range(n)]
                for pr in proj_rows:
                    conds.append(sum((pr[r] * colv[r] for r in range(n)),
                                     QQi(0)))
        else:
            conds = []
            for e_r in wb.e:
                img = [sum((b[r][s] * e_r[s] for s in range(n)), QQi(0))
                       for r in range(n)]
                for pr in proj_rows:
                    conds.append(sum((pr[r] * img[r] for r in range(n)),
                                     QQi(0)))
        rows.append(conds)
    # transpose: conditions as rows over the real coordinates of su
    nc = len(rows[0]) if rows else 0
    cond_rows = []
    for c2 in range(nc):
        cond_rows.append([rows[bidx][c2].re for bidx in range(alg.m)])
        cond_rows.append([rows[bidx][c2].im for bidx in range(alg.m)])
    if not cond_rows:
        return alg.m
    M = DenseMatrix.from_rows(cond_rows)
    return alg.m - rank(M)


def orbit_table(alg) -> dict:
    labels = enumerate_orbits(alg)
    return {
        "algebra": alg.spec.label(),
        "labels": [{"rank": lab.rank, "ind_plus": lab.ind_plus}
                   for lab in labels],
        "count": len(labels),
        "moduli_dim": moduli_dimension(alg) if alg.n >= 3 else None,
    }
