"""The five matrix Lie algebra triples (g, F, eps).

Supported kinds::

    sl_r       sl(n,R)            F = R, eps = 1
    sl_c       sl(n,C)            F = C, eps = 1 or i
    su         su(l,j), l+j = n   F = R, eps = i
    sl_h       sl(n/2,H)          F = R, eps = 1, n even
    sl_c_real  sl(n,C) as a real Lie algebra (basis e_1..e_m, i*e_1..i*e_m)

Every algebra is built exactly: basis matrices have Gaussian-rational
entries, structure constants and the Killing form live over the scalar
field F (Fraction for F = R, QQi for F = C).  ``to_float`` produces a
numpy twin for the float pipelines.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from .numeric import (DenseMatrix, QQi, conj, imag_part, invert, real_part)

ZERO = QQi(0)
ONE = QQi(1)
I = QQi(0, 1)


@dataclass(frozen=True)
class AlgebraSpec:
    kind: str                 # sl_r | sl_c | su | sl_h | sl_c_real
    n: int                    # complex matrix size (2k for sl_h)
    l: Optional[int] = None   # su only
    j: Optional[int] = None
    eps: str = "1"            # "1" or "i"

    def __post_init__(self):
        if self.kind not in ("sl_r", "sl_c", "su", "sl_h", "sl_c_real"):
            raise ValueError(f"unknown algebra kind {self.kind!r}")
        if self.kind == "su":
            if self.l is None or self.j is None:
                raise ValueError("su needs l and j")
            if not (self.l >= self.j >= 0 and self.l + self.j == self.n):
                raise ValueError("su requires l >= j >= 0 and l + j = n")
            if self.n < 2:
                raise ValueError("su needs n >= 2")
            object.__setattr__(self, "eps", "i")
        elif self.kind == "sl_h":
            if self.n < 2 or self.n % 2:
                raise ValueError("sl_h needs even n = 2k >= 2")
            object.__setattr__(self, "eps", "1")
        else:
            if self.n < 2:
                raise ValueError("needs n >= 2")
            if self.kind == "sl_c":
                if self.eps not in ("1", "i"):
                    raise ValueError("sl_c eps must be 1 or i")
            else:
                object.__setattr__(self, "eps", "1")

    @property
    def scalar_field(self) -> str:
        return "C" if self.kind == "sl_c" else "R"

    def label(self) -> str:
        if self.kind == "su":
            return f"su({self.l},{self.j})"
        if self.kind == "sl_h":
            return f"sl({self.n // 2},H)"
        if self.kind == "sl_c":
            return f"sl({self.n},C;eps={self.eps})"
        if self.kind == "sl_c_real":
            return f"sl({self.n},C)_R"
        return f"sl({self.n},R)"


# -- basis construction ------------------------------------------------------

def _mat(n):
    return [[QQi(0) for _ in range(n)] for _ in range(n)]


def _eij(n, i, j, v=None):
    m = _mat(n)
    m[i][j] = ONE if v is None else v
    return m


def _sl_basis(n):
    basis = []
    for i in range(n):
        for j in range(n):
            if i != j:
                basis.append(_eij(n, i, j))
    for i in range(n - 1):
        m = _mat(n)
        m[i][i] = ONE
        m[i + 1][i + 1] = -ONE
        basis.append(m)
    return basis


def _su_basis(l, j):
    n = l + j
    basis = []

    def cross(i, k):
        return (i < l) != (k < l)

    for i in range(n):
        for k in range(i + 1, n):
            if cross(i, k):
                a = _mat(n); a[i][k] = ONE; a[k][i] = ONE
                b = _mat(n); b[i][k] = I; b[k][i] = -I
            else:
                a = _mat(n); a[i][k] = ONE; a[k][i] = -ONE
                b = _mat(n); b[i][k] = I; b[k][i] = I
            basis.append(a)
            basis.append(b)
    for i in range(n - 1):
        m = _mat(n)
        m[i][i] = I
        m[i + 1][i + 1] = -I
        basis.append(m)
    return basis


def _slh_basis(k):
    """sl(k,H) inside gl(2k,C): blocks [[Z, -conj(W)], [W, conj(Z)]]."""
    n = 2 * k
    basis = []

    def emb(Z, W):
        m = _mat(n)
        for a in range(k):
            for b in range(k):
                m[a][b] = Z[a][b]
                m[a][k + b] = -W[a][b].conj()
                m[k + a][b] = W[a][b]
                m[k + a][k + b] = Z[a][b].conj()
        return m

    zk = [[QQi(0)] * k for _ in range(k)]

    def zmat(i, j, v):
        Z = [row[:] for row in zk]
        Z[i][j] = v
        return Z

    for i in range(k):
        for j in range(k):
            if i != j:
                basis.append(emb(zmat(i, j, ONE), zk))
                basis.append(emb(zmat(i, j, I), zk))
    for i in range(k - 1):
        Z = [row[:] for row in zk]
        Z[i][i] = ONE
        Z[i + 1][i + 1] = -ONE
        basis.append(emb(Z, zk))
    for i in range(k):
        basis.append(emb(zmat(i, i, I), zk))
    for i in range(k):
        for j in range(k):
            basis.append(emb(zk, zmat(i, j, ONE)))
            basis.append(emb(zk, zmat(i, j, I)))
    return basis


def mat_mul(a, b):
    n = len(a)
    out = _mat(n)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for s in range(n):
            v = ai[s]
            if v:
                bs = b[s]
                for j in range(n):
                    if bs[j]:
                        oi[j] = oi[j] + v * bs[j]
    return out


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, s):
    return [[s * x for x in ra] for ra in a]


def bracket(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_trace(a):
    t = QQi(0)
    for i in range(len(a)):
        t = t + a[i][i]
    return t


def traceless_part(w):
    """(w)_0 = w - (tr w) Id / n."""
    n = len(w)
    t = mat_trace(w) / n
    out = [row[:] for row in w]
    for i in range(n):
        out[i][i] = out[i][i] - t
    return out


def inner(a, b):
    """(a, b) = tr(ab)."""
    t = QQi(0)
    for i in range(len(a)):
        for s in range(len(a)):
            if a[i][s] and b[s][i]:
                t = t + a[i][s] * b[s][i]
    return t


class LieAlgebra:
    """A built triple with basis, structure constants and Killing form."""

    def __init__(self, spec: AlgebraSpec, verify: bool = True):
        self.spec = spec
        self.n = spec.n
        self.field = spec.scalar_field
        self.eps = I if spec.eps == "i" else ONE
        self.mode = "exact"

        if spec.kind in ("sl_r", "sl_c"):
            self.basis = _sl_basis(spec.n)
        elif spec.kind == "su":
            self.basis = _su_basis(spec.l, spec.j)
        elif spec.kind == "sl_h":
            self.basis = _slh_basis(spec.n // 2)
        else:  # sl_c_real
            cplx = _sl_basis(spec.n)
            self.basis = cplx + [mat_scale(b, I) for b in cplx]
        self.m = len(self.basis)

        self._init_coords()
        self._init_structure()
        self._init_killing()
        if verify:
            self._verify_build()

    # -- scalars over F ------------------------------------------------

    def f_zero(self):
        return Fraction(0) if self.field == "R" else QQi(0)

    def f_one(self):
        return Fraction(1) if self.field == "R" else QQi(1)

    def f_scalar(self, q: QQi):
        """Convert a Gaussian rational into an F-scalar (checked for F = R)."""
        if self.field == "C":
            return q
        if q.im != 0:
            raise ValueError("non-real scalar in a real algebra")
        return q.re

    # -- coordinates ----------------------------------------------------

    def _flatten(self, a) -> List[Fraction]:
        """Real flattening of an n x n Gaussian-rational matrix."""
        out = []
        for row in a:
            for x in row:
                out.append(x.re)
                out.append(x.im)
        return out

    def _init_coords(self):
        n2 = 2 * self.n * self.n
        cols = [self._flatten(b) for b in self.basis]
        if self.field == "C":
            # complex span: i * basis elements enlarge the real column space
            cols_i = [self._flatten(mat_scale(b, I)) for b in self.basis]
        else:
            cols_i = []
        # pick rows that make the real coordinate matrix invertible
        width = self.m if self.field == "R" else 2 * self.m
        allcols = cols + cols_i
        rows = []
        pivot_rows = []
        rworking: List[List[Fraction]] = []
        for ridx in range(n2):
            cand = [allcols[c][ridx] for c in range(width)]
            rworking.append(list(cand))
            trial = [list(r) for r in rworking]
            from .numeric import _echelon_exact
            if len(_echelon_exact(trial, width)) == len(rworking):
                pivot_rows.append(ridx)
                rows.append(cand)
            else:
                rworking.pop()
            if len(pivot_rows) == width:
                break
        if len(pivot_rows) != width:
            raise RuntimeError("basis is not linearly independent")
        self._coord_rows = pivot_rows
        self._coord_inv = invert(DenseMatrix.from_rows(rows))

    def _coord_raw(self, a) -> list:
        flat = self._flatten(a)
        sub = [flat[r] for r in self._coord_rows]
        if "_coord_inv_sparse" not in self.__dict__:
            width = self._coord_inv.rows
            self._coord_inv_sparse = [
                [(k, self._coord_inv.at(i, k)) for k in range(width)
                 if self._coord_inv.at(i, k)]
                for i in range(width)]
        raw = []
        for row in self._coord_inv_sparse:
            t = Fraction(0)
            for k, v in row:
                if sub[k]:
                    t += v * sub[k]
            raw.append(t)
        if self.field == "R":
            return raw
        return [QQi(raw[i], raw[self.m + i]) for i in range(self.m)]

    def coords(self, a, check: bool = True) -> list:
        """Coordinates in F^m of a matrix in g; raises if a is not in g."""
        if len(a) != self.n or any(len(r) != self.n for r in a):
            raise ValueError("matrix size mismatch")
        co = self._coord_raw(a)
        if check and not self.member_check(a, _coords=co):
            raise ValueError("matrix is not a member of the algebra")
        return co

    def uncoords(self, v) -> list:
        out = _mat(self.n)
        for idx, c in enumerate(v):
            if c:
                out = mat_add(out, mat_scale(self.basis[idx], QQi.of(c) if not isinstance(c, QQi) else c))
        return out

    def member_check(self, a, _coords=None) -> bool:
        """True iff the matrix lies in g (reconstruction matches exactly)."""
        if len(a) != self.n or any(len(r) != self.n for r in a):
            raise ValueError("matrix size mismatch")
        if _coords is None:
            _coords = self._coord_raw(a)
        recon = self.uncoords(_coords)
        return all(recon[i][j] == a[i][j]
                   for i in range(self.n) for j in range(self.n))

    # -- structure constants and Killing form ---------------------------

    def _init_structure(self):
        m = self.m
        # C[j][k] = list of (l, value) with value over F
        self.C_rows: List[List[list]] = [[[] for _ in range(m)] for _ in range(m)]
        self.C_nnz = []
        for jj in range(m):
            for kk in range(jj + 1, m):
                br = bracket(self.basis[jj], self.basis[kk])
                co = self.coords(br)
                for ll, val in enumerate(co):
                    if val:
                        self.C_rows[jj][kk].append((ll, val))
                        self.C_rows[kk][jj].append((ll, -val))
                        self.C_nnz.append((jj, kk, ll, val))
                        self.C_nnz.append((kk, jj, ll, -val))

    def C(self, jj, kk, ll):
        for l2, v in self.C_rows[jj][kk]:
            if l2 == ll:
                return v
        return self.f_zero()

    def ad_matrix(self, jj):
        """(ad e_j) with entries A[k][l] = C_jk^l."""
        m = self.m
        A = [[self.f_zero()] * m for _ in range(m)]
        for kk in range(m):
            for ll, v in self.C_rows[jj][kk]:
                A[kk][ll] = v
        return A

    def _init_killing(self):
        m = self.m
        ads = [self.ad_matrix(jj) for jj in range(m)]
        beta = [[self.f_zero()] * m for _ in range(m)]
        for jj in range(m):
            for kk in range(jj, m):
                t = self.f_zero()
                Aj, Ak = ads[jj], ads[kk]
                for p in range(m):
                    for q in range(m):
                        if Aj[p][q] and Ak[q][p]:
                            t = t + Aj[p][q] * Ak[q][p]
                beta[jj][kk] = t
                beta[kk][jj] = t
        self.beta = beta
        rows = DenseMatrix.from_rows(beta)
        self.beta_inv_mat = invert(rows)
        self.beta_inv = [[self.beta_inv_mat.at(i, jx) for jx in range(m)]
                         for i in range(m)]

    # -- invariants ------------------------------------------------------

    def killing(self, a, b):
        """<a,b> via contracted components; checked against 2n tr(ab)."""
        ca, cb = self.coords(a), self.coords(b)
        t = self.f_zero()
        for jj in range(self.m):
            if not ca[jj]:
                continue
            row = self.beta[jj]
            for kk in range(self.m):
                if cb[kk] and row[kk]:
                    t = t + row[kk] * ca[jj] * cb[kk]
        tr = QQi.of(2 * self.n) * inner(a, b)
        if self.spec.kind == "sl_c_real":
            # Killing form of the underlying real algebra is 2 Re beta_C
            expected = 2 * tr.re
        elif self.field == "R":
            expected = self.f_scalar(tr)
        else:
            expected = tr
        if t != expected:
            raise AssertionError("Killing form disagrees with 2n tr(ab)")
        return t

    def _verify_build(self):
        for b in self.basis:
            if not self.member_check(b):
                raise AssertionError("basis element fails membership")
        # beta nondegeneracy comes with the inverse; check total skewness of
        # C_jkl = C_jk^s beta_sl on the lowered sparse entries.
        m = self.m
        lowered = {}
        for (jj, kk, ll, v) in self.C_nnz:
            for l2 in range(m):
                if self.beta[ll][l2]:
                    key = (jj, kk, l2)
                    lowered[key] = lowered.get(key, self.f_zero()) + v * self.beta[ll][l2]
        lowered = {k: v for k, v in lowered.items() if v}
        for (jj, kk, l2), v in lowered.items():
            if lowered.get((kk, jj, l2), self.f_zero()) != -v:
                raise AssertionError("C_jkl not skew in j,k")
            if lowered.get((jj, l2, kk), self.f_zero()) != -v:
                raise AssertionError("C_jkl not skew in k,l")

    # -- float twin ------------------------------------------------------

    def to_float(self) -> "FloatAlgebra":
        return FloatAlgebra(self)


class FloatAlgebra:
    """numpy view of an exactly built algebra (complex128/float64)."""

    def __init__(self, exact: LieAlgebra):
        self.exact = exact
        self.spec = exact.spec
        self.n = exact.n
        self.m = exact.m
        self.field = exact.field
        self.eps = complex(exact.eps)
        self.mode = "float"
        dt = np.float64 if self.field == "R" else np.complex128
        m = exact.m
        C = np.zeros((m, m, m), dtype=dt)
        for (jj, kk, ll, v) in exact.C_nnz:
            C[jj, kk, ll] = complex(QQi.of(v)) if isinstance(v, QQi) else float(v)
        self.C_dense = C
        conv = (lambda x: float(x)) if self.field == "R" else (lambda x: complex(x))
        self.beta = np.array([[conv(x) for x in row] for row in exact.beta], dtype=dt)
        self.beta_inv = np.array([[conv(x) for x in row] for row in exact.beta_inv], dtype=dt)
        self.basis = [np.array([[complex(x) for x in row] for row in b], dtype=np.complex128)
                      for b in exact.basis]
        # real coordinate extraction reused from the exact build
        self._coord_rows = exact._coord_rows
        self._coord_inv = exact._coord_inv.to_numpy().real

    def coords(self, a: np.ndarray) -> np.ndarray:
        flat = np.empty(2 * self.n * self.n)
        fr = np.asarray(a, dtype=np.complex128).reshape(-1)
        flat[0::2] = fr.real
        flat[1::2] = fr.imag
        sub = flat[self._coord_rows]
        raw = self._coord_inv @ sub
        if self.field == "R":
            return raw
        return raw[:self.m] + 1j * raw[self.m:]

    def uncoords(self, v) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        for idx, c in enumerate(v):
            out += complex(c) * self.basis[idx]
        return out


def build_algebra(spec: AlgebraSpec, verify: bool = True) -> LieAlgebra:
    return LieAlgebra(spec, verify=verify)


def serialize_algebra(alg: LieAlgebra) -> dict:
    """JSON document with basis, structure constants and Killing form."""
    def scal(x):
        q = QQi.of(x) if not isinstance(x, QQi) else x
        return [str(q.re), str(q.im)]

    return {
        "kind": alg.spec.kind,
        "n": alg.spec.n,
        "l": alg.spec.l,
        "j": alg.spec.j,
        "eps": alg.spec.eps,
        "dim": alg.m,
        "basis": [[[scal(x) for x in row] for row in b] for b in alg.basis],
        "structure_constants": [
            [jj, kk, ll, scal(QQi.of(v) if not isinstance(v, QQi) else v)]
            for (jj, kk, ll, v) in sorted(
                alg.C_nnz, key=lambda t: (t[0], t[1], t[2]))
        ],
        "killing": [[scal(QQi.of(x) if not isinstance(x, QQi) else x)
                     for x in row] for row in alg.beta],
    }
