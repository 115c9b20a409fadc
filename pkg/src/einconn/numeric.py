"""Scalar fields and dense linear algebra used by every other module.

Two scalar regimes are supported:

* exact -- ``fractions.Fraction`` for real data and :class:`QQi` (Gaussian
  rationals, a pair of Fractions) for complex data.  All elimination is
  fraction-free in the Bareiss style, so ranks, kernels and solutions are
  certified, with no tolerances involved.
* float -- ``float`` / ``complex`` entries (numpy under the hood).  Zero
  tests compare singular values against ``tol * largest``.

The default float tolerance is 1e-9 (relative); callers may override it
per call or via :func:`set_default_tol`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

DEFAULT_TOL = 1e-9


def set_default_tol(tol: float) -> None:
    global DEFAULT_TOL
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    DEFAULT_TOL = tol


class QQi:
    """Gaussian rational a + b*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    # -- constructors -------------------------------------------------
    @staticmethod
    def i() -> "QQi":
        return QQi(0, 1)

    @staticmethod
    def of(x) -> "QQi":
        if isinstance(x, QQi):
            return x
        if isinstance(x, complex):
            raise TypeError("refusing to build exact scalar from float complex")
        return QQi(x)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, o):
        o = QQi.of(o)
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, o):
        o = QQi.of(o)
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return QQi.of(o) - self

    def __mul__(self, o):
        o = QQi.of(o)
        return QQi(self.re * o.re - self.im * o.im,
                   self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = QQi.of(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi((self.re * o.re + self.im * o.im) / d,
                   (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        return QQi.of(o) / self

    def conj(self) -> "QQi":
        return QQi(self.re, -self.im)

    def __eq__(self, o):
        if isinstance(o, QQi):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}+{self.im}i)"

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)


Scalar = Union[int, Fraction, QQi, float, complex]


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, QQi))


def conj(x):
    if isinstance(x, QQi):
        return x.conj()
    if isinstance(x, complex):
        return x.conjugate()
    return x


def real_part(x):
    if isinstance(x, QQi):
        return x.re
    if isinstance(x, complex):
        return x.real
    return x


def imag_part(x):
    if isinstance(x, QQi):
        return x.im
    if isinstance(x, complex):
        return x.imag
    return Fraction(0) if isinstance(x, (int, Fraction)) else 0.0


def as_float(x):
    if isinstance(x, QQi):
        c = complex(x)
        return c.real if c.imag == 0 else c
    if isinstance(x, Fraction):
        return float(x)
    return x


# ---------------------------------------------------------------------------
# dense matrices
# ---------------------------------------------------------------------------

@dataclass
class DenseMatrix:
    """Row-major dense matrix over one of the four scalar kinds."""

    rows: int
    cols: int
    data: list

    def __post_init__(self):
        if len(self.data) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Scalar]]) -> "DenseMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(row)
        return DenseMatrix(r, c, flat)

    def at(self, i: int, j: int):
        return self.data[i * self.cols + j]

    def row(self, i: int) -> list:
        return self.data[i * self.cols:(i + 1) * self.cols]

    def is_exact(self) -> bool:
        return all(is_exact_scalar(x) for x in self.data)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(as_float(self.at(i, j)))
                          for j in range(self.cols)]
                         for i in range(self.rows)], dtype=complex)


def _echelon_exact(rows: List[list], ncols: int, augment: Optional[List] = None):
    """In-place fraction-free (Bareiss) elimination.

    Returns the list of pivot columns.  ``augment``, when given, is a list of
    right-hand-side entries transformed alongside (one per row).
    """
    nrows = len(rows)
    piv_cols = []
    prev = 1
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if rows[i][c]:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            rows[r], rows[sel] = rows[sel], rows[r]
            if augment is not None:
                augment[r], augment[sel] = augment[sel], augment[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            fi = rows[i][c]
            ri = rows[i]
            rr = rows[r]
            if fi:
                for jj in range(ncols):
                    ri[jj] = (ri[jj] * piv - fi * rr[jj]) / prev
                if augment is not None:
                    augment[i] = (augment[i] * piv - fi * augment[r]) / prev
            else:
                for jj in range(ncols):
                    ri[jj] = (ri[jj] * piv) / prev
                if augment is not None:
                    augment[i] = (augment[i] * piv) / prev
        prev = piv
        piv_cols.append(c)
        r += 1
        if r == nrows:
            break
    return piv_cols


def _zero_like(x):
    if isinstance(x, QQi):
        return QQi(0)
    if isinstance(x, Fraction):
        return Fraction(0)
    return 0


def _matrix_zero(M: DenseMatrix):
    for x in M.data:
        if is_exact_scalar(x):
            return Fraction(0) if not isinstance(x, QQi) else QQi(0)
    return Fraction(0)


def _exact_rows(M: DenseMatrix) -> List[list]:
    """Rows with int entries promoted to Fraction (exact division safe)."""
    out = []
    for i in range(M.rows):
        out.append([Fraction(x) if isinstance(x, int) else x
                    for x in M.row(i)])
    return out


def _int_bareiss_rank(rows: List[List[int]]) -> int:
    """Fraction-free elimination over the integers (exact // divisions)."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    prev = 1
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if rows[i][c]:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            rows[r], rows[sel] = rows[sel], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            fi = rows[i][c]
            ri = rows[i]
            rr = rows[r]
            if fi:
                for jj in range(ncols):
                    ri[jj] = (ri[jj] * piv - fi * rr[jj]) // prev
            elif prev != 1:
                for jj in range(ncols):
                    ri[jj] = (ri[jj] * piv) // prev
            elif piv != 1:
                for jj in range(ncols):
                    ri[jj] = ri[jj] * piv
        prev = piv
        r += 1
        if r == nrows:
            break
    return r


def rank(M: DenseMatrix, tol: Optional[float] = None) -> int:
    """Rank over the scalar field (exact elimination or singular values)."""
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.is_exact():
        import math
        if not any(isinstance(x, QQi) for x in M.data):
            rows_int = []
            for i in range(M.rows):
                row = M.row(i)
                den = 1
                for x in row:
                    fx = Fraction(x)
                    den = den * fx.denominator // math.gcd(den, fx.denominator)
                rows_int.append([int(Fraction(x) * den) for x in row])
            return _int_bareiss_rank(rows_int)
        rows = _exact_rows(M)
        return len(_echelon_exact(rows, M.cols))
    tol = DEFAULT_TOL if tol is None else tol
    sv = np.linalg.svd(M.to_numpy(), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def kernel_basis(M: DenseMatrix, tol: Optional[float] = None) -> List[list]:
    """Basis of the right null space, one vector per free column."""
    if M.cols == 0:
        return []
    if M.rows == 0:
        z = Fraction(0)
        basis = []
        for c in range(M.cols):
            v = [z] * M.cols
            v[c] = Fraction(1)
            basis.append(v)
        return basis
    if M.is_exact():
        rows = _exact_rows(M)
        piv_cols = _echelon_exact(rows, M.cols)
        zero = _matrix_zero(M)
        one = zero + 1
        piv_set = set(piv_cols)
        basis = []
        for free in range(M.cols):
            if free in piv_set:
                continue
            v = [zero] * M.cols
            v[free] = one
            # back substitution through the echelon rows
            for r in range(len(piv_cols) - 1, -1, -1):
                c = piv_cols[r]
                s = zero
                for jj in range(c + 1, M.cols):
                    if rows[r][jj] and v[jj]:
                        s = s + rows[r][jj] * v[jj]
                v[c] = -s / rows[r][c]
            basis.append(v)
        return basis
    tol = DEFAULT_TOL if tol is None else tol
    A = M.to_numpy()
    u, sv, vh = np.linalg.svd(A)
    del u
    cutoff = tol * (sv[0] if sv.size and sv[0] > 0 else 1.0)
    r = int(np.sum(sv > cutoff))
    return [list(vh[i].conj()) for i in range(r, M.cols)]


def solve_linear(M: DenseMatrix, b: Sequence[Scalar], tol: Optional[float] = None):
    """A particular solution of ``M x = b`` or ``None`` when inconsistent.

    Free variables are set to zero, pivots are taken in column order, so the
    answer is deterministic.
    """
    if len(b) != M.rows:
        raise ValueError("right-hand side length mismatch")
    if M.is_exact() and all(is_exact_scalar(x) for x in b):
        rows = _exact_rows(M)
        rhs = [Fraction(x) if isinstance(x, int) else x for x in b]
        piv_cols = _echelon_exact(rows, M.cols, augment=rhs)
        nr = len(piv_cols)
        for i in range(nr, M.rows):
            if rhs[i]:
                return None
        zero = _matrix_zero(M)
        x = [zero] * M.cols
        for r in range(nr - 1, -1, -1):
            c = piv_cols[r]
            s = rhs[r]
            for jj in range(c + 1, M.cols):
                if rows[r][jj] and x[jj]:
                    s = s - rows[r][jj] * x[jj]
            x[c] = s / rows[r][c]
        return x
    tol = DEFAULT_TOL if tol is None else tol
    A = M.to_numpy()
    rhs = np.array([complex(as_float(x)) for x in b])
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    resid = np.abs(A @ x - rhs).max() if M.rows else 0.0
    scale = max(1.0, np.abs(rhs).max() if rhs.size else 0.0,
                np.abs(A).max() if A.size else 0.0)
    if resid > tol * scale:
        return None
    return list(x)


def invert(M: DenseMatrix) -> DenseMatrix:
    """Exact inverse of a square exact matrix."""
    if M.rows != M.cols:
        raise ValueError("inverse of a non-square matrix")
    n = M.rows
    cols = []
    for k in range(n):
        e = [_zero_like(M.data[0])] * n
        e[k] = e[k] + 1
        x = solve_linear(M, e)
        if x is None:
            raise ZeroDivisionError("matrix is singular")
        cols.append(x)
    flat = []
    for i in range(n):
        for k in range(n):
            flat.append(cols[k][i])
    return DenseMatrix(n, n, flat)


def rank_mod_p(rows_int: List[List[int]], p: int = 2147483647) -> int:
    """Rank of an integer matrix modulo a prime.

    Always a lower bound for the rational rank; used by large certificates
    where a full exact elimination would be wasteful.
    """
    if not rows_int:
        return 0
    A = np.array(rows_int, dtype=object) % p
    A = A.astype(np.int64)
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if A[i, c] % p:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            A[[r, sel]] = A[[sel, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        col = A[r + 1:, c].copy()
        nz = col != 0
        if nz.any():
            # int64 products stay below 2^62 because entries are < p < 2^31
            A[r + 1:][nz] = (A[r + 1:][nz] - col[nz, None] * A[r][None, :]) % p
        r += 1
        if r == nrows:
            break
    return r


class PresolvedSystem:
    """Reusable exact solver for many right-hand sides of one matrix.

    Plain fraction Gauss-Jordan is run once on [A | I]; every solve is then
    a matvec with the recorded row transform plus back substitution.
    """

    def __init__(self, M: DenseMatrix):
        nr, nc = M.rows, M.cols
        zero = _matrix_zero(M)
        one = zero + 1
        rows = [list(M.row(i)) for i in range(nr)]
        trans = [[one if i == k else zero for k in range(nr)] for i in range(nr)]
        piv_cols = []
        r = 0
        for c in range(nc):
            sel = None
            for i in range(r, nr):
                if rows[i][c]:
                    sel = i
                    break
            if sel is None:
                continue
            if sel != r:
                rows[r], rows[sel] = rows[sel], rows[r]
                trans[r], trans[sel] = trans[sel], trans[r]
            piv = rows[r][c]
            if piv != one:
                rows[r] = [x / piv for x in rows[r]]
                trans[r] = [x / piv for x in trans[r]]
            for i in range(r + 1, nr):
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                    trans[i] = [x - f * y for x, y in zip(trans[i], trans[r])]
            piv_cols.append(c)
            r += 1
            if r == nr:
                break
        self.rows = rows
        self.trans = trans
        self.piv_cols = piv_cols
        self.nr, self.nc = nr, nc
        self.zero = zero

    def solve(self, b):
        """Pivot-ordered particular solution or None when inconsistent."""
        nr, nc = self.nr, self.nc
        c = []
        for i in range(nr):
            t = self.zero
            ti = self.trans[i]
            for k in range(nr):
                if ti[k] and b[k]:
                    t = t + ti[k] * b[k]
            c.append(t)
        rank_ = len(self.piv_cols)
        for i in range(rank_, nr):
            if c[i]:
                return None
        x = [self.zero] * nc
        for r in range(rank_ - 1, -1, -1):
            col = self.piv_cols[r]
            s = c[r]
            row = self.rows[r]
            for jj in range(col + 1, nc):
                if row[jj] and x[jj]:
                    s = s - row[jj] * x[jj]
            x[col] = s  # pivot is normalized to 1
        return x


class IncrementalRankModP:
    """Rank tracking mod p for vectors added one at a time."""

    def __init__(self, p: int = 2147483647):
        self.p = p
        self.pivots = {}  # leading index -> reduced row (list of ints mod p)

    def add(self, vec_int: Sequence[int]) -> bool:
        """Reduce against the current basis; True when the vector is new."""
        p = self.p
        v = [x % p for x in vec_int]
        while True:
            lead = next((i for i, x in enumerate(v) if x), None)
            if lead is None:
                return False
            if lead not in self.pivots:
                inv = pow(v[lead], p - 2, p)
                self.pivots[lead] = [(x * inv) % p for x in v]
                return True
            row = self.pivots[lead]
            c = v[lead]
            v = [(x - c * y) % p for x, y in zip(v, row)]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def hermitian_signature(B: List[List[QQi]]):
    """(n_plus, n_minus, n_zero) of an exact Hermitian Gaussian-rational matrix.

    Congruence diagonalization: a nonzero diagonal pivot is used when
    available, otherwise one is manufactured from a nonzero off-diagonal pair.
    """
    n = len(B)
    A = [[QQi.of(B[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if A[i][j] != A[j][i].conj():
                raise ValueError("matrix is not Hermitian")
    plus = minus = zero = 0
    idx = list(range(n))
    while idx:
        # find a nonzero diagonal entry
        pick = None
        for i in idx:
            if A[i][i]:
                pick = i
                break
        if pick is None:
            pair = None
            for a in idx:
                for b in idx:
                    if a < b and A[a][b]:
                        pair = (a, b)
                        break
                if pair:
                    break
            if pair is None:
                zero += len(idx)
                break
            a, b = pair
            # row/col replacement  v_a <- v_a + v_b  puts 2*Re A[a][b] on the diagonal;
            # if that vanishes use  v_a <- v_a + i*v_b  instead.
            t = A[a][b] + A[b][a]
            coef = QQi(1) if t else QQi.i()
            for j in idx:
                A[a][j] = A[a][j] + coef.conj() * A[b][j]
            for i_ in idx:
                A[i_][a] = A[i_][a] + coef * A[i_][b]
            continue
        d = A[pick][pick]
        if d.im != 0:
            raise ValueError("Hermitian matrix has non-real diagonal")
        if d.re > 0:
            plus += 1
        else:
            minus += 1
        idx.remove(pick)
        for i in idx:
            f = A[i][pick] / d
            if f:
                for j in idx:
                    A[i][j] = A[i][j] - f * A[pick][j]
                A[i][pick] = QQi(0)
        for j in idx:
            A[pick][j] = QQi(0)
    return plus, minus, zero
