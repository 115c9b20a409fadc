"""The eight-equation quadratic system in the nine unknowns
(xi, f, h, x, y, z, p, q, r), its base solution, Newton continuation in xi,
Jacobian verification, and the rationality constraint.

Everything evaluates exactly over Fractions when fed exact data, and in
float64 for the Newton paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

FIELDS = ("xi", "f", "h", "x", "y", "z", "p", "q", "r")


@dataclass(frozen=True)
class Nonuple:
    xi: object
    f: object
    h: object
    x: object
    y: object
    z: object
    p: object
    q: object
    r: object

    def as_tuple(self):
        return (self.xi, self.f, self.h, self.x, self.y, self.z,
                self.p, self.q, self.r)

    def replace(self, **kw) -> "Nonuple":
        d = {k: getattr(self, k) for k in FIELDS}
        d.update(kw)
        return Nonuple(**d)

    def to_float(self) -> "Nonuple":
        return Nonuple(*[float(v) for v in self.as_tuple()])


@dataclass
class SystemResidual:
    res: tuple          # residuals of equations i..viii
    L: object
    U: object
    V: object
    W: object

    def max_abs(self) -> float:
        return max(abs(float(v)) for v in self.res)


def aux_LUVW(n: int, v: Nonuple):
    """The auxiliary combinations L, U, V, W."""
    xi, f, h, x, y, z, p, q, r = v.as_tuple()
    n2 = n * n
    L = f + h * p - xi * r
    U = 2 * xi * x * z + h * xi * z * z - xi * x * r + x * f
    V = (n2 * L * y + 2 * n2 * (2 * xi * z + h * x + h * h * z) * y
         + n2 * n2 * xi * y * y - 2 * x * x + 2 * (xi * z - h * x) * z)
    W = L * z + x * x + xi * z * z + h * h * z * z + 2 * h * x * z
    return L, U, V, W


def eval_system(n: int, v: Nonuple) -> SystemResidual:
    """Residuals of the eight equations; exact when the nonuple is exact."""
    if n < 3:
        raise ValueError("the system needs n >= 3")
    xi, f, h, x, y, z, p, q, r = v.as_tuple()
    n2 = n * n
    L, U, V, W = aux_LUVW(n, v)
    res = (
        f - (2 * y + x * x + xi * z * z) * xi,               # i
        U + (y + x * p) * h,                                 # ii
        (n2 - 4) * (x - 1) + (n2 * y - 2 * z) * h,           # iii
        V - n2 * y - 2 * z,                                  # iv
        W - 2 * y - z,                                       # v
        p + x - 2 * xi * x * z - h * xi * z * z - h * y,     # vi
        q + n2 * (L + 2) * y - V + 2 * z,                    # vii
        r + (L + 2) * z - W + 2 * y,                         # viii
    )
    return SystemResidual(res, L, U, V, W)


def base_solution(n: int) -> Nonuple:
    """The exact solution through which the Einstein family runs."""
    if n < 3:
        raise ValueError("needs n >= 3")
    n2 = Fraction(n * n)
    den = n2 - 4
    return Nonuple(
        xi=Fraction(0), f=Fraction(0), h=Fraction(0),
        x=Fraction(1), y=Fraction(-4) / den, z=(n2 + 4) / den,
        p=Fraction(-1), q=4 * n2 / den, r=-(n2 + 4) / den,
    )


def non_einstein_nonuple(n: int) -> Nonuple:
    """The weakly-Einstein-but-degenerate nonuple (even n)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    n2 = n * n
    z = Fraction(-(n2 - 2), n2 - 1)
    return Nonuple(
        xi=(z + 1) / z ** 2,
        f=(z + 1) * (2 - z) / z ** 2,
        h=Fraction(0),
        x=Fraction(1),
        y=-z,
        p=(z + 2) / z,
        q=-n2 * (z + 2),
        r=z + 2,
        z=z,
    )


# ---------------------------------------------------------------------------
# Newton continuation at fixed xi
# ---------------------------------------------------------------------------

def _residual_vec(n: int, xi: float, u: np.ndarray) -> np.ndarray:
    v = Nonuple(xi, *u)
    return np.array([float(t) for t in eval_system(n, v).res])


def _fd_jacobian(n: int, xi: float, u: np.ndarray, step: float = 1e-7) -> np.ndarray:
    J = np.zeros((8, 8))
    for c in range(8):
        up = u.copy(); up[c] += step
        um = u.copy(); um[c] -= step
        J[:, c] = (_residual_vec(n, xi, up) - _residual_vec(n, xi, um)) / (2 * step)
    return J


def newton_solve(n: int, xi: float, start: Optional[Nonuple] = None,
                 tol: float = 1e-12, max_iter: int = 50,
                 radius: float = 0.05) -> Nonuple:
    """Damped Newton for the 8 equations in (f,h,x,y,z,p,q,r) at fixed xi."""
    if abs(xi) > radius:
        raise ValueError(f"|xi| = {abs(xi)} outside the continuation radius {radius}")
    if start is None:
        start = base_solution(n)
    u = np.array([float(v) for v in start.as_tuple()[1:]])
    for _ in range(max_iter):
        F = _residual_vec(n, xi, u)
        if np.abs(F).max() < tol:
            return Nonuple(xi, *u)
        J = _fd_jacobian(n, xi, u)
        du = np.linalg.solve(J, -F)
        lam = 1.0
        base = np.abs(F).max()
        while lam > 1e-8:
            trial = u + lam * du
            if np.abs(_residual_vec(n, xi, trial)).max() < base:
                break
            lam /= 2
        u = u + lam * du
    F = _residual_vec(n, xi, u)
    if np.abs(F).max() < tol:
        return Nonuple(xi, *u)
    raise RuntimeError(f"Newton did not converge (residual {np.abs(F).max():.3e})")


def continuation(n: int, xi_target: float, steps: int = 10):
    """Track the branch from xi = 0 to xi_target; yields one nonuple per step."""
    cur = base_solution(n).to_float()
    out = []
    for k in range(1, steps + 1):
        xi = xi_target * k / steps
        cur = newton_solve(n, xi, start=cur.replace(xi=xi))
        out.append(cur)
    return out


def curve_derivative(n: int, delta: float = 1e-5) -> float:
    """Central finite difference of h(xi) at xi = 0 (the slope is 4)."""
    hp = newton_solve(n, delta).h
    hm = newton_solve(n, -delta).h
    return (hp - hm) / (2 * delta)


# ---------------------------------------------------------------------------
# Jacobian structure at the base point
# ---------------------------------------------------------------------------

@dataclass
class JacobianReport:
    matrix: np.ndarray
    entries_ok: bool
    nonsingular: bool
    failures: list


def jacobian_check(n: int) -> JacobianReport:
    """Verify the displayed structural entries of the base-point Jacobian.

    Rows differentiate the eight left-hand sides (with xi frozen at 0) in
    (f,h,x,y,z,p,q,r).  Expected structure: (1,1)=1, (2,2)=n^2/(4-n^2),
    (3,3)=n^2-4, the 2x2 block [[-n^2,-2],[-2,-1]] in rows/cols 4-5, unit
    diagonal in rows 6-8, zeros above the diagonal outside that block.
    """
    base = base_solution(n).to_float()
    u = np.array([float(v) for v in base.as_tuple()[1:]])
    J = _fd_jacobian(n, 0.0, u)
    n2 = float(n * n)
    checks = []

    def expect(i, jj, val, name):
        ok = abs(J[i, jj] - val) < 1e-6 * max(1.0, abs(val))
        checks.append((name, ok, J[i, jj], val))

    expect(0, 0, 1.0, "(1,1)=1")
    expect(1, 1, n2 / (4.0 - n2), "(2,2)=n^2/(4-n^2)")
    expect(2, 2, n2 - 4.0, "(3,3)=n^2-4")
    expect(3, 3, -n2, "(4,4)=-n^2")
    expect(3, 4, -2.0, "(4,5)=-2")
    expect(4, 3, -2.0, "(5,4)=-2")
    expect(4, 4, -1.0, "(5,5)=-1")
    for i in range(5, 8):
        expect(i, i, 1.0, f"({i+1},{i+1})=1")
    # displayed zeros above the diagonal (the (4,5) block entry excepted)
    for i in range(8):
        for jj in range(i + 1, 8):
            if (i, jj) == (3, 4):
                continue
            expect(i, jj, 0.0, f"({i+1},{jj+1})=0")
    nonsing = abs(np.linalg.det(J)) > 1e-8
    failures = [c for c in checks if not c[1]]
    return JacobianReport(J, not failures, nonsing, failures)


# ---------------------------------------------------------------------------
# rationality constraint
# ---------------------------------------------------------------------------

def rationality_check(n: int, xi, h) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Search n+ + n- = n, n+- >= 1 with  n+ n- h^2 = (n+ - n-)^2 xi."""
    exact = isinstance(xi, (int, Fraction)) and isinstance(h, (int, Fraction))
    for nplus in range(1, n):
        nminus = n - nplus
        lhs = nplus * nminus * h * h
        rhs = (nplus - nminus) ** 2 * xi
        if exact:
            if lhs == rhs:
                return True, (nplus, nminus)
        else:
            if abs(float(lhs) - float(rhs)) <= 1e-12 * max(1.0, abs(float(lhs)), abs(float(rhs))):
                return True, (nplus, nminus)
    return False, None
