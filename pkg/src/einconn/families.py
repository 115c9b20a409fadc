"""The a-parametrized tensor families, their multiplication tables, the
Einstein family parametrized by square-zero elements, the general
weakly-Einstein construction, the even-n non-Einstein example, connection
verification reports, and nilpotent recovery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .algebras import (LieAlgebra, bracket, inner, mat_add, mat_mul,
                       mat_scale, mat_sub, mat_trace, traceless_part, _mat)
from .numeric import DEFAULT_TOL, DenseMatrix, QQi, rank
from .quadric import Nonuple, eval_system, base_solution, non_einstein_nonuple
from . import tensors as tn


# ---------------------------------------------------------------------------
# family tensors
# ---------------------------------------------------------------------------

@dataclass
class FamilyTensors:
    a: object
    b: object
    tau: object           # tau_a
    theta: object         # theta_{a,b}
    mu: object            # mu_{a,b}
    c: object             # eps (a^2)_0        (diagonal case b = a)
    d: object             # eps^2 (a^3)_0
    xi: object            # eps^2 (a,a)/n


def _scalar_eps2_inner(alg, a, b):
    v = alg.eps * alg.eps * inner(a, b)
    return alg.f_scalar(v) if alg.field == "R" else v


def family_tensors(alg, a, b=None, check: bool = True) -> FamilyTensors:
    """tau_a, theta_{a,b}, mu_{a,b} plus the derived c, d, xi (exact mode)."""
    if b is None:
        b = a
    if check:
        if not alg.member_check(a) or not alg.member_check(b):
            raise ValueError("family parameters must lie in the algebra")
    # the builders run their images through coords(check=...), so membership
    # of every endomorphism value is verified pointwise on basis vectors
    tau = tn.tau_tensor(alg, a, check=check)
    theta = tn.theta_tensor(alg, a, b, check=check)
    mu = tn.mu_tensor(alg, a, b, check=check)
    c = traceless_part(mat_scale(mat_mul(a, a), alg.eps))
    d = traceless_part(mat_scale(mat_mul(mat_mul(a, a), a),
                                 alg.eps * alg.eps))
    xi = _scalar_eps2_inner(alg, a, a) / alg.n
    return FamilyTensors(a, b, tau, theta, mu, c, d, xi)


def eta_tensor(alg, a, check: bool = True):
    """eta_a = tau_a - (n^2-4)^{-1} [4 n^2 theta_a - (n^2+4) mu_a]."""
    if alg.n < 3:
        raise ValueError("eta needs n >= 3")
    n2 = alg.n * alg.n
    if alg.mode == "float":
        ta = tn.tau_tensor(alg, a)
        th = tn.theta_tensor(alg, a)
        mu = tn.mu_tensor(alg, a)
        return ta - (4 * n2 * th - (n2 + 4) * mu) / (n2 - 4)
    ta = tn.tau_tensor(alg, a, check=check)
    th = tn.theta_tensor(alg, a, check=check)
    mu = tn.mu_tensor(alg, a, check=check)
    corr = tn.sym_sub(tn.sym_scale(th, 4 * n2), tn.sym_scale(mu, n2 + 4))
    return tn.sym_sub(ta, tn.sym_scale(corr, Fraction(1, n2 - 4)))


def build_lambda_psi(alg, a, v: Nonuple):
    """lambda = x tau + n^2 y theta + z mu;  psi = p tau + q theta + r mu + f beta."""
    n2 = alg.n * alg.n
    ta = tn.tau_tensor(alg, a)
    th = tn.theta_tensor(alg, a)
    mu = tn.mu_tensor(alg, a)
    bt = tn.beta_sym(alg)
    if alg.mode == "float":
        lam = float(v.x) * np.asarray(ta) + float(n2 * v.y) * np.asarray(th) \
            + float(v.z) * np.asarray(mu)
        psi = float(v.p) * np.asarray(ta) + float(v.q) * np.asarray(th) \
            + float(v.r) * np.asarray(mu) + float(v.f) * np.asarray(bt)
        return lam, psi
    lam = tn.sym_add(tn.sym_add(tn.sym_scale(ta, v.x),
                                tn.sym_scale(th, n2 * v.y)),
                     tn.sym_scale(mu, v.z))
    psi = tn.sym_add(tn.sym_add(tn.sym_scale(ta, v.p), tn.sym_scale(th, v.q)),
                     tn.sym_add(tn.sym_scale(mu, v.r), tn.sym_scale(bt, v.f)))
    return lam, psi


# ---------------------------------------------------------------------------
# multiplication tables
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    passed: bool
    max_residual: float
    details: List[Tuple[str, bool, float]] = field(default_factory=list)

    def as_dict(self):
        return {"name": self.name, "passed": self.passed,
                "max_residual": self.max_residual,
                "failed": [d[0] for d in self.details if not d[1]]}


def _cmp(alg, name, lhs, rhs, out: list, tol: Optional[float] = None):
    if alg.mode == "exact":
        ok = tn.tensors_equal(alg, lhs, rhs)
        out.append((name, ok, 0.0 if ok else tn.residual(lhs, rhs)))
    else:
        r = tn.residual(lhs, rhs)
        out.append((name, r < (DEFAULT_TOL if tol is None else tol), r))


def _vec_cmp(alg, name, lhs, rhs, out: list, tol: Optional[float] = None):
    if alg.mode == "exact":
        ok = list(lhs) == list(rhs)
        out.append((name, ok, 0.0))
        return
    d = max(abs(complex(x) - complex(y)) for x, y in zip(lhs, rhs))
    s = max([1.0] + [abs(complex(x)) for x in lhs] + [abs(complex(y)) for y in rhs])
    out.append((name, d / s < (DEFAULT_TOL if tol is None else tol), d / s))


def check_multiplication_tables(alg, trials: int, rng,
                                tol: Optional[float] = None) -> CheckReport:
    """All star products, pairings, gradient identities and projections.

    Every identity is polynomial in an arbitrary algebra element a (and a
    direction v), so random sampling plus exactness certifies them on the
    nose in exact mode.
    """
    if alg.n < 3:
        raise ValueError("the tables need n >= 3")
    results: List[Tuple[str, bool, float]] = []
    n = alg.n
    n2 = n * n
    exact = alg.mode == "exact"
    base = alg.exact if alg.mode == "float" else alg
    bt = tn.beta_sym(alg)
    D = tn.standard_connection(alg)
    for t in range(trials):
        if exact:
            a = alg.uncoords(tn.random_vector(alg, rng))
            vv = tn.random_vector(alg, rng)
            vmat = alg.uncoords(vv)
        else:
            co = tn.random_vector(alg, rng)
            a = alg.uncoords(co)
            vv = tn.random_vector(alg, rng)
            vmat = alg.uncoords(vv)

        if exact:
            fam = family_tensors(alg, a, check=False)
            ta, th, mu = fam.tau, fam.theta, fam.mu
            c, d, xi = fam.c, fam.d, fam.xi
            tc = tn.tau_tensor(alg, c, check=False)
            td = tn.tau_tensor(alg, d, check=False)
            thc = tn.theta_tensor(alg, c, check=False)
            muc = tn.mu_tensor(alg, c, check=False)
            thac = tn.theta_tensor(alg, a, c, check=False)
            muac = tn.mu_tensor(alg, a, c, check=False)
            thad = tn.theta_tensor(alg, a, d, check=False)
            muad = tn.mu_tensor(alg, a, d, check=False)
            ac = alg.f_scalar(alg.eps * alg.eps * inner(a, c)) \
                if alg.field == "R" else alg.eps * alg.eps * inner(a, c)
        else:
            ta = tn.tau_tensor(alg, a)
            th = tn.theta_tensor(alg, a)
            mu = tn.mu_tensor(alg, a)
            am = np.asarray(a, dtype=complex) if not isinstance(a, np.ndarray) else a
            c = tn.traceless_np(alg.eps * (am @ am))
            d = tn.traceless_np(alg.eps ** 2 * (am @ am @ am))
            xi = alg.eps ** 2 * np.trace(am @ am) / n
            if alg.field == "R":
                xi = xi.real
            tc = tn.tau_tensor(alg, c)
            td = tn.tau_tensor(alg, d)
            thc = tn.theta_tensor(alg, c)
            muc = tn.mu_tensor(alg, c)
            thac = tn.theta_tensor(alg, a, c)
            muac = tn.mu_tensor(alg, a, c)
            thad = tn.theta_tensor(alg, a, d)
            muad = tn.mu_tensor(alg, a, d)
            ac = alg.eps ** 2 * np.trace(am @ c)
            if alg.field == "R":
                ac = ac.real

        sa, ss, sc = tn.sym_add, tn.sym_sub, tn.sym_scale

        # eaq: eps a^2 = c + eps^{-1} xi Id ; eps^2 a^3 = d + eps (a,c)/n Id
        if exact:
            eye = _mat(alg.n)
            for i in range(alg.n):
                eye[i][i] = QQi(1)
            lhs = mat_scale(mat_mul(a, a), alg.eps)
            rhs = mat_add(c, mat_scale(eye, QQi.of(xi) / alg.eps))
            results.append(("eaq.i", all(lhs[i][jx] == rhs[i][jx]
                                         for i in range(alg.n)
                                         for jx in range(alg.n)), 0.0))
            lhs = mat_scale(mat_mul(mat_mul(a, a), a), alg.eps * alg.eps)
            rhs = mat_add(d, mat_scale(eye, alg.eps * inner(a, c) / alg.n))
            results.append(("eaq.ii", all(lhs[i][jx] == rhs[i][jx]
                                          for i in range(alg.n)
                                          for jx in range(alg.n)), 0.0))

        # nom
        _cmp(alg, "nom.theta", sc(tn.omega(alg, th), n2),
             sa(ss(tc, sc(mu, 2)), sc(bt, 2 * xi)), results, tol)
        _cmp(alg, "nom.mu", tn.omega(alg, mu), sc(th, -2), results, tol)
        _cmp(alg, "nom.tau", tn.omega(alg, ta), ta, results, tol)

        # star table
        _cmp(alg, "star.tau_tau", tn.star(alg, ta, ta),
             sa(tc, sc(sa(sc(bt, xi), ss(mu, sc(th, 2))), 2)), results, tol)
        _cmp(alg, "star.theta_theta", tn.star(alg, th, th), sc(th, xi),
             results, tol)
        _cmp(alg, "star.mu_mu", tn.star(alg, mu, mu),
             sa(sa(sc(tc, xi), sc(bt, xi * xi)), ss(muc, thc)), results, tol)
        _cmp(alg, "star.tau_theta", tn.star(alg, ta, th), sc(thac, 2),
             results, tol)
        _cmp(alg, "star.tau_mu", tn.star(alg, ta, mu),
             sa(sc(ta, xi), sc(ss(muac, thac), 2)), results, tol)
        _cmp(alg, "star.theta_mu", tn.star(alg, th, mu), thad, results, tol)
        _cmp(alg, "star.beta_tau", tn.star(alg, bt, ta), ta, results, tol)
        _cmp(alg, "star.beta_theta", tn.star(alg, bt, th), th, results, tol)
        _cmp(alg, "star.beta_mu", tn.star(alg, bt, mu), mu, results, tol)

        # pairing table
        _cmp(alg, "pair.tau_tau", tn.pair_sym(alg, ta, ta),
             sa(sc(bt, xi), ss(mu, sc(th, 2))), results, tol)
        _cmp(alg, "pair.mu_mu", tn.pair_sym(alg, mu, mu),
             ss(sc(mu, xi), thc), results, tol)
        _cmp(alg, "pair.tau_mu", sc(tn.pair_sym(alg, ta, mu), 2),
             ss(sc(ta, xi), sc(thac, 4)), results, tol)
        _cmp(alg, "pair.theta_theta", tn.pair_sym(alg, th, th),
             tn.zeros_sym(alg), results, tol)
        _cmp(alg, "pair.tau_theta", sc(tn.pair_sym(alg, ta, th), 2 * n2),
             sa(ss(ss(td, sc(ta, xi)), sc(muac, 2)),
                sc(bt, 2 * ac * (Fraction(1, n) if exact else 1.0 / n))),
             results, tol)
        _cmp(alg, "pair.theta_mu", sc(tn.pair_sym(alg, th, mu), n2),
             sa(ss(ss(ss(muad, sc(tc, xi)), sc(bt, xi * xi)), muc),
                sc(ta, ac * (Fraction(1, 2 * n) if exact else 1.0 / (2 * n)))),
             results, tol)

        # gradient identities, pointwise at v
        dta = tn.grad(alg, D, ta)
        dth = tn.grad(alg, D, th)
        dmu = tn.grad(alg, D, mu)

        def gcoords(mat):
            return alg.coords(mat) if exact else alg.coords(np.asarray(mat, dtype=complex))

        def mm(*ms):
            if exact:
                out = ms[0]
                for mx in ms[1:]:
                    out = mat_mul(out, mx)
                return out
            out = np.asarray(ms[0], dtype=complex)
            for mx in ms[1:]:
                out = out @ np.asarray(mx, dtype=complex)
            return out

        def br(x, y):
            if exact:
                return bracket(x, y)
            return x @ y - y @ x

        def msc(x, s):
            return mat_scale(x, QQi.of(s) if not isinstance(s, QQi) else s) \
                if exact else np.asarray(x, dtype=complex) * complex(s)

        av = inner(a, vmat) if exact else np.trace(np.asarray(a, dtype=complex) @ vmat)
        e1 = alg.eps
        e2 = alg.eps * alg.eps if exact else alg.eps ** 2
        e3 = e2 * e1 if exact else alg.eps ** 3

        _vec_cmp(alg, "dta.tau", tn.apply_conn(alg, dta, vv, vv),
                 gcoords(msc(br(a, mm(vmat, vmat)), e1)), results, tol)
        lhs = [x * n for x in tn.apply_conn(alg, dth, vv, vv)] if exact \
            else n * tn.apply_conn(alg, dth, vv, vv)
        _vec_cmp(alg, "dta.theta", lhs,
                 gcoords(msc(br(a, vmat), e2 * av)), results, tol)
        _vec_cmp(alg, "dta.mu", tn.apply_conn(alg, dmu, vv, vv),
                 gcoords(msc(br(a, mm(vmat, a, vmat)), e2)), results, tol)

        # the nine product relations
        _cmp(alg, "tdt.tau_dtau", tn.act(alg, ta, dta),
             tn.grad(alg, D, tc), results, tol)
        _cmp(alg, "tdt.theta_dtau", tn.act(alg, th, dta),
             tn.zeros_conn(alg), results, tol)
        _cmp(alg, "tdt.theta_dtheta", tn.act(alg, th, dth),
             tn.zeros_conn(alg), results, tol)
        _cmp(alg, "tdt.theta_dmu", tn.act(alg, th, dmu),
             tn.zeros_conn(alg), results, tol)
        lhs = tn.apply_conn(alg, tn.act(alg, ta, dth), vv, vv)
        lhs = [x * n for x in lhs] if exact else n * lhs
        _vec_cmp(alg, "tdt.tau_dtheta", lhs,
                 gcoords(msc(br(c, vmat), e2 * av)), results, tol)
        _vec_cmp(alg, "tdt.tau_dmu",
                 tn.apply_conn(alg, tn.act(alg, ta, dmu), vv, vv),
                 gcoords(msc(br(c, mm(vmat, a, vmat)), e2)), results, tol)
        comb = tn.conn_add(tn.act(alg, mu, dta),
                           tn.conn_scale(dta, xi))
        _vec_cmp(alg, "tdt.mu_dtau", tn.apply_conn(alg, comb, vv, vv),
                 gcoords(msc(mat_sub(mm(c, vmat, vmat, a), mm(a, vmat, vmat, c))
                             if exact else mm(c, vmat, vmat, a) - mm(a, vmat, vmat, c),
                             e2)), results, tol)
        comb = tn.conn_add(tn.act(alg, mu, dth), tn.conn_scale(dth, xi))
        lhs = tn.apply_conn(alg, comb, vv, vv)
        lhs = [x * n for x in lhs] if exact else n * lhs
        _vec_cmp(alg, "tdt.mu_dtheta", lhs,
                 gcoords(msc(mat_sub(mm(c, vmat, a), mm(a, vmat, c))
                             if exact else mm(c, vmat, a) - mm(a, vmat, c),
                             e3 * av)), results, tol)
        comb = tn.conn_add(tn.act(alg, mu, dmu), tn.conn_scale(dmu, xi))
        _vec_cmp(alg, "tdt.mu_dmu", tn.apply_conn(alg, comb, vv, vv),
                 gcoords(msc(mat_sub(mm(c, vmat, a, vmat, a),
                                     mm(a, vmat, a, vmat, c))
                             if exact else mm(c, vmat, a, vmat, a) - mm(a, vmat, a, vmat, c),
                             e3)), results, tol)

        # projections (omgpr)
        if n2 != 4:
            inv = Fraction(1, n2 - 4) if exact else 1.0 / (n2 - 4)
            chi = sa(ss(sc(mu, 2), sc(th, n2)),
                     sa(sc(bt, 2 * xi), sc(tc, (n2 + 4) * inv)))
            phi = ss(ss(sc(th, 2 * n2), sc(mu, n2)),
                     sa(sc(bt, 4 * xi), sc(tc, 4 * n2 * inv)))
            om_chi = tn.omega(alg, chi)
            _cmp(alg, "omgpr.i.theta", sc(th, n2 - 4),
                 sa(tc, ss(om_chi, chi)), results, tol)
            om_phi = tn.omega(alg, phi)
            _cmp(alg, "omgpr.i.mu", sc(mu, n2 - 4),
                 sa(sc(tc, -2), ss(om_phi, phi)), results, tol)
            if exact:
                pi_chi, _, _ = tn.project_ker_T(alg, chi)
                _cmp(alg, "omgpr.ii.chi", pi_chi, tn.zeros_sym(alg), results)
                pi_phi, _, _ = tn.project_ker_T(alg, phi)
                _cmp(alg, "omgpr.ii.phi", pi_phi, tn.zeros_sym(alg), results)
                pt, _, _ = tn.project_ker_T(alg, ta)
                _cmp(alg, "omgpr.iii.tau", pt, ta, results)
                pth, _, _ = tn.project_ker_T(alg, th)
                _cmp(alg, "omgpr.iii.theta", sc(pth, n2 - 4), tc, results)
                pmu, _, _ = tn.project_ker_T(alg, mu)
                _cmp(alg, "omgpr.iii.mu", sc(pmu, n2 - 4), sc(tc, -2), results)
                pb, _, _ = tn.project_ker_T(alg, bt)
                _cmp(alg, "omgpr.iii.beta", pb, tn.zeros_sym(alg), results)
                x = tn.random_scalar(alg, rng)
                y = tn.random_scalar(alg, rng)
                zc = tn.random_scalar(alg, rng)
                lam = sa(sa(sc(ta, x), sc(th, n2 * y)), sc(mu, zc))
                pl, _, _ = tn.project_ker_T(alg, lam)
                lhs = sc(ss(pl, ta), n2 - 4)
                rhs = sa(sc(ta, (n2 - 4) * (x - 1)), sc(tc, n2 * y - 2 * zc))
                _cmp(alg, "omgpr.iv", lhs, rhs, results)

    worst = max((r[2] for r in results), default=0.0)
    passed = all(r[1] for r in results)
    return CheckReport("multiplication-tables", passed, worst, results)


# ---------------------------------------------------------------------------
# connection reports
# ---------------------------------------------------------------------------

@dataclass
class ConnectionReport:
    case: str
    algebra: str
    n: int
    l: Optional[int]
    j: Optional[int]
    rank_a: Optional[int]
    mode: str
    flags: Dict[str, bool] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)
    scalars: Dict[str, object] = field(default_factory=dict)

    def passed(self) -> bool:
        return all(self.flags.values())

    def as_dict(self):
        return {
            "case": self.case,
            "algebra": self.algebra,
            "n": self.n, "l": self.l, "j": self.j,
            "rank_a": self.rank_a,
            "mode": self.mode,
            "flags": dict(sorted(self.flags.items())),
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "scalars": {k: str(v) for k, v in sorted(self.scalars.items())},
        }


def _sym_rank(alg, sig) -> int:
    if alg.mode == "exact":
        return rank(DenseMatrix.from_rows(sig))
    sv = np.linalg.svd(np.asarray(sig), compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > 1e-6 * sv[0]))


def _record(alg, rep: ConnectionReport, name: str, lhs, rhs=None,
            tol: Optional[float] = None):
    """Record lhs == rhs (or lhs == 0) as a flag plus residual."""
    if rhs is None:
        if alg.mode == "exact":
            ok = tn.is_zero_exact(lhs)
            rep.flags[name] = ok
            rep.residuals[name] = 0.0 if ok else tn.max_abs(lhs)
        else:
            r = tn.max_abs(np.asarray(lhs))
            rep.flags[name] = bool(r < (DEFAULT_TOL if tol is None else tol))
            rep.residuals[name] = r
        return
    if alg.mode == "exact":
        ok = tn.tensors_equal(alg, lhs, rhs)
        rep.flags[name] = ok
        rep.residuals[name] = 0.0 if ok else tn.residual(lhs, rhs)
    else:
        r = tn.residual(lhs, rhs)
        rep.flags[name] = bool(r < (DEFAULT_TOL if tol is None else tol))
        rep.residuals[name] = r


def is_torsion_free(alg, conn, tol: Optional[float] = None) -> bool:
    """Vanishing torsion: the antisymmetric part of conn equals the bracket,
    i.e. conn - D is symmetric."""
    S = tn.conn_sub(conn, tn.standard_connection(alg))
    if alg.mode == "float":
        d = np.abs(S - S.transpose(1, 0, 2)).max()
        return bool(d < (DEFAULT_TOL if tol is None else tol) * max(1.0, tn.max_abs(conn)))
    m = alg.m
    return all(S[j][k][l] == S[k][j][l]
               for j in range(m) for k in range(j + 1, m) for l in range(m))


def square_zero(alg, a, tol: Optional[float] = None) -> bool:
    if alg.mode == "float":
        am = np.asarray(a, dtype=complex)
        return np.abs(am @ am).max() < (DEFAULT_TOL if tol is None else tol) \
            * max(1.0, float(np.abs(am).max()) ** 2)
    sq = mat_mul(a, a)
    return all(not sq[i][jx] for i in range(alg.n) for jx in range(alg.n))


def matrix_rank_of(alg, a) -> int:
    if alg.mode == "float":
        sv = np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)
        if sv[0] == 0:
            return 0
        return int(np.sum(sv > 1e-9 * sv[0]))
    return rank(DenseMatrix.from_rows(a))


def einstein_from_nilpotent(alg, a, check_explicit: bool = True,
                            check_recovery: bool = True):
    """The Einstein connection D + D(eta_a) for a square-zero a, verified."""
    if not square_zero(alg, a):
        raise ValueError("parameter must square to zero")
    rep = ConnectionReport(
        case="einstein-family", algebra=alg.spec.label(), n=alg.n,
        l=alg.spec.l, j=alg.spec.j, rank_a=matrix_rank_of(alg, a),
        mode=alg.mode)
    eta = eta_tensor(alg, a, check=True) if alg.mode == "exact" \
        else eta_tensor(alg, a)
    D = tn.standard_connection(alg)
    S = tn.grad(alg, D, eta)
    nab = tn.conn_add(D, S)

    rep.flags["torsion_free"] = is_torsion_free(alg, nab)
    _record(alg, rep, "unimodular", _as_vecarr(alg, tn.contraction(alg, S)))
    _record(alg, rep, "weakly_einstein", weh := tn.weakly_einstein_residual(alg, S))
    rho = tn.ricci(alg, nab, require_unimodular=False)
    quarter = Fraction(1, 4) if alg.mode == "exact" else 0.25
    expected = tn.sym_scale(tn.sym_sub(eta, tn.beta_sym(alg)), quarter)
    _record(alg, rep, "ricci_matches", rho, expected)
    _record(alg, rep, "ricci_parallel", tn.grad(alg, nab, rho))
    rep.flags["ricci_nondegenerate"] = (_sym_rank(alg, rho) == alg.m)
    rep.flags["einstein"] = (rep.flags["weakly_einstein"]
                             and rep.flags["ricci_nondegenerate"]
                             and rep.flags["ricci_parallel"])
    if check_explicit:
        rep.flags["explicit_formula"] = explicit_formula_matches(alg, a, nab)
    if check_recovery:
        arec = recover_nilpotent(alg, nab)
        if alg.mode == "exact":
            rep.flags["recovery"] = (arec == alg.coords(a))
        else:
            ca = alg.coords(np.asarray(a, dtype=complex))
            d = max(abs(complex(x) - complex(y)) for x, y in zip(arec, ca))
            rep.flags["recovery"] = bool(d < 1e-7 * max(1.0, max(abs(complex(x)) for x in ca)))
    return nab, rep


def _as_vecarr(alg, v):
    if alg.mode == "float":
        return np.asarray(v)
    # wrap the covector as a 1 x m tensor so the recorder can flatten it
    return [list(v)]


def explicit_nabla(alg, a, v, w):
    """2 nabla_v w = [v,w] + eps [a, vw + wv + E_v w] with the E-correction."""
    n2 = alg.n * alg.n
    if alg.mode == "float":
        a = np.asarray(a, dtype=complex)
        v = np.asarray(v, dtype=complex)
        w = np.asarray(w, dtype=complex)
        e = alg.eps
        E = ((n2 + 4) * e * (v @ a @ w + w @ a @ v)
             - 4 * alg.n * e * np.trace(a @ v) * w
             - 4 * alg.n * e * np.trace(a @ w) * v) / (n2 - 4)
        core = v @ w + w @ v + E
        return ((v @ w - w @ v) + e * (a @ core - core @ a)) / 2
    e = alg.eps
    inv = QQi(Fraction(1, n2 - 4))
    t1 = mat_scale(mat_add(mat_mul(mat_mul(v, a), w), mat_mul(mat_mul(w, a), v)),
                   e * QQi.of(n2 + 4))
    t2 = mat_scale(w, e * QQi.of(4 * alg.n) * inner(a, v))
    t3 = mat_scale(v, e * QQi.of(4 * alg.n) * inner(a, w))
    E = mat_scale(mat_sub(mat_sub(t1, t2), t3), inv)
    core = mat_add(mat_add(mat_mul(v, w), mat_mul(w, v)), E)
    out = mat_add(bracket(v, w), mat_scale(bracket(a, core), e))
    return mat_scale(out, QQi(Fraction(1, 2)))


def explicit_formula_matches(alg, a, nab, tol: Optional[float] = None) -> bool:
    """Compare the closed form against the built connection on the basis grid."""
    m = alg.m
    for p in range(m):
        for q in range(m):
            vm = alg.basis[p]
            wm = alg.basis[q]
            direct = explicit_nabla(alg, a, vm, wm)
            if alg.mode == "float":
                got = sum(complex(c) * alg.basis[r]
                          for r, c in enumerate(np.asarray(nab)[p, q]))
                got = np.asarray(got)
                d = np.abs(got - direct).max()
                if d > (DEFAULT_TOL if tol is None else tol) * max(1.0, np.abs(direct).max()):
                    return False
            else:
                co = alg.coords(direct)
                if co != list(nab[p][q]):
                    return False
    return True


def recover_nilpotent(alg, conn):
    """a from a family connection: invert tau on Pi(-8{D.(conn - D)})."""
    D = tn.standard_connection(alg)
    S = tn.conn_sub(conn, D)
    phi = tn.sym_scale(tn.pair_conn(alg, D, S), -8)
    _, t, _ = tn.project_ker_T(alg, phi)
    return list(t)


def general_weakly_einstein(alg, a, v: Nonuple, case: str = "general-we"):
    """Theorem-level construction: nabla = D + D(lambda) from a nonuple.

    Preconditions: the nonuple satisfies the system except possibly the
    normalizing equation (iii), and  eps a^2 = h a + eps^{-1} xi Id.
    """
    res = eval_system(alg.n, v if alg.mode == "exact" else v.to_float())
    use = [0, 1, 3, 4, 5, 6, 7]          # residuals i, ii, iv..viii
    if alg.mode == "exact":
        bad = [i for i in use if res.res[i] != 0]
    else:
        bad = [i for i in use if abs(float(res.res[i])) > 1e-9]
    if bad:
        raise ValueError(f"nonuple violates system equations {bad}")
    if not _ahx_holds(alg, a, v):
        raise ValueError("parameter fails eps a^2 = h a + eps^{-1} xi Id")

    rep = ConnectionReport(
        case=case, algebra=alg.spec.label(), n=alg.n,
        l=alg.spec.l, j=alg.spec.j, rank_a=matrix_rank_of(alg, a),
        mode=alg.mode)
    lam, psi = build_lambda_psi(alg, a, v)
    D = tn.standard_connection(alg)
    S = tn.grad(alg, D, lam)
    nab = tn.conn_add(D, S)
    rep.flags["torsion_free"] = is_torsion_free(alg, nab)
    _record(alg, rep, "unimodular", _as_vecarr(alg, tn.contraction(alg, S)))
    _record(alg, rep, "weakly_einstein", tn.weakly_einstein_residual(alg, S))
    rho = tn.ricci(alg, nab, require_unimodular=False)
    quarter = Fraction(1, 4) if alg.mode == "exact" else 0.25
    expected = tn.sym_scale(tn.sym_add(tn.beta_sym(alg), psi), -quarter)
    _record(alg, rep, "ricci_matches", rho, expected)
    _record(alg, rep, "ricci_parallel", tn.grad(alg, nab, rho))
    nondeg = (_sym_rank(alg, rho) == alg.m)
    rep.flags["ricci_nondegenerate"] = nondeg
    rep.flags["einstein"] = (rep.flags["weakly_einstein"] and nondeg
                             and rep.flags["ricci_parallel"])
    rep.scalars["psi_trace_pairing"] = tn.inner_T(
        alg, tn.beta_sym(alg), tn.sym_add(tn.beta_sym(alg), psi))
    return nab, rep, psi


def _ahx_holds(alg, a, v: Nonuple, tol: Optional[float] = None) -> bool:
    if alg.mode == "float":
        am = np.asarray(a, dtype=complex)
        lhs = alg.eps * (am @ am)
        rhs = float(v.h) * am + float(v.xi) / alg.eps * np.eye(alg.n)
        return np.abs(lhs - rhs).max() < (DEFAULT_TOL if tol is None else tol) \
            * max(1.0, float(np.abs(lhs).max()))
    lhs = mat_scale(mat_mul(a, a), alg.eps)
    eye = _mat(alg.n)
    for i in range(alg.n):
        eye[i][i] = QQi(1)
    rhs = mat_add(mat_scale(a, QQi.of(Fraction(v.h))),
                  mat_scale(eye, QQi.of(Fraction(v.xi)) / alg.eps))
    return all(lhs[i][jx] == rhs[i][jx]
               for i in range(alg.n) for jx in range(alg.n))


def non_einstein_example(alg):
    """The even-n weakly-Einstein connection with degenerate Ricci tensor.

    Float-only: the parameter involves sqrt(xi).  Returns
    (a, nonuple, connection, report).
    """
    n = alg.n
    if n % 2:
        raise ValueError("the example needs even n")
    if alg.mode != "float":
        raise ValueError("float mode only (the parameter is irrational)")
    v = non_einstein_nonuple(n).to_float()
    sx = float(np.sqrt(v.xi))
    diag = np.array([1.0] * (n // 2) + [-1.0] * (n // 2))
    kind = alg.spec.kind
    if kind in ("sl_r", "sl_c"):
        a = (sx * np.diag(diag)).astype(complex) / complex(alg.eps)
    elif kind == "su":
        a = 1j * sx * np.diag(diag)
    elif kind == "sl_h":
        k = n // 2
        if k % 2:
            raise ValueError(
                "sl(k,H) with odd k admits no square root of xi Id")
        half = np.array([1.0] * (k // 2) + [-1.0] * (k // 2))
        z = np.diag(half)
        a = sx * np.block([[z, np.zeros((k, k))],
                           [np.zeros((k, k)), z]]).astype(complex)
    else:
        raise ValueError("unsupported kind for the example")
    nab, rep, psi = general_weakly_einstein(alg, a, v, case="non-einstein")
    bp = tn.sym_add(tn.beta_sym(alg), psi)
    av = alg.coords(a)
    worst = max(abs(complex(tn.eval_sym(alg, bp, av, alg.coords(alg.basis[k2]))))
                for k2 in range(alg.m))
    rep.residuals["rho_a_degeneracy"] = worst / max(1.0, tn.max_abs(bp))
    rep.flags["a_in_ricci_nullspace"] = bool(rep.residuals["rho_a_degeneracy"] < 1e-9)
    z = float(v.z)
    rep.scalars["trace_z_expression"] = (n * n - 1) - (n * n + 1) * (z + 1)
    rep.flags["not_einstein"] = not rep.flags["einstein"]
    return a, v, nab, rep


# ---------------------------------------------------------------------------
# the underlying real algebra of sl(n,C)
# ---------------------------------------------------------------------------

def realify_connection(alg_c, alg_r, conn):
    """Real components of a complex-bilinear connection on sl(n,C)_R."""
    m = alg_c.m
    if alg_r.m != 2 * m:
        raise ValueError("algebra mismatch")
    if alg_c.mode != "exact" or alg_r.mode != "exact":
        raise ValueError("exact mode expected")
    out = tn.zeros_conn(alg_r)
    for al in (0, 1):
        for p in range(m):
            for be in (0, 1):
                for q in range(m):
                    signed = conn[p][q]
                    # i^(al+be) * value
                    w = [QQi.of(x) for x in signed]
                    for _ in range(al + be):
                        w = [QQi(0, 1) * x for x in w]
                    row = out[al * m + p][be * m + q]
                    for r in range(m):
                        row[r] = w[r].re
                        row[m + r] = w[r].im
    return out


def realify_sym(alg_c, alg_r, sig, scale: int = 2):
    """scale * Re of a complex symmetric tensor, as a tensor on sl(n,C)_R."""
    m = alg_c.m
    out = tn.zeros_sym(alg_r)
    for al in (0, 1):
        for p in range(m):
            for be in (0, 1):
                for q in range(m):
                    v = QQi.of(sig[p][q])
                    for _ in range(al + be):
                        v = QQi(0, 1) * v
                    out[al * m + p][be * m + q] = scale * v.re
    return out


def holomorphy_check(alg_r, S, tol: Optional[float] = None) -> bool:
    """True iff S(iv, w) = i S(v, w) = S(v, iw) on the basis grid."""
    if alg_r.spec.kind != "sl_c_real":
        raise ValueError("holomorphy check lives on sl_c_real")
    m2 = alg_r.m
    m = m2 // 2

    def j_index(p):
        # multiplication by i permutes the canonical basis (e, ie)
        return (p + m, 1) if p < m else (p - m, -1)

    def j_vec(vec):
        out = [None] * m2
        for r in range(m):
            # i * e_r = (ie)_r ; i * (ie)_r = -e_r
            out[m + r] = vec[r]
            out[r] = -vec[m + r]
        return out

    exact = alg_r.mode == "exact"
    for p in range(m2):
        jp, sp = j_index(p)
        for q in range(m2):
            jq, sq = j_index(q)
            base = list(S[p][q]) if exact else list(np.asarray(S)[p, q])
            want = j_vec(base)
            got1 = [sp * x for x in (S[jp][q] if exact else np.asarray(S)[jp, q])]
            got2 = [sq * x for x in (S[p][jq] if exact else np.asarray(S)[p, jq])]
            if exact:
                if list(got1) != want or list(got2) != want:
                    return False
            else:
                d = max(max(abs(complex(x) - complex(y)) for x, y in zip(got1, want)),
                        max(abs(complex(x) - complex(y)) for x, y in zip(got2, want)))
                if d > (DEFAULT_TOL if tol is None else tol) * max(1.0, tn.max_abs(S)):
                    return False
    return True


def antilinear_twist(alg_r, S):
    """The conjugation-twisted symmetrization of S: fails holomorphy when S != 0.

    T(v, w) = [S(Pv, w) + S(v, Pw)] / 2 with P the entrywise complex
    conjugation of sl(n,C).  P fixes the real canonical basis vectors and
    negates their i-multiples, so in components T just rescales S by
    (sign(p) + sign(q)) / 2.
    """
    m2 = alg_r.m
    m = m2 // 2

    def p_sign(p):
        return 1 if p < m else -1

    out = tn.zeros_conn(alg_r)
    half = Fraction(1, 2)
    for p in range(m2):
        for q in range(m2):
            f = half * (p_sign(p) + p_sign(q))
            if not f:
                continue
            src = S[p][q]
            dst = out[p][q]
            for r in range(m2):
                dst[r] = f * src[r]
    return out
