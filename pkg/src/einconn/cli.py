"""Command-line check-suite runner.

Examples::

    einconn --algebra sl_r --n 3 --suite spectrum --out report.json
    einconn --algebra su --n 3 --l 2 --j 1 --suite einstein
    einconn --suite system --n 3
    einconn --suite all --out report.json

Exit codes: 0 all checks passed, 1 at least one failed, 2 configuration
error.  Reports are JSON with stable key ordering; the spectrum and system
suites also emit CSV side files next to the JSON report.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from . import families, identities, nilpotents, quadric, spectral
from .algebras import AlgebraSpec, build_algebra
from .numeric import set_default_tol
from . import tensors as tn


def make_spec(args) -> AlgebraSpec:
    kw = {}
    if args.algebra == "su":
        if args.l is None or args.j is None:
            raise SystemExit2("su needs --l and --j")
        kw = {"l": args.l, "j": args.j}
    return AlgebraSpec(args.algebra, args.n, eps=args.eps, **kw)


class SystemExit2(Exception):
    pass


def _check(name, ok, payload=None):
    return {"check": name, "status": "pass" if ok else "fail",
            "payload": payload if payload is not None else {}}


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_spectrum(args, out_rows) -> List[dict]:
    spec = make_spec(args)
    alg = build_algebra(spec)
    if spec.kind == "sl_c_real":
        rep = spectral.real_form_spectrum(alg)
        want = spectral.expected_real_form_table(spec.n)
    else:
        rep = spectral.spectrum(alg)
        want = spectral.expected_table(spec.n)
    ok = rep.complete and rep.diagonalizable and \
        sorted(rep.entries) == sorted(want)
    for algx, ev, mult in spectral.spectrum_csv_rows(rep):
        out_rows.append((algx, ev, mult))
    return [_check("spectrum", ok, rep.as_dict())]


def suite_identities(args) -> List[dict]:
    spec = make_spec(args)
    alg = build_algebra(spec)
    if args.mode == "float":
        alg = alg.to_float()
    rng = random.Random(args.seed)
    rep = identities.run_identity_suite(alg, args.trials, rng, tol=args.tol)
    out = [_check("identities", rep.passed, rep.as_dict())]
    if alg.n >= 3:
        rep2 = families.check_multiplication_tables(alg, args.trials, rng,
                                                    tol=args.tol)
        out.append(_check("multiplication-tables", rep2.passed,
                          rep2.as_dict()))
    return out


def suite_einstein(args) -> List[dict]:
    spec = make_spec(args)
    alg = build_algebra(spec)
    if args.mode == "float":
        alg = alg.to_float()
        base = alg.exact
    else:
        base = alg
    out = []
    labels = nilpotents.enumerate_orbits(base)
    for lab in labels:
        a = nilpotents.canonical_nilpotent(base, lab)
        if alg.mode == "float":
            a = np.array([[complex(x) for x in row] for row in a])
        nab, rep = families.einstein_from_nilpotent(alg, a)
        name = f"einstein rank={lab.rank}" + \
            (f" ind+={lab.ind_plus}" if lab.ind_plus is not None else "")
        out.append(_check(name, rep.passed(), rep.as_dict()))
    out.append(_check("orbit-count", len(labels) == _expected_count(base),
                      {"count": len(labels)}))
    return out


def _expected_count(alg) -> int:
    kind = alg.spec.kind
    if kind == "su":
        j = alg.spec.j
        return (j + 1) * (j + 2) // 2
    if kind == "sl_h":
        return alg.n // 4 + 1
    return alg.n // 2 + 1


def suite_orbits(args) -> List[dict]:
    spec = make_spec(args)
    alg = build_algebra(spec)
    rng = random.Random(args.seed)
    out = []
    labels = nilpotents.enumerate_orbits(alg)
    out.append(_check("orbit-count", len(labels) == _expected_count(alg),
                      nilpotents.orbit_table(alg)))
    for lab in labels:
        a = nilpotents.canonical_nilpotent(alg, lab)
        inv = nilpotents.orbit_invariants(alg, a)
        ok = inv == lab
        for _ in range(min(args.trials, 10)):
            g = nilpotents.random_group_conjugation(alg, rng)
            b = nilpotents.conjugate(alg, g, a)
            ok = ok and nilpotents.orbit_invariants(alg, b) == lab
        name = f"orbit rank={lab.rank}" + \
            (f" ind+={lab.ind_plus}" if lab.ind_plus is not None else "")
        out.append(_check(name, ok, {}))
    if alg.n >= 3:
        md = nilpotents.moduli_dimension(alg)
        bt = nilpotents.bundle_dimension_table(alg)
        out.append(_check("moduli-dimension", md == bt["total"],
                          {"dim": md, **bt}))
    return out


def suite_system(args) -> List[dict]:
    n = args.n
    out = []
    base = quadric.base_solution(n)
    res = quadric.eval_system(n, base)
    ok = all(x == 0 for x in res.res) and \
        (res.L, res.U, res.V, res.W) == (0, 0, -2, 1)
    out.append(_check("base-solution", ok,
                      {"LUVW": [str(res.L), str(res.U), str(res.V), str(res.W)]}))
    jr = quadric.jacobian_check(n)
    out.append(_check("jacobian", jr.entries_ok and jr.nonsingular,
                      {"failures": [f[0] for f in jr.failures]}))
    slope = quadric.curve_derivative(n)
    out.append(_check("curve-slope", abs(slope - 4.0) < 1e-6 * 4.0,
                      {"dh_dxi": slope}))
    ne = quadric.non_einstein_nonuple(n) if n % 2 == 0 else None
    if ne is not None:
        r = quadric.eval_system(n, ne)
        others = all(r.res[i] == 0 for i in (0, 1, 3, 4, 5, 6, 7))
        out.append(_check("degenerate-nonuple", others,
                          {"residual_iii": str(r.res[2])}))
    rat_ok, wit = quadric.rationality_check(n, base.xi, base.h)
    out.append(_check("rationality-base", rat_ok, {"witness": wit}))
    return out


def suite_system_curve_rows(args, rows) -> None:
    n = args.n
    target = 0.004
    for v in quadric.continuation(n, target, steps=8):
        rows.append([v.xi] + [float(x) for x in v.as_tuple()[1:]])


def suite_non_einstein(args) -> List[dict]:
    spec = make_spec(args)
    if spec.n % 2:
        raise SystemExit2("the non-Einstein example needs even n")
    alg = build_algebra(spec, verify=False).to_float()
    a, v, nab, rep = families.non_einstein_example(alg)
    ok = (rep.flags["weakly_einstein"] and rep.flags["unimodular"]
          and rep.flags["ricci_parallel"] and rep.flags["a_in_ricci_nullspace"]
          and rep.flags["not_einstein"])
    return [_check("non-einstein", ok, rep.as_dict())]


def suite_all(args, csv_rows) -> List[dict]:
    base_args = args

    def sub(**kw):
        ns = argparse.Namespace(**vars(base_args))
        for k, v in kw.items():
            setattr(ns, k, v)
        return ns

    jobs = [
        ("identities", lambda: suite_identities(sub(algebra="sl_r", n=3,
                                                    mode="exact"))),
        ("spectrum3", lambda: suite_spectrum(sub(algebra="sl_r", n=3),
                                             csv_rows)),
        ("spectrum4", lambda: suite_spectrum(sub(algebra="sl_r", n=4),
                                             csv_rows)),
        ("einstein-slr", lambda: suite_einstein(sub(algebra="sl_r", n=3,
                                                    mode="exact"))),
        ("einstein-su", lambda: suite_einstein(sub(algebra="su", n=3, l=2,
                                                   j=1, mode="exact"))),
        ("orbits-slr", lambda: suite_orbits(sub(algebra="sl_r", n=3))),
        ("orbits-su", lambda: suite_orbits(sub(algebra="su", n=3, l=2, j=1))),
        ("system", lambda: suite_system(sub(n=3))),
        ("non-einstein", lambda: suite_non_einstein(sub(algebra="sl_r", n=4))),
    ]
    # independent checks may run on a bounded pool; assembly stays ordered
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [(name, pool.submit(fn)) for name, fn in jobs]
            results = [(name, f.result()) for name, f in futures]
    else:
        results = [(name, fn()) for name, fn in jobs]
    out = []
    for _, checks in results:
        out += checks
    return out


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="einconn",
        description="check suites for left-invariant Einstein and "
                    "weakly-Einstein connections on the special linear and "
                    "pseudo-unitary families")
    p.add_argument("--algebra", choices=["sl_r", "sl_c", "su", "sl_h",
                                         "sl_c_real"], default="sl_r")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--eps", choices=["1", "i"], default="1")
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--tol", type=float,
                   default=float(os.environ.get("EINCONN_TOL", "1e-9")))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--suite", choices=["identities", "spectrum", "einstein",
                                       "orbits", "system", "non-einstein",
                                       "all"], default="all")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads for independent checks")
    return p


def run_check_suite(args) -> dict:
    if args.tol <= 0:
        raise SystemExit2("tolerance must be positive")
    if args.trials < 1:
        raise SystemExit2("trials must be >= 1")
    set_default_tol(args.tol)
    csv_rows: List = []
    curve_rows: List = []
    if args.suite == "identities":
        checks = suite_identities(args)
    elif args.suite == "spectrum":
        checks = suite_spectrum(args, csv_rows)
    elif args.suite == "einstein":
        checks = suite_einstein(args)
    elif args.suite == "orbits":
        checks = suite_orbits(args)
    elif args.suite == "system":
        checks = suite_system(args)
        suite_system_curve_rows(args, curve_rows)
    elif args.suite == "non-einstein":
        checks = suite_non_einstein(args)
    else:
        checks = suite_all(args, csv_rows)
    overall = all(c["status"] == "pass" for c in checks)
    report = {
        "config": {
            "algebra": args.algebra, "n": args.n, "l": args.l, "j": args.j,
            "eps": args.eps, "mode": args.mode, "tol": args.tol,
            "seed": args.seed, "trials": args.trials, "suite": args.suite,
        },
        "checks": checks,
        "overall": "pass" if overall else "fail",
    }
    report["_csv_spectrum"] = csv_rows
    report["_csv_curve"] = curve_rows
    return report


def emit_report(report: dict, path: Optional[str]) -> None:
    csv_spec = report.pop("_csv_spectrum", [])
    csv_curve = report.pop("_csv_curve", [])
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if path is None:
        print(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text + "\n")
        stem = os.path.splitext(path)[0]
        if csv_spec:
            with open(stem + "_spectrum.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["algebra", "eigenvalue", "multiplicity"])
                w.writerows(csv_spec)
        if csv_curve:
            with open(stem + "_curve.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["xi", "f", "h", "x", "y", "z", "p", "q", "r"])
                w.writerows(csv_curve)
    except OSError as exc:
        raise SystemExit2(f"cannot write report to {path}: {exc}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for bad flags
        return 0 if exc.code in (0, None) else 2
    try:
        report = run_check_suite(args)
    except SystemExit2 as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError,) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    overall = report["overall"]
    try:
        emit_report(report, args.out)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for c in report["checks"]:
        print(f"[{c['status']:4s}] {c['check']}")
    print(f"overall: {overall}")
    return 0 if overall == "pass" else 1


if __name__ == "__main__":
    raise SystemExit(main())
