"""CLI: flags, exit codes, determinism, report emission."""

import argparse
import json
import subprocess
import sys

import pytest

from einconn.cli import build_parser, emit_report, main, run_check_suite


def _args(**kw):
    ns = build_parser().parse_args([])
    for k, v in kw.items():
        setattr(ns, k, v)
    return ns


def test_exit_codes(tmp_path):
    assert main(["--suite", "system", "--n", "3"]) == 0
    # config error: su without l, j
    assert main(["--algebra", "su", "--n", "3", "--suite", "einstein"]) == 2
    # config error: bad flag value
    assert main(["--suite", "nonexistent"]) == 2
    # config error: unwritable output path
    assert main(["--suite", "system", "--n", "3",
                 "--out", str(tmp_path / "no" / "way" / "x.json")]) == 2


def test_spectrum_csv_emission(tmp_path):
    out = tmp_path / "rep.json"
    rc = main(["--algebra", "sl_r", "--n", "3", "--suite", "spectrum",
               "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["overall"] == "pass"
    csv_path = tmp_path / "rep_spectrum.csv"
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "algebra,eigenvalue,multiplicity"
    assert len(lines) == 4  # three eigenvalues


def test_system_curve_csv(tmp_path):
    out = tmp_path / "sys.json"
    rc = main(["--suite", "system", "--n", "4", "--out", str(out)])
    assert rc == 0
    curve = tmp_path / "sys_curve.csv"
    lines = curve.read_text().strip().splitlines()
    assert lines[0].startswith("xi,")
    assert len(lines) == 9  # eight continuation steps


def test_empty_report_is_valid_json(tmp_path, capsys):
    emit_report({"checks": [], "overall": "pass", "config": {}}, None)
    doc = json.loads(capsys.readouterr().out)
    assert doc["checks"] == []


def test_determinism_byte_identical(tmp_path):
    a = run_check_suite(_args(suite="system", n=3, seed=7))
    b = run_check_suite(_args(suite="system", n=3, seed=7))
    a.pop("_csv_spectrum"), a.pop("_csv_curve")
    b.pop("_csv_spectrum"), b.pop("_csv_curve")
    ja = json.dumps(a, sort_keys=True, default=str)
    jb = json.dumps(b, sort_keys=True, default=str)
    assert ja == jb
    c = run_check_suite(_args(suite="orbits", algebra="su", n=3, l=2, j=1,
                              seed=5, trials=3))
    d = run_check_suite(_args(suite="orbits", algebra="su", n=3, l=2, j=1,
                              seed=5, trials=3))
    for r in (c, d):
        r.pop("_csv_spectrum"), r.pop("_csv_curve")
    assert json.dumps(c, sort_keys=True, default=str) == \
        json.dumps(d, sort_keys=True, default=str)


def test_invalid_config_values():
    assert main(["--suite", "system", "--n", "3", "--tol", "-1"]) == 2
    assert main(["--suite", "system", "--n", "3", "--trials", "0"]) == 2


def test_einstein_suite_exit(tmp_path):
    rc = main(["--algebra", "sl_r", "--n", "3", "--suite", "einstein",
               "--out", str(tmp_path / "e.json")])
    assert rc == 0
    doc = json.loads((tmp_path / "e.json").read_text())
    names = [c["check"] for c in doc["checks"]]
    assert "einstein rank=0" in names and "einstein rank=1" in names


def test_console_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "einconn.cli", "--suite", "system", "--n", "3"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "overall: pass" in proc.stdout
