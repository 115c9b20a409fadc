"""Algebra construction: bases, structure constants, Killing form, coords."""

import json
import random
from fractions import Fraction

import pytest

from einconn.algebras import (AlgebraSpec, bracket, build_algebra, inner,
                              mat_mul, mat_scale, serialize_algebra,
                              traceless_part, _eij, _mat)
from einconn.numeric import QQi

from conftest import algebra


def test_dimensions():
    assert algebra("sl_r", 3).m == 8
    assert algebra("su", 3, 2, 1).m == 8
    assert algebra("sl_h", 4).m == 15
    assert algebra("sl_c_real", 3).m == 16
    assert algebra("sl_r", 2).m == 3


def test_spec_validation():
    with pytest.raises(ValueError):
        AlgebraSpec("sl_r", 1)
    with pytest.raises(ValueError):
        AlgebraSpec("su", 3, 1, 2)      # l < j
    with pytest.raises(ValueError):
        AlgebraSpec("sl_h", 5)          # odd n
    with pytest.raises(ValueError):
        AlgebraSpec("nope", 3)


def test_member_checks(sl3r, su21):
    ident = _mat(3)
    for i in range(3):
        ident[i][i] = QQi(1)
    assert not sl3r.member_check(ident)
    assert sl3r.member_check(_eij(3, 0, 1))
    d = _mat(3)
    d[0][0] = QQi(0, 1)
    d[1][1] = QQi(0, -1)
    assert su21.member_check(d)
    assert not su21.member_check(_eij(3, 0, 1))  # not skew-eta-Hermitian


def test_killing_examples(sl3r, sl3c_real):
    a = _mat(3)
    a[0][0] = QQi(1)
    a[1][1] = QQi(-1)
    assert sl3r.killing(a, a) == 12
    e12 = _eij(3, 0, 1)
    assert sl3r.killing(e12, e12) == 0
    assert sl3c_real.killing(a, a) == 24  # 2 Re of the complex value


def test_traceless_and_inner():
    ident = _mat(3)
    for i in range(3):
        ident[i][i] = QQi(1)
    z = traceless_part(ident)
    assert all(not z[i][j] for i in range(3) for j in range(3))
    assert inner(_eij(3, 0, 1), _eij(3, 1, 0)) == QQi(1)
    e11 = _eij(3, 0, 0)
    t = traceless_part(e11)
    assert t[0][0] == QQi(Fraction(2, 3))
    assert t[1][1] == QQi(Fraction(-1, 3))
    assert t[2][2] == QQi(Fraction(-1, 3))


@pytest.mark.parametrize("kind,n,l,j,eps", [
    ("sl_r", 3, None, None, "1"),
    ("su", 3, 2, 1, "i"),
    ("sl_h", 4, None, None, "1"),
    ("sl_c", 3, None, None, "i"),
])
def test_coords_roundtrip(kind, n, l, j, eps):
    alg = algebra(kind, n, l, j, eps)
    rng = random.Random(4)
    from einconn.tensors import random_vector
    for _ in range(20):
        v = random_vector(alg, rng)
        assert alg.coords(alg.uncoords(v)) == v
    zero = [alg.f_zero()] * alg.m
    assert alg.coords(alg.uncoords(zero)) == zero
    for i in range(alg.m):
        unit = [alg.f_zero()] * alg.m
        unit[i] = alg.f_one()
        assert alg.coords(alg.basis[i]) == unit


@pytest.mark.parametrize("kind,n,l,j,eps", [
    ("sl_r", 3, None, None, "1"),
    ("sl_c", 3, None, None, "i"),
    ("su", 3, 2, 1, "i"),
    ("sl_h", 4, None, None, "1"),
])
def test_eps_closure(kind, n, l, j, eps):
    """The three family values eps(av+va)_0 etc. stay inside the algebra."""
    alg = algebra(kind, n, l, j, eps)
    rng = random.Random(9)
    from einconn.tensors import random_vector
    for _ in range(6):
        a = alg.uncoords(random_vector(alg, rng))
        b = alg.uncoords(random_vector(alg, rng))
        v = alg.uncoords(random_vector(alg, rng))
        e, e2 = alg.eps, alg.eps * alg.eps
        m1 = traceless_part(mat_scale(
            [[a[i][k] for k in range(alg.n)] for i in range(alg.n)], QQi(0)))
        t1 = traceless_part(mat_scale(mat_add_(mat_mul(a, v), mat_mul(v, a)), e))
        assert alg.member_check(t1)
        t2 = mat_add_(mat_scale(b, e2 * inner(a, v) / (2 * alg.n)),
                      mat_scale(a, e2 * inner(b, v) / (2 * alg.n)))
        assert alg.member_check(t2)
        t3 = traceless_part(mat_scale(
            mat_add_(mat_mul(mat_mul(a, v), b), mat_mul(mat_mul(b, v), a)),
            e2 * QQi(Fraction(1, 2))))
        assert alg.member_check(t3)


def mat_add_(x, y):
    return [[p + q for p, q in zip(rx, ry)] for rx, ry in zip(x, y)]


def test_ad_invariance(sl3r):
    rng = random.Random(12)
    from einconn.tensors import random_vector, eval_sym, beta_sym
    bt = beta_sym(sl3r)
    for _ in range(10):
        u = random_vector(sl3r, rng)
        v = random_vector(sl3r, rng)
        w = random_vector(sl3r, rng)
        um, vm, wm = map(sl3r.uncoords, (u, v, w))
        t = eval_sym(sl3r, bt, sl3r.coords(bracket(um, vm)), w) \
            + eval_sym(sl3r, bt, v, sl3r.coords(bracket(um, wm)))
        assert t == 0


def test_real_form_killing_is_2re(sl3c, sl3c_real):
    rng = random.Random(21)
    from einconn.tensors import random_vector
    for _ in range(10):
        a = sl3c.uncoords(random_vector(sl3c, rng))
        b = sl3c.uncoords(random_vector(sl3c, rng))
        # complex Killing form via components
        ca, cb = sl3c.coords(a), sl3c.coords(b)
        kc = sl3c.f_zero()
        for jj in range(sl3c.m):
            for kk in range(sl3c.m):
                if ca[jj] and cb[kk] and sl3c.beta[jj][kk]:
                    kc = kc + sl3c.beta[jj][kk] * ca[jj] * cb[kk]
        assert sl3c_real.killing(a, b) == 2 * kc.re


def test_serialization_golden(sl2r, tmp_path):
    doc = serialize_algebra(sl2r)
    assert doc["dim"] == 3
    assert doc["kind"] == "sl_r"
    text = json.dumps(doc, sort_keys=True)
    # byte-stable across runs
    assert text == json.dumps(serialize_algebra(sl2r), sort_keys=True)
    import pathlib
    golden = pathlib.Path(__file__).parent / "golden" / "sl2r.json"
    assert json.loads(golden.read_text()) == doc


def test_float_twin_roundtrip(su21):
    import numpy as np
    f = su21.to_float()
    rng = random.Random(2)
    from einconn.tensors import random_vector
    v = np.array([float(x) for x in random_vector(su21, rng)])
    mat = f.uncoords(v)
    back = f.coords(mat)
    assert np.abs(back - v).max() < 1e-12
