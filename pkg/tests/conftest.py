import functools

import pytest

from einconn.algebras import AlgebraSpec, build_algebra


@functools.lru_cache(maxsize=None)
def algebra(kind, n, l=None, j=None, eps="1"):
    """Session-wide cache of exactly built algebras (they are immutable)."""
    return build_algebra(AlgebraSpec(kind, n, l, j, eps))


@functools.lru_cache(maxsize=None)
def algebra_float(kind, n, l=None, j=None, eps="1"):
    return algebra(kind, n, l, j, eps).to_float()


@pytest.fixture(scope="session")
def sl3r():
    return algebra("sl_r", 3)


@pytest.fixture(scope="session")
def sl2r():
    return algebra("sl_r", 2)


@pytest.fixture(scope="session")
def sl4r():
    return algebra("sl_r", 4)


@pytest.fixture(scope="session")
def su21():
    return algebra("su", 3, 2, 1)


@pytest.fixture(scope="session")
def sl3c():
    return algebra("sl_c", 3, eps="1")


@pytest.fixture(scope="session")
def sl3ci():
    return algebra("sl_c", 3, eps="i")


@pytest.fixture(scope="session")
def sl2h():
    return algebra("sl_h", 4)


@pytest.fixture(scope="session")
def sl3c_real():
    return algebra("sl_c_real", 3)
