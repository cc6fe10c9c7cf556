import math
import numpy as np
import pytest
from hypothesis import settings

from hsroute import HSConfig, circular, four_vortices_field

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def circ():
    return circular()


@pytest.fixture(scope="session")
def fv():
    return four_vortices_field()


@pytest.fixture
def cfg():
    return HSConfig()


def assert_close_angle(a, b, tol=1e-12):
    assert abs(math.remainder(a - b, 2 * math.pi)) <= tol


def fd(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


def random_points(n, lo=-6.0, hi=8.0, seed=0):
    return np.random.default_rng(seed).uniform(lo, hi, size=(n, 2))


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line, then assert it."""
    def record(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
