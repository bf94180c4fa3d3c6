import numpy as np
import pytest

from tdqss.state import RegisterShape, StateVector


def random_state(d, t, rng):
    shape = RegisterShape(d, t)
    v = rng.normal(size=shape.size) + 1j * rng.normal(size=shape.size)
    return StateVector(shape, v / np.linalg.norm(v))


def random_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def phase_ramp(d, s):
    k = np.arange(d)
    return np.exp(2j * np.pi * s * k / d) / np.sqrt(d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
