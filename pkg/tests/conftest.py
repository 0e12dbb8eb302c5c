import numpy as np
import pytest
import scipy.linalg

ACCEPTANCE_LINES = []


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (a + a.conj().T) / 2
    return scale * h / np.linalg.norm(h, 2)


def random_traceless(rng, d, scale=1.0):
    h = random_hermitian(rng, d)
    h = h - np.trace(h).real / d * np.eye(d)
    return scale * h / max(np.linalg.norm(h, 2), 1e-300)


def random_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def expm_i(h):
    """Reference exp(iH) through scipy's Pade expm, independent of the spectral path."""
    return scipy.linalg.expm(1j * np.asarray(h))


def opnorm(m):
    return np.linalg.norm(m, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
