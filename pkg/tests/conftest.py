import numpy as np
import pytest


def _passive(rng, n):
    """Random orthogonal symplectic in (x1, p1, ..., xn, pn) ordering."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    u = q * (np.diag(r) / np.abs(np.diag(r)))
    xxpp = np.block([[u.real, -u.imag], [u.imag, u.real]])
    perm = [k for m in range(n) for k in (m, n + m)]
    return xxpp[np.ix_(perm, perm)]


def random_symplectic(rng, n, max_squeeze=1.0):
    r = rng.uniform(-max_squeeze, max_squeeze, size=n)
    sq = np.diag([v for x in r for v in (np.exp(-x), np.exp(x))])
    return _passive(rng, n) @ sq @ _passive(rng, n)


def random_physical_cm(rng, n, pure=False):
    nus = np.ones(n) if pure else rng.uniform(1.0, 4.0, size=n)
    s = random_symplectic(rng, n)
    return s @ np.diag(np.repeat(nus, 2)) @ s.T, np.sort(nus)[::-1]


@pytest.fixture(scope="session")
def make_state():
    return random_physical_cm


@pytest.fixture(scope="session")
def make_symplectic():
    return random_symplectic


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
