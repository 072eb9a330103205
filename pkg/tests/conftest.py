import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def spread_points(rng, n, dim):
    """Gaussian points at scales 0.1, 1 and 10."""
    scales = np.array([0.1, 1.0, 10.0])[np.arange(n) % 3]
    return rng.standard_normal((n, dim)) * scales[:, None]


def brute_modulus(m, grid=None):
    """Smallest ``k`` with ``||M - (1 - k) I|| <= k``, by bisection on the norm test.

    Independent of the semidefinite formulation used by the library.
    """
    m = np.asarray(m, float)
    eye = np.eye(m.shape[0])

    def ok(k):
        if k == 0:
            return np.linalg.norm(m - eye, 2) <= 1e-12
        return np.linalg.norm(m - (1 - k) * eye, 2) <= k * (1 + 1e-13)

    if ok(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    if not ok(hi):
        return np.inf
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
