import numpy as np
import pytest

from finslerhom import zoo

ACCEPTANCE_LINES: list[str] = []


def poly_field(rng, n, scale=0.3):
    """Random quadratic vector field, jet-compatible."""
    a = rng.normal(size=n)
    B = rng.normal(size=(n, n)) * scale
    Q = rng.normal(size=(n, n, n)) * scale / 3

    def W(x):
        return [
            a[i] + sum(B[i, j] * x[j] for j in range(n))
            + sum(Q[i, j, k] * x[j] * x[k] for j in range(n) for k in range(n))
            for i in range(n)
        ]

    return W


def random_randers(rng, n, beta=0.6):
    M = rng.normal(size=(n, n))
    A = M @ M.T + n * np.eye(n)
    b = rng.normal(size=n)
    b *= beta / np.sqrt(b @ np.linalg.solve(A, b))
    return A, b


@pytest.fixture(scope="session")
def spaces():
    return {name: zoo.builtin(name) for name in zoo.builtin_names()}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
