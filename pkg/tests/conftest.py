import numpy as np
import pytest

from shrinkreg import Dataset

ACCEPTANCE_LOG: list[str] = []


def make_data(seed, n, p, beta=None, noise=1.0, corr=0.0):
    """Gaussian predictors with optional equicorrelation and a linear criterion."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    if corr:
        X = np.sqrt(1 - corr) * X + np.sqrt(corr) * rng.standard_normal((n, 1))
    beta = rng.standard_normal(p) if beta is None else np.asarray(beta, dtype=float)
    y = 1.5 + X @ beta + noise * rng.standard_normal(n)
    return Dataset(X, y)


def normal_equations(data):
    """Intercept and slopes from the raw normal equations (oracle)."""
    A = np.column_stack([np.ones(data.n), data.predictors])
    theta = np.linalg.solve(A.T @ A, A.T @ data.response)
    return theta[0], theta[1:]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
