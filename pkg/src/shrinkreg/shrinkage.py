"""Reduced-variance (shrunken slope) simple regression.

For a simple regression slope ``b`` with sampling variance ``sigma2_b`` the
shrunken estimator ``s * b`` trades squared bias against variance:

    E(s b - beta)^2 = s^2 sigma2_b + (1 - s)^2 beta^2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from shrinkreg.core import Dataset, LinearFit, fit_ols


@dataclass(frozen=True)
class SlopeSamplingModel:
    beta: float
    sigma2_b: float

    def __post_init__(self):
        if not self.sigma2_b >= 0:
            raise ValueError(f"sigma2_b must be nonnegative, got {self.sigma2_b}")


@dataclass(frozen=True)
class OptimalShrinkage:
    s: float
    degenerate: bool = False


def _check_s(s: float) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"shrinkage factor must lie in [0, 1], got {s}")
    return s


def expected_squared_error(s: float, model: SlopeSamplingModel) -> float:
    s = _check_s(s)
    return s * s * model.sigma2_b + (1.0 - s) ** 2 * model.beta**2


def optimal_s_sampling(model: SlopeSamplingModel) -> OptimalShrinkage:
    """Shrinkage factor minimising :func:`expected_squared_error`.

    With ``beta == 0`` every estimate but zero is pure error, so ``s = 0`` is
    exact; the result is flagged as degenerate.
    """
    if model.beta == 0:
        return OptimalShrinkage(0.0, degenerate=True)
    return OptimalShrinkage(1.0 / (1.0 + model.sigma2_b / model.beta**2))


def optimal_s_population(r: float, n: int) -> float:
    """Optimal shrinkage for population correlation ``r`` and sample size ``n``."""
    if n <= 3:
        raise ValueError(f"n must exceed 3, got {n}")
    r2 = float(r) ** 2
    if not 0.0 < r2 < 1.0:
        raise ValueError(f"|r| must lie strictly between 0 and 1, got {r}")
    return 1.0 / (1.0 + ((1.0 - r2) / r2) / (n - 3))


def apply_shrinkage(data: Dataset, s: float) -> LinearFit:
    """Simple regression with the OLS slope multiplied by ``s``.

    The intercept is refit at the shrunken slope so predictions stay
    calibrated at the predictor mean; ``s = 0`` gives the intercept-only fit.
    """
    if data.p != 1:
        raise ValueError(f"shrinkage applies to simple regression only, got p={data.p}")
    s = _check_s(s)
    ols = fit_ols(data)
    if s == 1.0:
        return ols
    slope = s * ols.coefficients[0]
    x_mean = float(np.mean(data.predictors[:, 0]))
    y_mean = float(np.mean(data.response))
    return LinearFit(y_mean - slope * x_mean, np.array([slope]))
