"""Shrinkage toward equal regression weights.

Writing every item score as the person mean plus a deviation,
``X_j = X_mean + Z_j``, turns the multiple regression into

    Y = a + xi * X_sum + gamma_1 Z_1 + ... + gamma_p Z_p + e

Penalizing only the gammas pulls the model toward the sum-score regression
(equal weights) instead of toward zero.  The Z block is perfectly collinear
(each row sums to zero); the penalty keeps the problem well posed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from shrinkreg.core import Dataset, LinearFit, fit_ols
from shrinkreg.solver import CoefficientPath, PenaltySpec, fit_path

SUM_LABEL = "Sum"


@dataclass(frozen=True)
class EqualWeightsDesign:
    sum_score: np.ndarray
    deviations: np.ndarray
    p: int

    def matrix(self) -> np.ndarray:
        """Augmented design ``[X_sum | Z_1 ... Z_p]``."""
        return np.column_stack([self.sum_score, self.deviations])


@dataclass(frozen=True)
class EqualWeightsFit:
    intercept: float
    xi: float
    gammas: np.ndarray

    @classmethod
    def from_linear(cls, fit: LinearFit) -> "EqualWeightsFit":
        """Split a fit on the augmented design into (xi, gammas)."""
        return cls(fit.intercept, float(fit.coefficients[0]), np.array(fit.coefficients[1:]))

    def predict(self, design: EqualWeightsDesign) -> np.ndarray:
        return self.intercept + self.xi * design.sum_score + design.deviations @ self.gammas


def reparametrize(data: Dataset | np.ndarray) -> EqualWeightsDesign:
    X = data.predictors if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValueError("equal-weights reparametrization needs at least 2 predictors")
    p = X.shape[1]
    total = X.sum(axis=1)
    return EqualWeightsDesign(total, X - (total / p)[:, None], p)


def augmented_dataset(data: Dataset) -> Dataset:
    design = reparametrize(data)
    return Dataset(design.matrix(), data.response, (SUM_LABEL,) + data.column_names)


def equal_weights_spec(p: int, alpha: float = 1.0, standardize: bool = False) -> PenaltySpec:
    """Penalty on the gammas only; the sum-score weight is free."""
    return PenaltySpec(alpha=alpha, penalty_factors=(0.0,) + (1.0,) * p, standardize=standardize)


def fit_equal_shrinkage(data: Dataset, alpha: float = 1.0, grid=None,
                        standardize: bool = False) -> CoefficientPath:
    """Regularization path over ``(xi, gamma_1..gamma_p)``.

    Column 0 of the returned coefficients is xi; columns 1.. are the gammas.
    """
    aug = augmented_dataset(data)
    return fit_path(aug, equal_weights_spec(data.p, alpha, standardize), grid)


def fit_equal_ols(data: Dataset) -> EqualWeightsFit:
    """Unpenalized augmented fit, minimum-norm over the collinear Z block."""
    return EqualWeightsFit.from_linear(fit_ols(augmented_dataset(data)))


def implied_coefficients(fit: EqualWeightsFit) -> LinearFit:
    """Per-predictor weights ``xi + gamma_j - mean(gamma)`` on the original scale."""
    g = np.asarray(fit.gammas, dtype=float)
    return LinearFit(fit.intercept, fit.xi + g - g.mean())


def path_fits(path: CoefficientPath) -> list[EqualWeightsFit]:
    return [EqualWeightsFit.from_linear(path.fit_at(k)) for k in range(len(path))]
