"""Dense linear-model fitting, prediction and out-of-sample metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

#: relative singular-value cutoff for the minimum-norm least-squares solution
PINV_RCOND = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Predictor matrix (persons x items) plus a criterion vector."""

    predictors: np.ndarray
    response: np.ndarray
    column_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        X = np.array(self.predictors, dtype=float)
        y = np.array(self.response, dtype=float).ravel()
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise ValueError("predictors must be a 2-d matrix")
        n, p = X.shape
        if n < 1 or p < 1:
            raise ValueError(f"need at least one row and one column, got {X.shape}")
        if y.shape[0] != n:
            raise ValueError(f"response has {y.shape[0]} rows, predictors have {n}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("data contain missing or non-finite values")
        names = tuple(self.column_names) or tuple(f"x{j + 1}" for j in range(p))
        if len(names) != p:
            raise ValueError(f"{len(names)} column names for {p} columns")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "predictors", X)
        object.__setattr__(self, "response", y)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.predictors.shape[0]

    @property
    def p(self) -> int:
        return self.predictors.shape[1]

    def subset(self, rows) -> "Dataset":
        return Dataset(self.predictors[rows], self.response[rows], self.column_names)


@dataclass(frozen=True)
class LinearFit:
    intercept: float
    coefficients: np.ndarray

    def __post_init__(self):
        b = np.array(self.coefficients, dtype=float).ravel()
        if not (np.isfinite(self.intercept) and np.all(np.isfinite(b))):
            raise ValueError("fit contains non-finite values")
        b.setflags(write=False)
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "coefficients", b)

    @property
    def p(self) -> int:
        return self.coefficients.shape[0]


@dataclass(frozen=True)
class PredictionMetrics:
    """Out-of-sample accuracy of a prediction rule.

    ``pearson_r`` is NaN and ``correlation_defined`` False when either vector
    is constant.
    """

    mse: float
    pearson_r: float
    correlation_defined: bool = True


def min_norm_lstsq(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution of ``A x = b``."""
    return np.linalg.pinv(A, rcond=PINV_RCOND) @ b


def fit_ols(data: Dataset) -> LinearFit:
    """Least-squares intercept and slopes.

    The design is centered so the intercept is never part of the
    rank-deficiency handling; collinear columns get the minimum-norm slopes.
    """
    if data.n < 2:
        raise ValueError("fit_ols needs at least 2 observations")
    X, y = data.predictors, data.response
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    beta = min_norm_lstsq(X - x_mean, y - y_mean)
    return LinearFit(y_mean - x_mean @ beta, beta)


def predict(fit: LinearFit, predictors) -> np.ndarray:
    X = np.asarray(predictors, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if fit.p == 1 else X[None, :]
    if X.shape[1] != fit.p:
        raise ValueError(f"fit has {fit.p} coefficients, predictors have {X.shape[1]} columns")
    return fit.intercept + X @ fit.coefficients


def evaluate(observed: Sequence[float], predicted: Sequence[float]) -> PredictionMetrics:
    y = np.asarray(observed, dtype=float).ravel()
    yhat = np.asarray(predicted, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape[0]} observed vs {yhat.shape[0]} predicted")
    if y.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    mse = float(np.mean((y - yhat) ** 2))
    dy = y - y.mean()
    dp = yhat - yhat.mean()
    denom = np.sqrt((dy @ dy) * (dp @ dp))
    if denom == 0.0:
        return PredictionMetrics(mse, float("nan"), False)
    r = float(np.clip((dy @ dp) / denom, -1.0, 1.0))
    return PredictionMetrics(mse, r, True)
