"""Side-by-side comparison of the standard lasso and equal-weights lasso."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from shrinkreg.core import Dataset, LinearFit, fit_ols
from shrinkreg.equal_weights import (
    SUM_LABEL,
    EqualWeightsFit,
    fit_equal_ols,
    implied_coefficients,
)
from shrinkreg.selection import (
    CvCurve,
    FoldAssignment,
    cross_validate_path,
    kfold_split,
    model_setup,
)
from shrinkreg.solver import CoefficientPath, default_lambda_grid, fit_path

TABLE_COLUMNS = (
    "term",
    "zero_ols", "zero_min", "zero_1se",
    "equal_ols", "equal_min", "equal_1se",
    "implied_ols", "implied_min", "implied_1se",
)


@dataclass(frozen=True)
class ModelRun:
    curve: CvCurve
    path: CoefficientPath

    @property
    def fit_min(self) -> LinearFit:
        return self.path.fit_at(self.curve.chosen_min)

    @property
    def fit_1se(self) -> LinearFit:
        return self.path.fit_at(self.curve.chosen_1se)


@dataclass(frozen=True)
class ComparisonReport:
    """CV results of both parametrizations on one shared fold assignment."""

    standard: ModelRun
    equal: ModelRun
    folds: FoldAssignment
    column_names: tuple[str, ...]
    ols: LinearFit
    equal_ols: EqualWeightsFit

    @property
    def min_mse(self) -> dict[str, float]:
        return {"standard-lasso": self.standard.curve.min_error,
                "equal-weights": self.equal.curve.min_error}

    def coefficient_table(self) -> list[tuple]:
        """Rows Intercept, Sum, predictors; NaN where a term does not exist."""
        eq = [self.equal_ols,
              EqualWeightsFit.from_linear(self.equal.fit_min),
              EqualWeightsFit.from_linear(self.equal.fit_1se)]
        zero = [self.ols, self.standard.fit_min, self.standard.fit_1se]
        implied = [implied_coefficients(f) for f in eq]
        rows = [("Intercept",
                 *(f.intercept for f in zero),
                 *(f.intercept for f in eq),
                 *(f.intercept for f in implied))]
        nan3 = (np.nan,) * 3
        rows.append((SUM_LABEL, *nan3, *(f.xi for f in eq), *nan3))
        for j, name in enumerate(self.column_names):
            rows.append((name,
                         *(f.coefficients[j] for f in zero),
                         *(f.gammas[j] for f in eq),
                         *(f.coefficients[j] for f in implied)))
        return rows


def _run(data: Dataset, kind: str, alpha: float, folds: FoldAssignment,
         n_lambda: int, threads: int) -> ModelRun:
    design, spec = model_setup(data, kind, alpha)
    grid = default_lambda_grid(design, spec, n_lambda)
    curve = cross_validate_path(data, kind, alpha, grid, folds, threads=threads)
    return ModelRun(curve, fit_path(design, spec, grid))


def compare_models(data: Dataset, alpha: float = 1.0, folds: int | FoldAssignment = 10,
                   seed: int = 0, n_lambda: int = 100, threads: int = 1) -> ComparisonReport:
    """Cross-validate both parametrizations on the same folds.

    ``folds`` may be a fold count (split with ``seed``) or a ready assignment.
    """
    if data.p < 2:
        raise ValueError("model comparison needs at least 2 predictors")
    if not isinstance(folds, FoldAssignment):
        folds = kfold_split(data.n, int(folds), seed)
    standard = _run(data, "standard-lasso", alpha, folds, n_lambda, threads)
    equal = _run(data, "equal-weights", alpha, folds, n_lambda, threads)
    return ComparisonReport(standard, equal, folds, data.column_names,
                            fit_ols(data), fit_equal_ols(data))
