"""K-fold cross-validation over lambda paths and shrinkage factors.

Curves carry both the minimum-error choice and the one-standard-error
choice.  Ties always go to the more regularized grid point: the larger
lambda, or the smaller shrinkage factor.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from shrinkreg.core import Dataset, fit_ols
from shrinkreg.equal_weights import augmented_dataset, equal_weights_spec
from shrinkreg.solver import PenaltySpec, default_lambda_grid, fit_path

#: shrinkage factors 0.00, 0.01, ..., 1.00
S_GRID = np.round(np.linspace(0.0, 1.0, 101), 2)

MODEL_KINDS = {
    "standard-lasso": "standard-lasso",
    "lasso": "standard-lasso",
    "equal-weights": "equal-weights",
    "equal": "equal-weights",
}


@dataclass(frozen=True)
class FoldAssignment:
    """Fold label (1..K) per observation."""

    fold_of: np.ndarray
    K: int
    seed: int

    @property
    def n(self) -> int:
        return self.fold_of.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.K + 1)[1:]

    def splits(self):
        """Yield ``(train_index, test_index)`` in fold order."""
        for k in range(1, self.K + 1):
            test = self.fold_of == k
            yield np.flatnonzero(~test), np.flatnonzero(test)


@dataclass(frozen=True)
class CvCurve:
    """Cross-validated error along a lambda grid or a shrinkage-factor grid.

    ``kind`` is ``"lambda"`` (larger is more regularized) or ``"s"``
    (smaller is more regularized).  ``fold_errors`` has one row per fold.
    """

    grid: np.ndarray
    mean_error: np.ndarray
    std_error: np.ndarray
    chosen_min: int
    chosen_1se: int
    kind: str
    fold_errors: np.ndarray

    @property
    def strength(self) -> np.ndarray:
        return self.grid if self.kind == "lambda" else -self.grid

    @property
    def min_error(self) -> float:
        return float(self.mean_error[self.chosen_min])

    @property
    def value_min(self) -> float:
        return float(self.grid[self.chosen_min])

    @property
    def value_1se(self) -> float:
        return float(self.grid[self.chosen_1se])


def kfold_split(n: int, K: int, seed: int) -> FoldAssignment:
    """Deal a seeded permutation of ``range(n)`` round-robin into ``K`` folds.

    The permutation comes from numpy's PCG64 generator seeded with ``seed``,
    which is stable across platforms.
    """
    if K < 2 or K > n:
        raise ValueError(f"need 2 <= K <= n, got K={K}, n={n}")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[perm] = np.arange(n) % K + 1
    return FoldAssignment(fold_of, K, int(seed))


def _most_regularized(candidates: np.ndarray, strength: np.ndarray) -> int:
    idx = np.flatnonzero(candidates)
    return int(idx[np.argmax(strength[idx])])


def _select_min(mean_error: np.ndarray, strength: np.ndarray) -> int:
    return _most_regularized(mean_error == mean_error.min(), strength)


def select_1se(curve: CvCurve) -> int:
    """Most regularized point within one standard error of the minimum."""
    k = curve.chosen_min
    bound = curve.mean_error[k] + curve.std_error[k]
    return _most_regularized(curve.mean_error <= bound, curve.strength)


def curve_from_fold_errors(grid, fold_errors, kind: str) -> CvCurve:
    """Reduce a (K, m) matrix of per-fold mean errors to a :class:`CvCurve`.

    The standard error is the sd of the K fold means over sqrt(K).
    """
    grid = np.asarray(grid, dtype=float)
    fold_errors = np.asarray(fold_errors, dtype=float)
    K = fold_errors.shape[0]
    mean = fold_errors.mean(axis=0)
    se = fold_errors.std(axis=0, ddof=1) / np.sqrt(K)
    strength = grid if kind == "lambda" else -grid
    k_min = _select_min(mean, strength)
    curve = CvCurve(grid, mean, se, k_min, k_min, kind, fold_errors)
    return CvCurve(grid, mean, se, k_min, select_1se(curve), kind, fold_errors)


def model_setup(data: Dataset, kind: str, alpha: float = 1.0,
                standardize: bool | None = None) -> tuple[Dataset, PenaltySpec]:
    """Design and penalty for a named model kind.

    Standard lasso standardizes by default; the equal-weights model does not,
    since its sum and deviation scores share the item scale.
    """
    try:
        kind = MODEL_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown model kind {kind!r}") from None
    if kind == "standard-lasso":
        std = True if standardize is None else standardize
        return data, PenaltySpec(alpha=alpha, standardize=std)
    std = False if standardize is None else standardize
    return augmented_dataset(data), equal_weights_spec(data.p, alpha, std)


def cross_validate_path(data: Dataset, kind: str, alpha: float, grid=None,
                        folds: FoldAssignment | None = None, standardize: bool | None = None,
                        threads: int = 1) -> CvCurve:
    """K-fold CV error along a lambda grid computed once on the full data."""
    if folds is None:
        raise ValueError("a fold assignment is required")
    if folds.n != data.n:
        raise ValueError(f"folds cover {folds.n} rows, data have {data.n}")
    design, spec = model_setup(data, kind, alpha, standardize)
    grid = default_lambda_grid(design, spec) if grid is None else np.asarray(grid, dtype=float)

    def one_fold(split):
        train, test = split
        path = fit_path(design.subset(train), spec, grid)
        pred = path.intercepts + design.predictors[test] @ path.coefficients.T
        return np.mean((design.response[test, None] - pred) ** 2, axis=0)

    splits = list(folds.splits())
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            errors = list(pool.map(one_fold, splits))
    else:
        errors = [one_fold(s) for s in splits]
    return curve_from_fold_errors(grid, np.vstack(errors), "lambda")


def cross_validate_shrinkage(data: Dataset, s_grid=S_GRID,
                             folds: FoldAssignment | None = None) -> CvCurve:
    """K-fold CV error of the shrunken simple regression for each ``s``.

    Per fold the training OLS slope ``b`` is shrunk to ``s * b`` with the
    intercept refit at the training means, the same rule as
    :func:`shrinkreg.shrinkage.apply_shrinkage`, vectorized over the grid.
    """
    if data.p != 1:
        raise ValueError(f"shrinkage CV needs a single predictor, got p={data.p}")
    if folds is None:
        raise ValueError("a fold assignment is required")
    s = np.asarray(s_grid, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise ValueError("shrinkage grid must lie in [0, 1]")
    x = data.predictors[:, 0]
    y = data.response
    errors = np.empty((folds.K, s.shape[0]))
    for k, (train, test) in enumerate(folds.splits()):
        ols = fit_ols(data.subset(train))
        b = ols.coefficients[0]
        dx = x[test] - x[train].mean()
        pred = y[train].mean() + np.outer(dx, s * b)
        errors[k] = np.mean((y[test, None] - pred) ** 2, axis=0)
    return curve_from_fold_errors(s, errors, "s")
