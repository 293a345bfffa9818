"""Classical composite weighting schemes.

Each scheme turns the predictor columns into one composite score.  The
composite is calibrated by a simple regression on the training data before
it is scored out of sample, so all schemes are compared on the same footing.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from shrinkreg.core import Dataset, PredictionMetrics, evaluate, fit_ols, predict


class WeightScheme(str, Enum):
    UNIT = "unit"
    SD = "sd"
    INVERSE_SD = "inverse_sd"
    LEAST_SQUARES = "least_squares"


def scheme_weights(data: Dataset, kind: WeightScheme | str) -> np.ndarray:
    kind = WeightScheme(kind)
    if kind is WeightScheme.UNIT:
        return np.ones(data.p)
    if kind is WeightScheme.LEAST_SQUARES:
        return np.array(fit_ols(data).coefficients)
    sd = data.predictors.std(axis=0, ddof=1)
    if np.any(sd == 0) or data.n < 2:
        raise ValueError(f"{kind.value} weights need every column to vary")
    return sd if kind is WeightScheme.SD else 1.0 / sd


def evaluate_schemes(train: Dataset, test: Dataset) -> dict[WeightScheme, PredictionMetrics]:
    """Out-of-sample metrics of each calibrated composite, in enum order."""
    if train.p != test.p:
        raise ValueError(f"train has {train.p} columns, test has {test.p}")
    out = {}
    for kind in WeightScheme:
        w = scheme_weights(train, kind)
        calib = fit_ols(Dataset(train.predictors @ w, train.response))
        out[kind] = evaluate(test.response, predict(calib, test.predictors @ w))
    return out
