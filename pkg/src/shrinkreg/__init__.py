"""Shrinkage regression toolkit for psychometric prediction problems.

Reduced-variance simple regression, lasso/elastic-net coordinate descent,
shrinkage toward equal regression weights, cross-validation with min/1-SE
selection, classical composite weighting schemes and a reliability
simulation built on classical test theory.
"""

from shrinkreg.core import (
    Dataset,
    LinearFit,
    PredictionMetrics,
    evaluate,
    fit_ols,
    predict,
)
from shrinkreg.shrinkage import (
    OptimalShrinkage,
    SlopeSamplingModel,
    apply_shrinkage,
    expected_squared_error,
    optimal_s_population,
    optimal_s_sampling,
)
from shrinkreg.solver import (
    CoefficientPath,
    ConvergenceError,
    KKTResult,
    PenaltySpec,
    default_lambda_grid,
    fit_path,
    fit_penalized,
    kkt_check,
    lambda_max,
    soft_threshold,
)
from shrinkreg.equal_weights import (
    EqualWeightsDesign,
    EqualWeightsFit,
    fit_equal_shrinkage,
    implied_coefficients,
    reparametrize,
)
from shrinkreg.comparison import ComparisonReport, compare_models
from shrinkreg.selection import (
    CvCurve,
    FoldAssignment,
    cross_validate_path,
    cross_validate_shrinkage,
    kfold_split,
    select_1se,
)
from shrinkreg.weighting import WeightScheme, evaluate_schemes, scheme_weights
from shrinkreg.simulation import (
    SimCellSummary,
    SimConfig,
    error_variance_from_reliability,
    generate_sample,
    run_experiment,
    run_replication,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientPath",
    "ComparisonReport",
    "ConvergenceError",
    "CvCurve",
    "Dataset",
    "EqualWeightsDesign",
    "EqualWeightsFit",
    "FoldAssignment",
    "KKTResult",
    "LinearFit",
    "OptimalShrinkage",
    "PenaltySpec",
    "PredictionMetrics",
    "SimCellSummary",
    "SimConfig",
    "SlopeSamplingModel",
    "WeightScheme",
    "apply_shrinkage",
    "compare_models",
    "cross_validate_path",
    "cross_validate_shrinkage",
    "default_lambda_grid",
    "error_variance_from_reliability",
    "evaluate",
    "evaluate_schemes",
    "expected_squared_error",
    "fit_equal_shrinkage",
    "fit_ols",
    "fit_path",
    "fit_penalized",
    "generate_sample",
    "implied_coefficients",
    "kfold_split",
    "kkt_check",
    "lambda_max",
    "optimal_s_population",
    "optimal_s_sampling",
    "predict",
    "reparametrize",
    "run_experiment",
    "run_replication",
    "scheme_weights",
    "select_1se",
    "soft_threshold",
]
