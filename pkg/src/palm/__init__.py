"""Parametric model of active-learning accuracy curves.

Fit ``A(B) = a_max * (1 - (1 - delta) ** ((B / b + alpha) ** beta))`` to
observed (budget, accuracy) curves, extrapolate from short prefixes, compare
strategies and solve for the budget that reaches a target accuracy.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateModel,
    DomainError,
    GridMismatch,
    GridTooLarge,
    NoConvergedStart,
    PalmError,
    ParseError,
    RangeError,
    TargetUnreachable,
    TooFewPoints,
    ValidationError,
)
from .model import (
    PalmParams,
    TwoRegionParams,
    coverage_probability,
    expected_coverage,
    generalized_accuracy,
    invert_budget,
    palm_accuracy,
    palm_accuracy_small_delta,
    palm_param_gradient,
    palm_slope,
    two_region_accuracy,
    uncovered_probability,
)
from .curves import (
    CurvePoint,
    LearningCurve,
    aggregate_replicates,
    dump_curve,
    load_curve,
    prefix,
)
from .fitting import FitConfig, FitResult, fit, fit_prefix_series, residuals
from .analysis import (
    BudgetEstimate,
    ComparisonReport,
    PredictionReport,
    compare,
    growth_criterion,
    predict_from_prefix,
    required_budget,
)
from .synth import OracleResult, SynthSpec, generate, oracle_fit
