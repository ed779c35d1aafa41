"""Comparing fitted strategies and forecasting from partial curves."""

from dataclasses import dataclass, field
import math

import numpy as np

from .curves import prefix
from .errors import DegenerateModel, TooFewPoints
from .fitting import MIN_DISTINCT_BUDGETS, fit
from .model import _normalized, _slope, invert_budget, palm_accuracy, palm_slope

__all__ = [
    "ComparisonReport",
    "PredictionReport",
    "BudgetEstimate",
    "compare",
    "growth_criterion",
    "predict_from_prefix",
    "required_budget",
    "ACCURACY_TIE",
    "CROSSOVER_TOLERANCE",
    "BISECTION_STEPS",
]

ACCURACY_TIE = 1e-9
CROSSOVER_TOLERANCE = 1e-6
BISECTION_STEPS = 80
# relative tolerance when comparing two slopes
SLOPE_TIE = 1e-12

FIRST, SECOND, TIE = "first", "second", "tie"


def _verdict(diff, tol):
    if abs(diff) < tol:
        return TIE
    return FIRST if diff > 0 else SECOND


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of comparing two fitted models over a budget grid.

    ``parameter_breakdown`` says which model has the higher ``delta`` and
    ``beta``, the lower ``alpha`` and ``b`` and the higher ``a_max``.  It is
    descriptive; the verdicts in ``winner_at`` come from evaluating both
    curves.
    """

    winner_at: dict
    crossovers: tuple
    asymptotic_winner: str
    slope_winner_at: dict
    parameter_breakdown: dict

    def to_dict(self):
        return {
            "winner_at": {repr(b): w for b, w in self.winner_at.items()},
            "crossovers": list(self.crossovers),
            "asymptotic_winner": self.asymptotic_winner,
            "slope_winner_at": {repr(b): w for b, w in self.slope_winner_at.items()},
            "parameter_breakdown": dict(self.parameter_breakdown),
        }


def _ceiling(params):
    return params.a_max if params.delta > 0.0 else 0.0


def _slope_verdict(s1, s2):
    if s1 == s2:
        return TIE
    if math.isinf(s1) or math.isinf(s2):
        return FIRST if s1 > s2 else SECOND
    scale = max(abs(s1), abs(s2))
    return _verdict(s1 - s2, SLOPE_TIE * scale) if scale > 0 else TIE


def _breakdown(first, second):
    def higher(a, b):
        return _verdict(a - b, 0.0) if a != b else TIE

    return {
        "a_max": higher(first.a_max, second.a_max),
        "delta": higher(first.delta, second.delta),
        "alpha": higher(second.alpha, first.alpha),
        "beta": higher(first.beta, second.beta),
        "b": higher(second.b, first.b),
    }


def _bisect(first, second, lo, hi, sign_lo):
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        d = palm_accuracy(first, mid) - palm_accuracy(second, mid)
        if np.sign(d) == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def compare(first, second, budgets):
    """Compare two models at each budget and locate where the lead changes.

    Crossovers are searched only between consecutive grid budgets whose
    verdicts point in opposite directions (ties in between are skipped over).
    """
    budgets = np.asarray(budgets, dtype=float)
    if budgets.ndim != 1 or budgets.size == 0:
        raise ValueError("budgets must be a nonempty 1-d sequence")
    if np.any(np.diff(budgets) <= 0):
        raise ValueError("budgets must be strictly ascending")
    a1 = palm_accuracy(first, budgets)
    a2 = palm_accuracy(second, budgets)
    diff = a1 - a2
    verdicts = [_verdict(d, ACCURACY_TIE) for d in diff]

    crossovers = []
    last = None
    for i, v in enumerate(verdicts):
        if v == TIE:
            continue
        if last is not None and verdicts[last] != v:
            crossovers.append(
                float(_bisect(first, second, budgets[last], budgets[i], np.sign(diff[last])))
            )
        last = i

    x1, _ = _normalized(first, budgets)
    x2, _ = _normalized(second, budgets)
    s1 = _slope(first, x1)
    s2 = _slope(second, x2)
    slope_verdicts = [_slope_verdict(a, b) for a, b in zip(s1, s2)]

    return ComparisonReport(
        winner_at=dict(zip(budgets.tolist(), verdicts)),
        crossovers=tuple(crossovers),
        asymptotic_winner=_verdict(_ceiling(first) - _ceiling(second), ACCURACY_TIE),
        slope_winner_at=dict(zip(budgets.tolist(), slope_verdicts)),
        parameter_breakdown=_breakdown(first, second),
    )


def growth_criterion(first, second, budget):
    """Which model's accuracy is rising faster at ``budget``.

    Uses the exact derivative of both curves.
    """
    return _slope_verdict(palm_slope(first, budget), palm_slope(second, budget))


@dataclass(frozen=True)
class PredictionReport:
    """Forecast of held-out observations from a fit on a curve prefix.

    ``holdout_errors`` are predicted minus observed accuracy.
    """

    prefix_size: int
    fitted: object
    predictions: tuple
    holdout_errors: np.ndarray = field(repr=False)
    mae: float = 0.0
    rmse: float = 0.0
    max_abs_err: float = 0.0


def predict_from_prefix(curve, prefix_size, config=None):
    """Fit on the first ``prefix_size`` budgets and score the remainder."""
    n_budgets = len(curve.distinct_budgets)
    if prefix_size < MIN_DISTINCT_BUDGETS:
        raise TooFewPoints(
            f"prediction needs a prefix of at least {MIN_DISTINCT_BUDGETS} budgets"
        )
    if prefix_size >= n_budgets:
        raise ValueError(
            f"prefix of {prefix_size} leaves no held-out budgets out of {n_budgets}"
        )
    head = prefix(curve, prefix_size)
    result = fit(head, config)
    cutoff = head.distinct_budgets[-1]
    held = [p for p in curve.points if p.budget > cutoff]
    budgets = np.array([p.budget for p in held])
    predicted = palm_accuracy(result.params, budgets)
    errors = predicted - np.array([p.accuracy for p in held])
    abs_err = np.abs(errors)
    return PredictionReport(
        prefix_size=prefix_size,
        fitted=result,
        predictions=tuple(zip(budgets.tolist(), predicted.tolist())),
        holdout_errors=errors,
        mae=float(abs_err.mean()),
        rmse=float(math.sqrt(np.mean(errors**2))),
        max_abs_err=float(abs_err.max()),
    )


@dataclass(frozen=True)
class BudgetEstimate:
    target: float
    samples: float
    iterations: float


def required_budget(fit_result, target):
    """Labeled samples (and rounds of size ``b``) needed to reach ``target``."""
    if getattr(fit_result, "degenerate", False):
        raise DegenerateModel("cannot plan a budget from a degenerate fit")
    params = getattr(fit_result, "params", fit_result)
    samples = invert_budget(params, target)
    return BudgetEstimate(float(target), samples, samples / params.b)
