"""Closed-form coverage and accuracy curves.

The accuracy model is

    A(B) = a_max * (1 - (1 - delta) ** ((B / b + alpha) ** beta))

where ``B`` is the cumulative number of labeled samples and ``b`` the mean
number of samples labeled per round.  Everything here is a pure function of
its arguments; budgets may be scalars or numpy arrays and scalars come back
as ``float``.

Numerically the survival term ``(1 - delta) ** s`` is evaluated as
``exp(s * log1p(-delta))`` and ``1 - exp(.)`` as ``-expm1(.)`` so that small
coverage fractions do not cancel.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from .errors import DegenerateModel, DomainError, TargetUnreachable

__all__ = [
    "PalmParams",
    "TwoRegionParams",
    "coverage_probability",
    "uncovered_probability",
    "expected_coverage",
    "two_region_accuracy",
    "palm_accuracy",
    "generalized_accuracy",
    "palm_accuracy_small_delta",
    "palm_slope",
    "palm_param_gradient",
    "invert_budget",
    "PARAM_NAMES",
]

PARAM_NAMES = ("a_max", "delta", "alpha", "beta")


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PalmParams:
    """Fitted curve parameters plus the per-round budget ``b``.

    ``alpha`` is only required to be finite here; evaluation checks that
    ``B / b + alpha`` is nonnegative for the budgets actually requested.
    ``a_max`` may be 0 so that a constant all-zero curve has a representation.
    """

    a_max: float
    delta: float
    alpha: float
    beta: float
    b: float = 1.0

    def __post_init__(self):
        for name in ("a_max", "delta", "alpha", "beta", "b"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if not 0.0 <= self.a_max <= 100.0:
            raise DomainError(f"a_max must lie in [0, 100], got {self.a_max!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta!r}")
        if self.beta <= 0.0:
            raise DomainError(f"beta must be positive, got {self.beta!r}")
        if self.b <= 0.0:
            raise DomainError(f"b must be positive, got {self.b!r}")

    def as_array(self):
        """The four fitted parameters in ``PARAM_NAMES`` order."""
        return np.array([self.a_max, self.delta, self.alpha, self.beta])

    @classmethod
    def from_array(cls, values, b=1.0):
        a_max, delta, alpha, beta = (float(v) for v in values)
        return cls(a_max, delta, alpha, beta, b)

    def with_b(self, b):
        return replace(self, b=b)


@dataclass(frozen=True)
class TwoRegionParams:
    a_covered: float
    a_uncovered: float
    delta: float

    def __post_init__(self):
        for name in ("a_covered", "a_uncovered", "delta"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        for name in ("a_covered", "a_uncovered"):
            if not 0.0 <= getattr(self, name) <= 100.0:
                raise DomainError(f"{name} must lie in [0, 100]")
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta!r}")


def _array(value, name):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _out(arr, scalar):
    return float(arr) if scalar else arr


def _log_survival(delta):
    # log(1 - delta); -inf at delta == 1
    with np.errstate(divide="ignore"):
        return np.log1p(-np.asarray(delta, dtype=float))


def _survival(count, log_q):
    """(1 - p) ** count from log(1 - p), with the convention 0 ** 0 == 1."""
    with np.errstate(invalid="ignore"):
        y = count * log_q
    return np.where(count == 0, 0.0, y)


def uncovered_probability(p, s):
    """Probability that none of ``s`` independent objects covers a point."""
    p_arr, s_arr, scalar = _coverage_args(p, s)
    return _out(np.exp(_survival(s_arr, _log_survival(p_arr))), scalar)


def coverage_probability(p, s):
    """Probability ``1 - (1 - p) ** s`` that at least one of ``s`` objects covers a point.

    ``s`` may be fractional.
    """
    p_arr, s_arr, scalar = _coverage_args(p, s)
    return _out(-np.expm1(_survival(s_arr, _log_survival(p_arr))), scalar)


def _coverage_args(p, s):
    scalar = np.ndim(p) == 0 and np.ndim(s) == 0
    p_arr = _array(p, "p")
    s_arr = _array(s, "s")
    if np.any((p_arr < 0.0) | (p_arr > 1.0)):
        raise DomainError("coverage probability must lie in [0, 1]")
    if np.any(s_arr < 0.0):
        raise DomainError("object count must be nonnegative")
    return p_arr, s_arr, scalar


def expected_coverage(delta, budget):
    """Expected covered fraction of the space after ``budget`` samples."""
    return coverage_probability(delta, budget)


def two_region_accuracy(params, budget):
    """Accuracy mixing covered-region and uncovered-region performance."""
    pc = expected_coverage(params.delta, budget)
    lo = min(params.a_covered, params.a_uncovered)
    hi = max(params.a_covered, params.a_uncovered)
    acc = params.a_uncovered + (params.a_covered - params.a_uncovered) * np.asarray(pc)
    return _out(np.clip(acc, lo, hi), np.ndim(pc) == 0)


def _normalized(params, budget):
    scalar = np.ndim(budget) == 0
    x = _array(budget, "budget") / params.b + params.alpha
    if np.any(x < 0.0):
        raise DomainError("budget / b + alpha must be nonnegative")
    return x, scalar


def _exponent(x, beta):
    # 0 ** beta == 0 for beta > 0
    return np.power(x, beta)


def palm_accuracy(params, budget):
    """Accuracy in percent after ``budget`` cumulative labeled samples."""
    x, scalar = _normalized(params, budget)
    e = _exponent(x, params.beta)
    acc = -params.a_max * np.expm1(_survival(e, _log_survival(params.delta)))
    return _out(acc, scalar)


def generalized_accuracy(params, budget):
    """Un-normalized form: ``palm_accuracy`` with ``b`` forced to 1."""
    return palm_accuracy(params.with_b(1.0), budget)


def palm_accuracy_small_delta(params, budget):
    """Exponential approximation ``a_max * (1 - exp(-delta * (B/b + alpha) ** beta))``."""
    x, scalar = _normalized(params, budget)
    e = _exponent(x, params.beta)
    return _out(-params.a_max * np.expm1(-params.delta * e), scalar)


def _slope(params, x):
    # dA/dB; +inf at x == 0 when beta < 1
    e = _exponent(x, params.beta)
    log_q = float(_log_survival(params.delta))
    if params.delta in (0.0, 1.0) or params.a_max == 0.0:
        return np.zeros_like(x)
    with np.errstate(divide="ignore"):
        dx = params.beta * np.power(x, params.beta - 1.0)
    return params.a_max * (-log_q) * dx / params.b * np.exp(e * log_q)


def palm_slope(params, budget):
    """Derivative of accuracy with respect to the cumulative budget.

    Raises ``DomainError`` at ``B / b + alpha == 0`` when ``beta < 1``, where
    the derivative is unbounded.
    """
    x, scalar = _normalized(params, budget)
    if params.beta < 1.0 and np.any(x == 0.0):
        raise DomainError("slope is unbounded at B / b + alpha == 0 for beta < 1")
    return _out(_slope(params, x), scalar)


def palm_param_gradient(params, budget):
    """Partial derivatives of accuracy over (a_max, delta, alpha, beta).

    The last axis of the result has length 4 in ``PARAM_NAMES`` order.
    Requires ``B / b + alpha > 0`` and ``delta < 1``.
    """
    x, scalar = _normalized(params, budget)
    if np.any(x == 0.0):
        raise DomainError("parameter gradient requires B / b + alpha > 0")
    if params.delta >= 1.0:
        raise DomainError("parameter gradient requires delta < 1")
    a, d, beta = params.a_max, params.delta, params.beta
    log_q = math.log1p(-d)
    log_x = np.log(x)
    e = np.exp(beta * log_x)
    survive = np.exp(e * log_q)
    # dA/d(exponent)
    d_exp = -a * log_q * survive
    grad = np.stack(
        [
            -np.expm1(e * log_q),
            a * e * survive / (1.0 - d),
            d_exp * beta * e / x,
            d_exp * e * log_x,
        ],
        axis=-1,
    )
    return grad if not scalar else grad.reshape(4)


def invert_budget(params, target):
    """Cumulative budget at which the model first reaches ``target`` percent.

    Clamped below at 0 when the curve already exceeds ``target`` at B = 0.
    """
    target = _finite("target", target)
    if target < 0.0:
        raise DomainError(f"target must be nonnegative, got {target!r}")
    if target >= params.a_max:
        raise TargetUnreachable(target, params.a_max)
    if params.delta <= 0.0 or params.delta >= 1.0:
        raise DegenerateModel(f"cannot invert with delta={params.delta!r}")
    needed = math.log1p(-target / params.a_max) / math.log1p(-params.delta)
    x = needed ** (1.0 / params.beta)
    return max(0.0, params.b * (x - params.alpha))
