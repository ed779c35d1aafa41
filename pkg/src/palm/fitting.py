"""Bounded multi-start Levenberg-Marquardt fitting of the accuracy model.

Each parameter is mapped onto its closed interval ``[lo, hi]`` through a
logistic bijection ``theta = lo + (hi - lo) * sigmoid(u)`` so that the
optimizer itself works unconstrained in ``u``.  The Jacobian is the analytic
parameter gradient chained through the transform.  Parameters whose interval
collapses to a point (``a_max`` when the data already touch 100) are held
fixed.

Every start runs independently; the winner is the converged run with the
smallest SSE, ties going to the lowest start index, which keeps parallel and
sequential execution identical.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .curves import prefix
from .errors import DomainError, NoConvergedStart, PalmError, TooFewPoints
from .model import PARAM_NAMES, PalmParams, palm_accuracy

__all__ = [
    "FitConfig",
    "FitResult",
    "StartReport",
    "residuals",
    "fit",
    "fit_prefix_series",
    "MIN_DISTINCT_BUDGETS",
]

MIN_DISTINCT_BUDGETS = 4

DEFAULT_DELTA_STARTS = (0.01, 0.1, 0.3, 0.6)
DEFAULT_ALPHA_STARTS = (0.0, 1.0, 5.0)
DEFAULT_BETA_STARTS = (0.5, 1.0, 2.0)

# starts are pulled this fraction of the interval width away from each bound
_START_MARGIN = 1e-3
# logistic coordinates are confined to this range so sigmoid never hits 0 or 1
_U_LIMIT = 500.0
# finite-difference probe length and largest acceleration/velocity ratio
_PROBE = 0.1
_ACCEL_RATIO = 0.75


@dataclass(frozen=True)
class FitConfig:
    """Bounds, start points and stopping rules for ``fit``.

    The ``a_max`` interval is ``[max observed accuracy, a_max_ceiling]`` and
    so depends on the curve; the other intervals are fixed here.  ``starts``
    holds ``(a_max, delta, alpha, beta)`` rows; ``None`` selects the default
    grid of 36 starts.  Start points are clipped just inside the bounds.
    """

    a_max_ceiling: float = 100.0
    delta_bounds: tuple = (1e-9, 1.0 - 1e-9)
    alpha_floor: float = 0.0
    alpha_cap: float = 100.0
    beta_floor: float = 1e-3
    beta_cap: float = 8.0
    starts: tuple | None = None
    max_iterations: int = 200
    gradient_tolerance: float = 1e-8
    step_tolerance: float = 1e-10
    residual_tolerance: float = 1e-12
    boundary_tolerance: float = 1e-4
    workers: int | None = None

    def __post_init__(self):
        lo, hi = self.delta_bounds
        if not 0.0 < lo < hi < 1.0:
            raise ValueError("delta bounds must satisfy 0 < lo < hi < 1")
        if not self.alpha_floor < self.alpha_cap:
            raise ValueError("alpha bounds are empty")
        if not 0.0 < self.beta_floor < self.beta_cap:
            raise ValueError("beta bounds must satisfy 0 < lo < hi")
        if not 0.0 < self.a_max_ceiling <= 100.0:
            raise ValueError("a_max ceiling must lie in (0, 100]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.starts is not None:
            starts = np.asarray(self.starts, dtype=float)
            if starts.ndim != 2 or starts.shape[1] != 4 or len(starts) == 0:
                raise ValueError("starts must be a nonempty sequence of 4-tuples")

    def bounds(self, curve):
        """(4, 2) array of closed intervals for ``curve``."""
        top = float(curve.accuracies.max())
        if top > self.a_max_ceiling:
            raise ValueError("observed accuracy exceeds the a_max ceiling")
        return np.array(
            [
                [top, self.a_max_ceiling],
                list(self.delta_bounds),
                [self.alpha_floor, self.alpha_cap],
                [self.beta_floor, self.beta_cap],
            ]
        )

    def initial_points(self, curve):
        """Start rows for ``curve``, clipped inside the bounds."""
        if self.starts is not None:
            starts = np.array(self.starts, dtype=float)
        else:
            a0 = min(self.a_max_ceiling, 1.05 * float(curve.accuracies.max()))
            grid = itertools.product(
                DEFAULT_DELTA_STARTS, DEFAULT_ALPHA_STARTS, DEFAULT_BETA_STARTS
            )
            starts = np.array([(a0, d, a, b) for d, a, b in grid])
        bounds = self.bounds(curve)
        width = bounds[:, 1] - bounds[:, 0]
        lo = bounds[:, 0] + _START_MARGIN * width
        hi = bounds[:, 1] - _START_MARGIN * width
        return np.clip(starts, lo, hi)


@dataclass(frozen=True)
class StartReport:
    index: int
    reason: str
    converged: bool
    sse: float
    iterations: int


@dataclass(frozen=True)
class FitResult:
    params: PalmParams
    sse: float
    rmse: float
    iterations: int
    converged: bool
    boundary_flags: frozenset
    start_index: int
    degenerate: bool = False
    termination: str = ""
    trace: tuple = ()
    start_reports: tuple = field(default=(), repr=False)


def residuals(params, curve):
    """Observed minus modeled accuracy, in curve order."""
    return curve.accuracies - palm_accuracy(params, curve.budgets)


class _Transform:
    """Logistic map between free coordinates ``u`` and bounded parameters."""

    def __init__(self, bounds):
        self.lo = bounds[:, 0]
        self.hi = bounds[:, 1]
        self.width = self.hi - self.lo
        self.free = self.width > 0.0

    def to_params(self, u):
        theta = self.lo.copy()
        s = 1.0 / (1.0 + np.exp(-u))
        theta[self.free] = self.lo[self.free] + self.width[self.free] * s
        return np.clip(theta, self.lo, self.hi)

    def derivative(self, u):
        s = 1.0 / (1.0 + np.exp(-u))
        return self.width[self.free] * s * (1.0 - s)

    def to_free(self, theta):
        frac = (theta[self.free] - self.lo[self.free]) / self.width[self.free]
        return np.log(frac) - np.log1p(-frac)


class _Problem:
    """Residuals and their Jacobian in free coordinates.

    Evaluates the model directly on arrays so the inner loop skips the
    validation done by ``PalmParams``; the transform already keeps every
    parameter inside its bounds.
    """

    def __init__(self, curve, transform):
        self.budgets = curve.budgets
        self.observed = curve.accuracies
        self.b = curve.b
        self.scaled = self.budgets / self.b
        self.transform = transform

    def params(self, u):
        return PalmParams.from_array(self.transform.to_params(u), b=self.b)

    def residual(self, u):
        a_max, delta, alpha, beta = self.transform.to_params(u)
        e = np.power(self.scaled + alpha, beta)
        r = self.observed + a_max * np.expm1(e * math.log1p(-delta))
        if not np.all(np.isfinite(r)):
            raise FloatingPointError("nonfinite residual")
        return r

    def jacobian(self, u):
        """Jacobian of the residual vector with respect to ``u``."""
        a_max, delta, alpha, beta = self.transform.to_params(u)
        x = self.scaled + alpha
        if np.any(x <= 0.0):
            raise DomainError("parameter gradient requires B / b + alpha > 0")
        log_q = math.log1p(-delta)
        log_x = np.log(x)
        e = np.exp(beta * log_x)
        survive = np.exp(e * log_q)
        d_exp = -a_max * log_q * survive
        grad = np.column_stack(
            (
                -np.expm1(e * log_q),
                a_max * e * survive / (1.0 - delta),
                d_exp * beta * e / x,
                d_exp * e * log_x,
            )
        )
        return -grad[:, self.transform.free] * self.transform.derivative(u)


def _levenberg_marquardt(problem, u0, config):
    """Damped Gauss-Newton with geodesic acceleration and Marquardt scaling.

    Each trial step is the damped Gauss-Newton velocity ``v`` plus half a
    second-order correction estimated from one extra residual evaluation
    along ``v``.  When the correction is large relative to ``v`` the step is
    treated as rejected, which keeps the iterate out of the flat corners of
    the logistic map.  Damping follows Nielsen's update.

    Returns ``(u, sse, iterations, reason, converged, trace)`` where ``trace``
    lists the SSE after every accepted step, starting with the initial SSE.
    """
    u = np.clip(u0, -_U_LIMIT, _U_LIMIT)
    r = problem.residual(u)
    sse = float(r @ r)
    trace = [sse]
    if u.size == 0:
        return u, sse, 0, "no free parameters", True, tuple(trace)
    jac = problem.jacobian(u)
    mu = 1e-3
    nu = 2.0
    reason = "iteration limit"
    converged = False
    it = 0
    while it < config.max_iterations:
        it += 1
        grad = jac.T @ r
        if np.max(np.abs(grad)) <= config.gradient_tolerance:
            reason, converged = "gradient", True
            break
        if sse <= config.residual_tolerance:
            reason, converged = "residual", True
            break
        norms = np.sqrt(np.sum(jac * jac, axis=0))
        scale = np.maximum(norms, 1e-12 * max(norms.max(), 1e-300))
        q, rr = np.linalg.qr(np.vstack([jac, np.diag(np.sqrt(mu) * scale)]))
        q = q[: r.size]
        velocity = np.linalg.solve(rr, -(q.T @ r))
        v_norm = np.linalg.norm(velocity)
        if v_norm <= config.step_tolerance * (np.linalg.norm(u) + config.step_tolerance):
            reason, converged = "step", True
            break
        predicted = actual = -1.0
        try:
            probe = problem.residual(np.clip(u + _PROBE * velocity, -_U_LIMIT, _U_LIMIT))
            curvature = 2.0 / _PROBE * ((probe - r) / _PROBE - jac @ velocity)
            accel = np.linalg.solve(rr, -(q.T @ curvature))
            if 2.0 * np.linalg.norm(accel) <= _ACCEL_RATIO * v_norm:
                u_new = np.clip(u + velocity + 0.5 * accel, -_U_LIMIT, _U_LIMIT)
                r_new = problem.residual(u_new)
                sse_new = float(r_new @ r_new)
                lin = r + jac @ velocity
                predicted = sse - float(lin @ lin)
                actual = sse - sse_new
        except (PalmError, FloatingPointError):
            pass
        if predicted > 0.0 and actual > 0.0:
            u, r, sse = u_new, r_new, sse_new
            trace.append(sse)
            jac = problem.jacobian(u)
            rho = min(actual / predicted, 1.0)
            mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
            tol = config.residual_tolerance
            if actual <= tol * (sse + actual) and predicted <= tol * (sse + actual):
                reason, converged = "residual", True
                break
        else:
            mu *= nu
            nu *= 2.0
            if mu > 1e32:
                reason = "damping overflow"
                break
    return u, sse, it, reason, converged, tuple(trace)


def _boundary_flags(theta, bounds, tol):
    flags = set()
    for name, value, (lo, hi) in zip(PARAM_NAMES, theta, bounds):
        width = hi - lo
        if value - lo <= tol * width or hi - value <= tol * width:
            flags.add(name)
    return frozenset(flags)


def _check_size(curve):
    n = len(curve.distinct_budgets)
    if n < MIN_DISTINCT_BUDGETS:
        raise TooFewPoints(
            f"fitting needs at least {MIN_DISTINCT_BUDGETS} distinct budgets, got {n}"
        )


def _degenerate_fit(curve, config, bounds):
    level = float(curve.accuracies[0])
    theta = np.array([level, config.delta_bounds[1], config.alpha_cap, 1.0])
    params = PalmParams.from_array(theta, b=curve.b)
    r = residuals(params, curve)
    sse = float(r @ r)
    return FitResult(
        params=params,
        sse=sse,
        rmse=math.sqrt(sse / len(curve)),
        iterations=0,
        converged=True,
        boundary_flags=_boundary_flags(theta, bounds, config.boundary_tolerance),
        start_index=-1,
        degenerate=True,
        termination="constant curve",
    )


def fit(curve, config=None):
    """Fit the accuracy model to ``curve`` by bounded least squares.

    Raises ``TooFewPoints`` below four distinct budgets and
    ``NoConvergedStart`` if no start meets a stopping criterion.  A constant
    curve short-circuits to a flagged degenerate result.
    """
    config = config or FitConfig()
    _check_size(curve)
    bounds = config.bounds(curve)
    if np.ptp(curve.accuracies) == 0.0:
        return _degenerate_fit(curve, config, bounds)

    transform = _Transform(bounds)
    problem = _Problem(curve, transform)
    starts = config.initial_points(curve)

    def run(start):
        return _levenberg_marquardt(problem, transform.to_free(start), config)

    if config.workers and config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(s) for s in starts]

    reports = tuple(
        StartReport(i, reason, ok, sse, its)
        for i, (_, sse, its, reason, ok, _) in enumerate(runs)
    )
    candidates = [(sse, i) for i, (_, sse, _, _, ok, _) in enumerate(runs) if ok]
    if not candidates:
        raise NoConvergedStart((rep.index, rep.reason) for rep in reports)
    _, best = min(candidates)
    u, sse, its, reason, ok, trace = runs[best]
    theta = transform.to_params(u)
    return FitResult(
        params=PalmParams.from_array(theta, b=curve.b),
        sse=sse,
        rmse=math.sqrt(sse / len(curve)),
        iterations=its,
        converged=ok,
        boundary_flags=_boundary_flags(theta, bounds, config.boundary_tolerance),
        start_index=best,
        termination=reason,
        trace=trace,
        start_reports=reports,
    )


def fit_prefix_series(curve, prefix_sizes, config=None):
    """Fit every requested prefix; failures are returned in place, not raised."""
    results = []
    for n in prefix_sizes:
        try:
            if n < MIN_DISTINCT_BUDGETS:
                raise TooFewPoints(
                    f"fitting needs at least {MIN_DISTINCT_BUDGETS} distinct budgets, got {n}"
                )
            results.append(fit(prefix(curve, n), config))
        except PalmError as exc:
            results.append(exc)
    return results
