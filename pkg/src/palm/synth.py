"""Synthetic learning curves and a brute-force grid-search fit.

Noise is drawn from ``numpy.random.default_rng(seed)`` (PCG64 bit generator,
``Generator.normal``) as one ``(replicates, n_iterations)`` block, so a given
seed reproduces the same curve on every platform numpy supports.
"""

from dataclasses import dataclass
import math

import numpy as np

from .curves import CurvePoint, LearningCurve
from .errors import GridTooLarge
from .model import PARAM_NAMES, PalmParams, palm_accuracy

__all__ = ["SynthSpec", "OracleResult", "generate", "oracle_fit", "DEFAULT_GRID_CAP"]

DEFAULT_GRID_CAP = 10**6


@dataclass(frozen=True)
class SynthSpec:
    params: PalmParams
    n_iterations: int
    noise_sigma: float = 0.0
    seed: int = 0
    replicates: int = 1

    def __post_init__(self):
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be at least 1")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0.0):
            raise ValueError("noise_sigma must be finite and nonnegative")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def generate(spec):
    """Curve sampled at budgets ``k * b`` for ``k = 1..n_iterations``.

    Replicates share the clean model values and differ only in their noise
    draws; noisy accuracies are clamped to [0, 100].  Replicate labels start
    at 1 and are omitted when there is a single replicate.
    """
    p = spec.params
    budgets = np.arange(1, spec.n_iterations + 1) * p.b
    clean = palm_accuracy(p, budgets)
    rng = np.random.default_rng(spec.seed)
    if spec.noise_sigma > 0.0:
        noise = rng.normal(0.0, spec.noise_sigma, size=(spec.replicates, spec.n_iterations))
    else:
        noise = np.zeros((spec.replicates, spec.n_iterations))
    values = np.clip(clean + noise, 0.0, 100.0)
    points = []
    for rep, row in enumerate(values, start=1):
        label = rep if spec.replicates > 1 else None
        points.extend(CurvePoint(x, y, label) for x, y in zip(budgets, row))
    return LearningCurve(tuple(points), b=p.b)


@dataclass(frozen=True)
class OracleResult:
    params: PalmParams
    sse: float
    evaluated: int


def oracle_fit(curve, grid, cap=DEFAULT_GRID_CAP, chunk=4096):
    """Exhaustive SSE minimization over the cartesian product of ``grid``.

    ``grid`` maps each of ``a_max``, ``delta``, ``alpha``, ``beta`` to a
    sequence of candidate values.  Combinations are visited in C order over
    that key order and the first minimizer wins.
    """
    axes = []
    for name in PARAM_NAMES:
        values = np.asarray(grid[name], dtype=float).ravel()
        if values.size == 0:
            raise ValueError(f"grid for {name} is empty")
        axes.append(values)
    total = math.prod(a.size for a in axes)
    if total > cap:
        raise GridTooLarge(f"{total} grid combinations exceed the cap of {cap}")

    x = curve.budgets / curve.b
    y = curve.accuracies
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
    best_sse = math.inf
    best_row = None
    for start in range(0, total, chunk):
        block = mesh[start : start + chunk]
        a_max, delta, alpha, beta = (block[:, i : i + 1] for i in range(4))
        shifted = x[None, :] + alpha
        if np.any(shifted < 0.0):
            raise ValueError("grid alpha makes B / b + alpha negative")
        exponent = np.power(shifted, beta)
        with np.errstate(divide="ignore", invalid="ignore"):
            logq = exponent * np.log1p(-delta)
        logq = np.where(exponent == 0.0, 0.0, logq)
        model = -a_max * np.expm1(logq)
        sse = np.sum((y[None, :] - model) ** 2, axis=1)
        i = int(np.argmin(sse))
        if sse[i] < best_sse:
            best_sse = float(sse[i])
            best_row = block[i]
    return OracleResult(PalmParams.from_array(best_row, b=curve.b), best_sse, total)
