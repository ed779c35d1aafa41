"""Learning curves: ingest, validation, replicate aggregation and prefixes.

Canonical CSV layout (UTF-8, ``.`` as decimal point)::

    budget,accuracy[,rep]
    20.0,25.0[,1]

Lines whose first non-blank character is ``#`` are skipped.  Accuracy is in
percent; fraction-valued files can be rescaled on ingest.
"""

from collections import OrderedDict
from dataclasses import dataclass, field, replace
import csv
import io
import math
import os
import warnings

import numpy as np

from .errors import GridMismatch, ParseError, RangeError, ValidationError

__all__ = [
    "CurvePoint",
    "LearningCurve",
    "load_curve",
    "dump_curve",
    "aggregate_replicates",
    "prefix",
]

_STATS = {"mean": np.mean, "min": np.min, "max": np.max}


@dataclass(frozen=True)
class CurvePoint:
    budget: float
    accuracy: float
    replicate: int | None = None

    def __post_init__(self):
        budget = float(self.budget)
        accuracy = float(self.accuracy)
        if not math.isfinite(budget) or budget < 0.0:
            raise ValidationError(f"budget must be finite and >= 0, got {budget!r}")
        if not math.isfinite(accuracy) or not 0.0 <= accuracy <= 100.0:
            raise ValidationError(f"accuracy must lie in [0, 100], got {accuracy!r}")
        object.__setattr__(self, "budget", budget)
        object.__setattr__(self, "accuracy", accuracy)
        if self.replicate is not None:
            object.__setattr__(self, "replicate", int(self.replicate))


def _sort_key(point):
    return (point.budget, -1 if point.replicate is None else point.replicate)


def _infer_b(points):
    first = points[0].replicate
    budgets = sorted(p.budget for p in points if p.replicate == first)
    if len(budgets) == 1:
        return budgets[0]
    return (budgets[-1] - budgets[0]) / (len(budgets) - 1)


@dataclass(frozen=True)
class LearningCurve:
    """Immutable, budget-sorted sequence of observations.

    When ``b`` is omitted it is the mean gap between consecutive budgets of
    the first replicate (for a single observation, the budget itself).
    """

    points: tuple
    b: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        points = tuple(sorted(self.points, key=_sort_key))
        if not points:
            raise ValidationError("a learning curve needs at least one point")
        seen = set()
        for p in points:
            key = (p.replicate, p.budget)
            if key in seen:
                rep = "" if p.replicate is None else f" in replicate {p.replicate}"
                raise ValidationError(f"duplicate budget {p.budget!r}{rep}")
            seen.add(key)
        b = _infer_b(points) if self.b is None else float(self.b)
        if not math.isfinite(b) or b <= 0.0:
            raise ValidationError(f"b must be positive, got {b!r}; pass it explicitly")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "meta", dict(self.meta))

    @classmethod
    def from_arrays(cls, budgets, accuracies, replicates=None, b=None, meta=None):
        if replicates is None:
            replicates = [None] * len(budgets)
        points = [CurvePoint(x, y, r) for x, y, r in zip(budgets, accuracies, replicates)]
        return cls(tuple(points), b=b, meta=meta or {})

    def __len__(self):
        return len(self.points)

    @property
    def budgets(self):
        return np.array([p.budget for p in self.points])

    @property
    def accuracies(self):
        return np.array([p.accuracy for p in self.points])

    @property
    def replicates(self):
        return [p.replicate for p in self.points]

    @property
    def replicate_labels(self):
        return list(OrderedDict.fromkeys(p.replicate for p in self.points))

    @property
    def distinct_budgets(self):
        return np.unique(self.budgets)

    def replicate_curve(self, label):
        pts = tuple(p for p in self.points if p.replicate == label)
        if not pts:
            raise KeyError(label)
        return replace(self, points=pts)


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return fh.read()
    return source.read()


def load_curve(source, b=None, fraction=False, meta=None):
    """Read a curve from a path or text stream.

    ``fraction=True`` multiplies accuracies by 100.  Without it, a file whose
    accuracies all lie in [0, 1] raises a ``UserWarning``.
    """
    text = _open_text(source)
    rows = []
    header = None
    for lineno, line in enumerate(io.StringIO(text, newline=""), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([stripped]))]
        if header is None:
            header = cells
            missing = {"budget", "accuracy"} - set(header)
            if missing:
                raise ParseError(f"header lacks column(s) {sorted(missing)}", lineno)
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", lineno)
        rows.append((lineno, dict(zip(header, cells))))
    if header is None:
        raise ParseError("no header row")

    scale = 100.0 if fraction else 1.0
    points = []
    for lineno, row in rows:
        try:
            budget = float(row["budget"])
            accuracy = float(row["accuracy"]) * scale
            rep = int(row["rep"]) if row.get("rep", "") != "" else None
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        try:
            points.append(CurvePoint(budget, accuracy, rep))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    if not fraction and points and max(p.accuracy for p in points) <= 1.0:
        warnings.warn(
            "all accuracies lie in [0, 1]; percent values are expected "
            "(use fraction mode to rescale)",
            UserWarning,
            stacklevel=2,
        )
    return LearningCurve(tuple(points), b=b, meta=meta or {})


def dump_curve(curve, stream=None):
    """Write ``curve`` in the canonical CSV layout; returns the text."""
    with_rep = any(r is not None for r in curve.replicates)
    lines = ["budget,accuracy,rep" if with_rep else "budget,accuracy"]
    for p in curve.points:
        row = f"{p.budget!r},{p.accuracy!r}"
        if with_rep:
            row += "," + ("" if p.replicate is None else str(p.replicate))
        lines.append(row)
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    return text


def aggregate_replicates(curve, stat="mean"):
    """Collapse replicates to one curve using the per-budget mean, min or max."""
    try:
        reduce = _STATS[stat]
    except KeyError:
        raise ValueError(f"stat must be one of {sorted(_STATS)}, got {stat!r}") from None
    groups = OrderedDict()
    for p in curve.points:
        groups.setdefault(p.replicate, []).append(p)
    grids = [tuple(p.budget for p in pts) for pts in groups.values()]
    if any(g != grids[0] for g in grids[1:]):
        raise GridMismatch("replicates do not share the same budget grid")
    table = np.array([[p.accuracy for p in pts] for pts in groups.values()])
    values = reduce(table, axis=0)
    points = tuple(CurvePoint(x, min(100.0, y)) for x, y in zip(grids[0], values))
    return LearningCurve(points, b=curve.b, meta=curve.meta)


def prefix(curve, n_points):
    """Observations at the first ``n_points`` distinct budgets.

    For a single-replicate curve this is simply the first ``n_points`` points.
    """
    distinct = curve.distinct_budgets
    if not 1 <= n_points <= len(distinct):
        raise RangeError(f"prefix size must lie in [1, {len(distinct)}], got {n_points}")
    cutoff = distinct[n_points - 1]
    pts = tuple(p for p in curve.points if p.budget <= cutoff)
    return LearningCurve(pts, b=curve.b, meta=curve.meta)
