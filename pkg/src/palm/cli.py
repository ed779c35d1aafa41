"""Command line front end.

Curves travel as CSV, parameters as ``palm/1`` JSON documents, so the
commands chain::

    palm gen --a-max 90 --delta 0.1 --alpha 0.5 --beta 1 --b 20 --iters 100 \\
        | palm fit > params.json
    palm predict --params params.json --budgets 0:2000:20
    palm invert --params params.json --target 80

Exit status is 0 on success, 1 on any error (including usage errors) and 2
when ``fit`` produced a document for a degenerate or bound-pinned fit.
"""

from dataclasses import asdict, dataclass, field
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis import compare, required_budget
from .curves import aggregate_replicates, dump_curve, load_curve, prefix
from .errors import DegenerateModel, PalmError, TooFewPoints
from .fitting import MIN_DISTINCT_BUDGETS, fit
from .model import PalmParams, palm_accuracy
from .synth import SynthSpec, generate

__all__ = ["ParamsDocument", "SchemaError", "parse_budget_range", "main"]

SCHEMA_VERSION = "palm/1"
EXIT_OK, EXIT_ERROR, EXIT_FLAGGED = 0, 1, 2


class SchemaError(PalmError, ValueError):
    code = "schema_mismatch"


class UsageError(PalmError, ValueError):
    code = "usage_error"


@dataclass
class ParamsDocument:
    a_max: float
    delta: float
    alpha: float
    beta: float
    b: float
    sse: float | None = None
    rmse: float | None = None
    converged: bool = True
    boundary_flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_fit(cls, result, meta=None):
        p = result.params
        meta = dict(meta or {})
        if result.degenerate:
            meta["degenerate"] = "true"
        return cls(
            p.a_max, p.delta, p.alpha, p.beta, p.b,
            sse=result.sse,
            rmse=result.rmse,
            converged=result.converged,
            boundary_flags=sorted(result.boundary_flags),
            meta=meta,
        )

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise SchemaError("parameter document must be a JSON object")
        if data.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(
                f"expected schema_version {SCHEMA_VERSION!r}, "
                f"got {data.get('schema_version')!r}"
            )
        missing = [k for k in ("a_max", "delta", "alpha", "beta", "b") if k not in data]
        if missing:
            raise SchemaError(f"parameter document lacks {missing}")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise SchemaError(f"unknown fields {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_json(self):
        # float repr is the shortest string that round-trips in binary64
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @property
    def params(self):
        return PalmParams(self.a_max, self.delta, self.alpha, self.beta, self.b)


def parse_budget_range(text):
    """Budgets from ``start:stop:step``; ``stop`` is included when reachable."""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise UsageError(f"budget range must be start:stop:step, got {text!r}") from None
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise UsageError("budget range values must be finite")
    if step <= 0.0 or stop < start:
        raise UsageError("budget range needs step > 0 and stop >= start")
    ratio = (stop - start) / step
    count = round(ratio)
    exact = abs(ratio - count) <= 1e-9 * max(1.0, ratio)
    if not exact:
        count = math.floor(ratio)
    budgets = start + step * np.arange(count + 1)
    if exact:
        budgets[-1] = stop
    return budgets


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_params(path):
    return ParamsDocument.from_json(_read_text(path))


def _budgets_from(args):
    if args.budgets is not None:
        return parse_budget_range(args.budgets)
    lines = [
        line for line in _read_text(args.budgets_from).splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    rows = list(csv.DictReader(lines))
    if not lines or "budget" not in (rows[0] if rows else {}):
        raise UsageError("budget file needs a header with a 'budget' column")
    try:
        values = sorted({float(row["budget"]) for row in rows})
    except ValueError as exc:
        raise UsageError(f"bad budget value: {exc}") from None
    return np.array(values)


def _emit_json(obj, out):
    out.write(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")


def cmd_fit(args, out):
    curve = load_curve(io.StringIO(_read_text(args.input)), b=args.b, fraction=args.fraction)
    if args.agg:
        curve = aggregate_replicates(curve, args.agg)
    if args.points is not None:
        if args.points < MIN_DISTINCT_BUDGETS:
            raise TooFewPoints(
                f"fitting needs at least {MIN_DISTINCT_BUDGETS} distinct budgets, "
                f"got {args.points}"
            )
        curve = prefix(curve, args.points)
    result = fit(curve)
    meta = {"input": args.input, "n_points": str(len(curve))}
    if args.agg:
        meta["agg"] = args.agg
    doc = ParamsDocument.from_fit(result, meta)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(doc.to_json())
    else:
        out.write(doc.to_json())
    flagged = result.degenerate or bool(result.boundary_flags) or not result.converged
    return EXIT_FLAGGED if flagged else EXIT_OK


def cmd_predict(args, out):
    params = _read_params(args.params).params
    budgets = _budgets_from(args)
    predicted = palm_accuracy(params, budgets)
    lines = ["budget,predicted_accuracy"]
    lines += [f"{float(x)!r},{float(y)!r}" for x, y in zip(budgets, predicted)]
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_compare(args, out):
    first = _read_params(args.first).params
    second = _read_params(args.second).params
    report = compare(first, second, parse_budget_range(args.budgets))
    _emit_json(report.to_dict(), out)
    return EXIT_OK


def cmd_invert(args, out):
    doc = _read_params(args.params)
    if doc.meta.get("degenerate") == "true":
        raise DegenerateModel("cannot plan a budget from a degenerate fit")
    estimate = required_budget(doc.params, args.target)
    _emit_json(
        {
            "target": estimate.target,
            "budget_samples": estimate.samples,
            "budget_iterations": estimate.iterations,
        },
        out,
    )
    return EXIT_OK


def cmd_gen(args, out):
    try:
        params = PalmParams(args.a_max, args.delta, args.alpha, args.beta, args.b)
        spec = SynthSpec(params, args.iters, args.noise, args.seed, args.reps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dump_curve(generate(spec), out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="palm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a curve CSV, print a parameter document")
    p.add_argument("--input", default="-", help="curve CSV path, '-' for stdin")
    p.add_argument("--b", type=float, help="samples per round (default: inferred)")
    p.add_argument("--points", type=int, help="fit only the first N budgets")
    p.add_argument("--agg", choices=("mean", "min", "max"), help="collapse replicates")
    p.add_argument("--fraction", action="store_true", help="accuracies are in [0, 1]")
    p.add_argument("--output", help="write the document here instead of stdout")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a fitted curve on a budget grid")
    p.add_argument("--params", required=True)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--budgets", help="start:stop:step")
    grid.add_argument("--budgets-from", help="CSV with a budget column")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("compare", help="compare two parameter documents")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.add_argument("--budgets", required=True, help="start:stop:step")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("invert", help="budget needed to reach a target accuracy")
    p.add_argument("--params", required=True)
    p.add_argument("--target", type=float, required=True, help="percent")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("gen", help="emit a synthetic curve CSV")
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1)
    p.set_defaults(func=cmd_gen)
    return parser


def _error_document(exc):
    doc = {"error": getattr(exc, "code", "error"), "message": str(exc)}
    if hasattr(exc, "gap"):
        doc["gap"] = exc.gap
    return doc


def main(argv=None, stdout=None):
    out = stdout if stdout is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"palm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (PalmError, OSError, ValueError) as exc:
        _emit_json(_error_document(exc), out)
        print(f"palm {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
