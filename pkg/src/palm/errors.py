"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the command line
front end echoes in its error documents.
"""


class PalmError(Exception):
    code = "palm_error"


class DomainError(PalmError, ValueError):
    """An argument lies outside the domain of a closed-form expression."""

    code = "domain_error"


class TargetUnreachable(PalmError, ValueError):
    code = "target_unreachable"

    def __init__(self, target, a_max):
        self.target = float(target)
        self.a_max = float(a_max)
        self.gap = self.target - self.a_max
        super().__init__(
            f"target accuracy {self.target!r} is not below the ceiling "
            f"a_max={self.a_max!r} (gap {self.gap!r})"
        )


class DegenerateModel(PalmError, ValueError):
    """Coverage efficiency of exactly 0 or 1; the model cannot be inverted."""

    code = "degenerate_model"


class ParseError(PalmError, ValueError):
    code = "parse_error"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(PalmError, ValueError):
    code = "validation_error"


class GridMismatch(PalmError, ValueError):
    code = "grid_mismatch"


class RangeError(PalmError, IndexError):
    code = "range_error"


class TooFewPoints(PalmError, ValueError):
    code = "too_few_points"


class NoConvergedStart(PalmError, RuntimeError):
    code = "no_converged_start"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        reasons = ", ".join(f"{i}:{r}" for i, r in self.diagnostics)
        super().__init__(f"no start converged ({reasons})")


class GridTooLarge(PalmError, ValueError):
    code = "grid_too_large"
