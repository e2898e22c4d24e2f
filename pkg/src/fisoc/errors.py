"""Exception hierarchy shared by the whole package.

Every failure mode that a caller may want to branch on gets its own class,
and each class carries a distinct process exit code for the command line
front end.
"""


class FisocError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(FisocError):
    """An input file or parameter set is invalid; names the offending field."""

    exit_code = 2

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"invalid configuration field {field!r}: {message}")


class BudgetError(FisocError):
    """An enumeration would exceed the configured size guard."""

    exit_code = 3

    def __init__(self, requested, budget, what="enumeration"):
        self.requested = requested
        self.budget = budget
        super().__init__(
            f"{what} of size {requested} exceeds budget {budget}; "
            f"raise the budget explicitly to proceed"
        )


class PrecisionError(FisocError):
    """A result cannot be certified at the working precision."""

    exit_code = 4


class InconsistencyError(FisocError):
    """Computed data violates an identity that must hold; signals a bug
    or impossible synthetic input."""

    exit_code = 5


class NonConstantPolygonError(FisocError):
    """Special and generic Newton polygons disagree where constancy is required."""

    exit_code = 6


class NonIntegralSlopeError(FisocError):
    """A slope step is not an integral multiple of 1/f at the current point ring."""

    exit_code = 7

    def __init__(self, slope, f):
        self.slope = slope
        self.f = f
        denom = (slope * f).denominator
        super().__init__(
            f"slope {slope} is not an integral multiple of 1/{f}; "
            f"extend the point ring by an unramified extension of degree {denom} "
            f"and retry"
        )
