"""Exception types raised across the package."""


class MetricMagError(Exception):
    """Base class for all package errors."""


class ValidationError(MetricMagError, ValueError):
    """Input matrix violates a metric or similarity-space invariant."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class RangeError(ValidationError):
    """A similarity entry lies outside the open interval (0, 1)."""


class TriangleError(ValidationError):
    """A triangle inequality fails; ``triple`` holds the offending (i, j, k)."""


class SingularityError(MetricMagError, ArithmeticError):
    """A required determinant vanishes.

    ``what`` names the offending matrix (e.g. ``"A∩B"`` or a tail subspace).
    """

    def __init__(self, message, what=None):
        super().__init__(message)
        self.what = what


class ConstructionError(MetricMagError, ValueError):
    """A generator or gluing step produced an invalid space."""
