"""Exception hierarchy shared across the package.

Two families exist so the CLI can map failures to its exit-code contract:
``DataError`` (bad input, exit 2) and ``NumericError`` (numeric failure,
exit 3).
"""


class IfdaError(Exception):
    """Base class for every error raised by this package."""


class DataError(IfdaError, ValueError):
    """Invalid input data or configuration."""


class NumericError(IfdaError, ArithmeticError):
    """Numerically infeasible or degenerate computation."""


class ShapeMismatchError(DataError):
    pass


class NegativeWidthError(DataError):
    pass


class UnknownDistributionError(DataError):
    pass


class DimensionMismatchError(DataError):
    pass


class EmptySubsetError(DataError):
    pass


class MissingLabelsError(DataError):
    pass


class SingleClassError(DataError):
    pass


class ClassTooSmallError(DataError):
    pass


class LengthMismatchError(DataError):
    pass


class EmptyMatrixError(DataError):
    pass


class EmptyClassError(DataError):
    pass


class EmptyReportError(DataError):
    pass


class PriorMismatchError(DataError):
    pass


class SchemaError(DataError):
    """Malformed CSV or model file."""


class SingularMatrixError(NumericError):
    """Orthogonality matrix is not positive definite."""


class DegenerateDenominatorError(NumericError):
    """Fisher-ratio denominator vanished for the given direction."""


class SolverFailureError(NumericError):
    """Constrained maximization produced no feasible iterate."""


class ZeroScaleError(NumericError):
    """Robust scale collapsed to zero (constant distances)."""
