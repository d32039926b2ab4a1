"""Exception and warning classes raised by the solvers."""

from typing import Any, Optional

__all__ = (
    "AmbiguousCollisionError",
    "DegenerateCouplingError",
    "InvalidInputError",
    "InvalidPointError",
    "MeshBoundaryError",
    "NearDegeneracyWarning",
    "NumericalFailureError",
    "PoleProximityError",
    "PreconditionError",
    "ProblemFileWarning",
    "ProblemParseError",
    "SpectralError",
)


class SpectralError(Exception):
    """Base class of all errors raised by this package."""


class InvalidInputError(SpectralError, ValueError):
    """Raised when an operation receives arguments it cannot work with."""


class PoleProximityError(InvalidInputError):
    """Raised when a resolvent is evaluated inside the exclusion zone of one
    of its poles.
    """

    def __init__(self, pole: float, point: Any):
        super().__init__(f"{point!r} is too close to the pole at {pole!r}")
        self.pole = pole
        self.point = point


class MeshBoundaryError(InvalidInputError):
    """Raised when a point lies on one of the lines of the chess-board mesh."""


class DegenerateCouplingError(InvalidInputError):
    """Raised when an operation needs a non-zero coupling constant."""


class InvalidPointError(InvalidInputError):
    """Raised when a point is expected to lie on a spectral curve but does
    not.
    """


class PreconditionError(InvalidInputError):
    """Raised when the hypotheses of an operation are not satisfied."""


class ProblemParseError(InvalidInputError):
    """Raised when a problem definition file cannot be parsed.

    Attributes:
        code: short machine-readable identifier of the error kind
        line: one-based line number where the error was detected
        column: one-based column number where the error was detected
        reason: human-readable description
    """

    def __init__(self, code: str, reason: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {reason} [{code}]")
        self.code = code
        self.reason = reason
        self.line = line
        self.column = column


class NumericalFailureError(SpectralError, RuntimeError):
    """Raised when an iterative method fails to converge."""

    def __init__(
        self,
        message: str,
        residual: Optional[float] = None,
        best_iterate: Any = None,
    ):
        super().__init__(message)
        self.residual = residual
        self.best_iterate = best_iterate


class AmbiguousCollisionError(NumericalFailureError):
    """Raised when the real eigenvalue count changes by something other than
    two across an interval that cannot be subdivided any further.
    """


class NearDegeneracyWarning(UserWarning):
    """Emitted when a spectral classification is close to one of its
    thresholds.
    """


class ProblemFileWarning(UserWarning):
    """Emitted when a problem file is accepted after a correction."""
