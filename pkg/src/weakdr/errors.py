"""Exception hierarchy shared across the package."""


class WeakDRError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(WeakDRError, ValueError):
    """Two vectors of different ambient dimension were combined."""


class CoordinateRangeError(WeakDRError, ValueError):
    """A coordinate lies outside [0, 1] beyond the clamping tolerance."""


class ParameterError(WeakDRError, ValueError):
    """An algorithm parameter is outside its admissible range."""


class OracleError(WeakDRError, RuntimeError):
    """An objective oracle returned a non-finite value."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class SolverError(WeakDRError, RuntimeError):
    """The LP solver failed numerically; carries the iteration count."""

    def __init__(self, message: str, iterations: int = 0):
        super().__init__(message)
        self.iterations = iterations


class InfeasibleRegionError(WeakDRError, RuntimeError):
    """A subproblem region that a caller asserted nonempty is empty."""


class InstanceFormatError(WeakDRError, ValueError):
    """An instance or report file failed validation; names the field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InternalInvariantError(WeakDRError, AssertionError):
    """An internal invariant was violated (bug signal, not user error)."""
