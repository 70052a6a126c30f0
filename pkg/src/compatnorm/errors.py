"""Exception types shared across the package."""

from __future__ import annotations


class CompatNormError(Exception):
    """Base class for all errors raised by compatnorm."""


class InvalidInput(CompatNormError, ValueError):
    """Malformed or out-of-domain input."""


class NotPsd(InvalidInput):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, min_eigenvalue: float, tol: float):
        super().__init__(f"matrix is not PSD: min eigenvalue {min_eigenvalue:.3e} < -{tol:.3e}")
        self.min_eigenvalue = min_eigenvalue


class TooManyMeasurements(InvalidInput):
    """The number of measurements exceeds the enumeration guard."""


class TooLarge(InvalidInput):
    """The joint outcome space exceeds the variable-count guard."""


class NotAnEffectTuple(InvalidInput):
    """A component fails 0 <= E <= I (equivalently -I <= 2E - I <= I)."""

    def __init__(self, index: int, eigenvalue: float):
        super().__init__(
            f"component {index} is not an effect: offending eigenvalue {eigenvalue:.6g}"
        )
        self.index = index
        self.eigenvalue = eigenvalue


class SolverError(CompatNormError):
    """The SDP solver did not reach an optimal point."""

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution
