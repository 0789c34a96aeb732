"""Exception hierarchy shared by every fatfront module."""

from __future__ import annotations


class FatFrontError(Exception):
    """Base class for all package errors."""


class DivergenceError(FatFrontError):
    """An integral that the caller asked for is infinite."""


class DomainError(FatFrontError, ValueError):
    """An argument lies outside the domain of the operation."""


class HypothesisError(FatFrontError):
    """The kernel does not satisfy the hypothesis a construction needs."""


class ConstructionError(FatFrontError):
    """A sub/supersolution could not be assembled from its constants."""


class VerificationError(FatFrontError):
    """A built-in constant failed its own numerical verification."""


class GridMismatchError(FatFrontError, ValueError):
    """A field and a convolution plan live on different grids."""


class RangeViolationError(FatFrontError):
    """A solution value left the invariant band [-tol, 1 + tol].

    Parameters
    ----------
    message : str
        Human readable description.
    t : float
        Simulation time at which the violation was detected.
    """

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t:.6g})")
        self.t = t


class NonFiniteError(RangeViolationError):
    """A NaN or infinity appeared in the state."""


class QuadratureError(FatFrontError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class InsufficientSamplesError(FatFrontError, ValueError):
    """Too few trace samples fall inside a fitting window."""


class AbsentCrossingError(FatFrontError, ValueError):
    """A level set is empty at a time where a crossing was required."""


class ConfigError(FatFrontError, ValueError):
    """A run configuration is malformed or inconsistent."""
