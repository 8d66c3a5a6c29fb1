"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class RlmError(Exception):
    """Base class for every error raised by :mod:`rlmfem`."""


class ArgumentError(RlmError, ValueError):
    """Invalid parameter passed to a public operation."""


class LocationError(RlmError):
    """A query point does not lie in the meshed domain."""

    def __init__(self, point, message: str | None = None):
        self.point = tuple(float(c) for c in point)
        super().__init__(message or f"point {self.point} is outside the mesh")


class GeometryError(RlmError):
    """Inclusion geometry is incompatible with the mesh or domain."""

    def __init__(self, message: str, inclusion: int | None = None):
        self.inclusion = inclusion
        super().__init__(message)


class DefinitenessError(RlmError):
    """Primal matrix is not positive definite (usually: missing Dirichlet data)."""


class ConvergenceError(RlmError):
    """Iterative solve did not reach the requested tolerance."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class RankError(RlmError):
    """Coupling operator is (numerically) rank deficient."""


class PlacementError(RlmError):
    """An inclusion layout could not be generated."""

    def __init__(self, message: str, achieved: int | None = None):
        self.achieved = achieved
        super().__init__(message)


class ConfigError(RlmError, ValueError):
    """Malformed experiment configuration."""
