"""
Exception hierarchy for the vortex NCS simulator.
"""

from typing import Any


class VortexNCSError(Exception):
    """Base class for every error raised by this package."""


class KinematicEdgeError(VortexNCSError):
    """Requested photon lies beyond the kinematic edge at this angle."""

    def __init__(self, message: str = "beyond kinematic edge"):
        super().__init__(message)


class QuadratureError(VortexNCSError):
    """Oscillatory quadrature did not converge."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics: dict[str, Any] = diagnostics or {}

    def __str__(self) -> str:
        if not self.diagnostics:
            return super().__str__()
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{super().__str__()} ({details})"


class AliasingError(VortexNCSError):
    """Azimuthal sampling too coarse for the winding content."""

    def __init__(self, message: str = "increase N_φ"):
        super().__init__(message)


class NoEmissionError(VortexNCSError):
    def __init__(self, message: str = "no emission at this point"):
        super().__init__(message)


class TwoColorRuleError(VortexNCSError, ValueError):
    def __init__(self, message: str = "no two-color rule"):
        super().__init__(message)


class CoverageError(VortexNCSError):
    def __init__(self, message: str = "insufficient θ coverage"):
        super().__init__(message)


class ConfigError(VortexNCSError):
    """Invalid run configuration; `key` names the offending entry."""

    def __init__(self, key: str, constraint: str):
        super().__init__(f"{key}: {constraint}")
        self.key = key
        self.constraint = constraint


class PointEvaluationError(VortexNCSError):
    """A numerical kernel rejected its input at one grid point."""

    def __init__(self, cause: Exception):
        super().__init__(f"{type(cause).__name__}: {cause}")
        self.cause = cause
