"""Exception hierarchy.

Numerical refusals are exceptions rather than NaN results so that a
winding is never silently computed on an ill-defined trajectory.
"""


class FractwindError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(FractwindError, ValueError):
    """Invalid parameters or run configuration."""


class DegenerateError(FractwindError):
    """Coinciding eigenvalues of a non-diagonalizable matrix (exceptional point)."""


class UnstableError(FractwindError):
    """Damping matrix has an eigenvalue with non-negative real part."""


class SingularSystemError(FractwindError):
    """The vectorized Lyapunov system is numerically singular."""


class StepSizeError(FractwindError, ValueError):
    """Integrator step too large for the requested accuracy."""


class GapClosedError(FractwindError):
    """Bloch vector too short for a direction to be defined."""

    def __init__(self, message, index=None, k=None):
        super().__init__(message)
        self.index = index
        self.k = k


class OriginCrossingError(GapClosedError):
    """xy-projection of the trajectory passes through the origin."""


class CoarseGridError(FractwindError):
    """Adjacent unit vectors too far apart to resolve the solid angle."""


class ReferenceOnPathError(FractwindError):
    """Trajectory passes through the solid-angle reference point."""


class SpectrumError(FractwindError, ValueError):
    """Matrix spectrum outside the domain of the requested matrix function."""
