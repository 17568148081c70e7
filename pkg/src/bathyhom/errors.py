"""Exception types raised across the package."""


class BathyhomError(Exception):
    """Base class for all package errors."""


class InvalidProfileError(BathyhomError, ValueError):
    """Bathymetry profile with non-positive depth or malformed data."""


class ConsistencyError(BathyhomError):
    """Two routes to the same quantity disagree beyond tolerance."""


class SimulationError(BathyhomError):
    """Non-finite values, blow-up or loss of positivity in a time loop."""

    def __init__(self, message, t=None, step=None):
        super().__init__(message)
        self.t = t
        self.step = step


class DryStateError(SimulationError):
    """Negative water depth after a finite-volume update."""


class TravelingWaveError(BathyhomError):
    """No homoclinic orbit, escape from the physical range, or step cap."""


class ConfigError(BathyhomError, ValueError):
    """Invalid experiment configuration."""
