"""Homogenized long-wave models for shallow water over y-periodic bathymetry."""
from bathyhom.bathymetry import (BathymetryProfile, EffectiveCoefficients,
                                 effective_coefficients, effective_dispersion_mu,
                                 pwc_setup, sinusoidal_setup)
from bathyhom.errors import (BathyhomError, ConfigError, ConsistencyError, DryStateError,
                             InvalidProfileError, SimulationError, TravelingWaveError)
from bathyhom.homogenized1d import HomogenizedParams, State1D, simulate_1d
from bathyhom.spectral_core import PeriodicGrid1D
from bathyhom.traveling_wave import TravelingWaveParams, fit_sech2, integrate_homoclinic

__version__ = "0.1.0"
