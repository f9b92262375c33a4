"""Resonant quantum kicked rotor with a time-dependent kick strength.

Simulation back-ends (closed form, Bessel-band convolution, split-operator
FFT), moment and spreading-exponent analysis, and parameter sweeps.
"""

__version__ = "0.1.0"

from .core import (AliasingError, Backend, Constant, Custom, DeltaAt, DomainError, Explicit,
                   KickedRotorError, NumericalError, PowerLaw, ResonanceParams, RunConfig,
                   TruncationError, TruncationPolicy, ValidationError, WaveState,
                   cumulative_kick, cumulative_kicks, initial_state, kick_strength,
                   kick_strengths, load_explicit_schedule, make_resonance)
from .specfun import BesselBand, band_cutoff, bessel_band, bessel_table
from .observables import (FitModel, GammaFit, Regime, TimeSeries, analytic_moments, classify,
                          classify_gamma, energy, fit_gamma, moments, predicted_gamma)
from .propagator import (Banded, PhaseTable, Spectral, analytic_amplitudes, evolve, free_phase,
                         max_amplitude_difference, step_banded, step_spectral)

__all__ = [
    "AliasingError", "Backend", "Constant", "Custom", "DeltaAt", "DomainError", "Explicit",
    "KickedRotorError", "NumericalError", "PowerLaw", "ResonanceParams", "RunConfig",
    "TruncationError", "TruncationPolicy", "ValidationError", "WaveState", "cumulative_kick",
    "cumulative_kicks", "initial_state", "kick_strength", "kick_strengths",
    "load_explicit_schedule", "make_resonance",
    "BesselBand", "band_cutoff", "bessel_band", "bessel_table",
    "FitModel", "GammaFit", "Regime", "TimeSeries", "analytic_moments", "classify",
    "classify_gamma", "energy", "fit_gamma", "moments", "predicted_gamma",
    "Banded", "PhaseTable", "Spectral", "analytic_amplitudes", "evolve", "free_phase",
    "max_amplitude_difference", "step_banded", "step_spectral",
]
