"""Kullback-Leibler-type chaos indicators for the pulse-kicked Kerr oscillator."""

__version__ = "0.1.0"

from .classical import bifurcation_scan, classical_step, lyapunov_exponent, lyapunov_sweep
from .divergence import (
    DivergenceValue,
    fidelity,
    jackson_derivative,
    kld,
    linear_divergence,
    nonlinear_divergence,
    q_divergence,
)
from .hilbert import coherent_state, outer_product, vacuum_state
from .qmap import ModelParams, evolve_pair, indicator_series, run_indicators
from .spectra import Spectrum, TimeSeries, dominant_peaks, power_spectrum, spectral_concentration
