"""Randomized integration with hashed prime-modulus lattices and a Gaussian filter."""

from .estimator import (
    Estimate,
    IntegrandError,
    complex_median,
    estimate_once,
    guarded_estimate,
    median_estimate,
    monte_carlo_estimate,
    periodize,
    plain_lattice_estimate,
)
from .integrands import CompactSupportSpec, Integrand, make_integrand
from .lattice import LatticeDraw, RngStream
from .params import ExperimentPlan, ParamError, Params, is_prime, make_params, next_prime
from .window import Window, band_response, build_window, window_mass

__version__ = "0.1.0"
