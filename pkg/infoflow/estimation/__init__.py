# infoflow/estimation/__init__.py
# This file marks the estimation directory as a Python package
# Purpose: Expose the sensing model, uniform quantizer and Monte Carlo harness. This is NOT for detection.

from .model import (
    SensingModel,
    estimate,
    estimation_utilities,
    make_sensing_matrix,
    noise_floor,
    predict_mse,
    pseudoinverse,
)
from .monte_carlo import MonteCarloResult, monte_carlo_mse
from .quantizer import QuantizedObservation, quantize, quantize_array

__all__ = [
    "SensingModel",
    "estimate",
    "estimation_utilities",
    "make_sensing_matrix",
    "noise_floor",
    "predict_mse",
    "pseudoinverse",
    "MonteCarloResult",
    "monte_carlo_mse",
    "QuantizedObservation",
    "quantize",
    "quantize_array",
]
