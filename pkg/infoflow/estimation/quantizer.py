# infoflow/estimation/quantizer.py
# This file contains the uniform midpoint quantizer applied by each sensor
# Purpose: Map real measurements to the midpoint of one of 2^r equal cells of the sensor input range, scalar and vectorized. This is NOT for likelihood-ratio quantizers (see detection/quantizer.py).

"""
Uniform quantizer with midpoint reconstruction and clamping.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

QuantizerRange = Tuple[float, float]


@dataclass(frozen=True)
class QuantizedObservation:
    """Quantized measurement d with its bit budget and cell width."""
    value: float
    bits: int
    step: float


def step_size(bits, quantizer_range: QuantizerRange):
    """Cell width (hi - lo) / 2^r; works elementwise on arrays."""
    lo, hi = quantizer_range
    return (hi - lo) / np.power(2.0, bits)


def quantize_array(y: np.ndarray, bits: np.ndarray, quantizer_range: QuantizerRange) -> np.ndarray:
    """
    Quantize every entry of y with its own bit budget.

    Args:
        y: Measurements, shape (..., N)
        bits: Nonnegative integer rates, broadcastable to y
        quantizer_range: (lo, hi) sensor input range

    Returns:
        Cell midpoints; out-of-range values land in the nearest boundary cell
    """
    lo, _ = quantizer_range
    bits = np.asarray(bits)
    if np.any(bits < 0):
        raise ValueError(f"Quantizer rates must be nonnegative, got {bits}")
    delta = step_size(bits, quantizer_range)
    levels = np.power(2.0, bits)
    cell = np.floor((np.asarray(y, dtype=float) - lo) / delta)
    cell = np.clip(cell, 0.0, levels - 1.0)
    return lo + (cell + 0.5) * delta


def quantize(y: float, bits: int, quantizer_range: QuantizerRange) -> QuantizedObservation:
    """Quantize one measurement with r bits."""
    value = float(quantize_array(np.asarray(y, dtype=float), np.asarray(bits), quantizer_range))
    return QuantizedObservation(value=value, bits=int(bits), step=float(step_size(bits, quantizer_range)))
