# infoflow/estimation/model.py
# This file contains the linear sensing model with bounded uniform noise and its least-squares estimator
# Purpose: Hold the sensing matrix, noise variance and quantizer range; compute the pseudoinverse, per-sensor estimation utilities and the predicted MSE of quantized least squares. This is NOT for simulation (see monte_carlo.py).

"""
Linear observation model y = A x + eta with quantized measurements.
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .quantizer import QuantizerRange, step_size
from ..num.utility import ExponentialUtility
from ..utils.validation import ConfigurationError, SingularModelError

RANK_RTOL = 1e-10

Rates = Union[Sequence[float], np.ndarray, Mapping[int, float]]


def pseudoinverse(A: np.ndarray) -> np.ndarray:
    """
    Least-squares inverse of a full-column-rank matrix via the SVD.

    Raises:
        SingularModelError: if a singular value is below 1e-10 times the largest
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n, q = A.shape
    if n < q:
        raise SingularModelError(f"Sensing matrix {A.shape} has fewer rows than columns")
    u, s, vt = linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[-1] <= RANK_RTOL * s[0]:
        raise SingularModelError(f"Sensing matrix is rank deficient (singular values {s})")
    return (vt.T / s) @ u.T


def make_sensing_matrix(n_sensors: int, q: int, weak_count: int, alpha: float, seed: int) -> np.ndarray:
    """
    Uniform(0, 1) sensing matrix whose first weak_count rows are scaled by alpha.

    The same seed gives the same base matrix for every alpha.
    """
    if not 0 <= weak_count <= n_sensors:
        raise ConfigurationError(f"weak_count={weak_count} must lie in [0, {n_sensors}]")
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.0, 1.0, size=(n_sensors, q))
    A[:weak_count] *= alpha
    return A


@dataclass(frozen=True)
class SensingModel:
    """Sensing matrix, bounded zero-mean noise and sensor quantizer range."""
    A: np.ndarray
    noise_half_width: float
    noise_variance: float
    quantizer_range: QuantizerRange
    A_pinv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lo, hi = self.quantizer_range
        if not hi > lo:
            raise ConfigurationError(f"Quantizer range must be nonempty, got {self.quantizer_range}")
        if self.noise_half_width < 0 or self.noise_variance < 0:
            raise ConfigurationError("Noise half width and variance must be nonnegative")
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "A_pinv", pseudoinverse(self.A))

    @classmethod
    def with_uniform_noise(cls, A: np.ndarray, half_width: float, quantizer_range: QuantizerRange) -> "SensingModel":
        """Model with eta ~ U(-w, w), whose variance is (2w)^2 / 12 = w^2 / 3."""
        return cls(A=A, noise_half_width=half_width, noise_variance=half_width ** 2 / 3.0, quantizer_range=quantizer_range)

    @property
    def n_sensors(self) -> int:
        return self.A.shape[0]

    @property
    def dimension(self) -> int:
        return self.A.shape[1]

    @property
    def column_norms_sq(self) -> np.ndarray:
        """||A_pinv(:, i)||^2 for every sensor i."""
        return np.sum(self.A_pinv ** 2, axis=0)

    def rates_vector(self, rates: Rates) -> np.ndarray:
        if isinstance(rates, Mapping):
            rates = [rates[i] for i in range(self.n_sensors)]
        rates = np.asarray(rates, dtype=float)
        if rates.shape != (self.n_sensors,):
            raise ValueError(f"Expected {self.n_sensors} rates, got shape {rates.shape}")
        if np.any(rates < 0):
            raise ValueError(f"Rates must be nonnegative, got {rates}")
        return rates


def estimation_utilities(model: SensingModel) -> Dict[int, ExponentialUtility]:
    """
    Per-sensor utilities g_i(r) = -||A_pinv(:, i)||^2 (hi - lo)^2 / 12 * 4^(-r).

    Keyed by sensor row index. sum_i g_i(r_i) minus the noise floor
    sum_i sigma^2 ||A_pinv(:, i)||^2 is exactly -predict_mse(rates).
    """
    lo, hi = model.quantizer_range
    width_sq = (hi - lo) ** 2 / 12.0
    return {i: ExponentialUtility(scale=float(norm * width_sq)) for i, norm in enumerate(model.column_norms_sq)}


def noise_floor(model: SensingModel) -> float:
    """MSE left when quantization noise vanishes: sum_i sigma^2 ||A_pinv(:, i)||^2."""
    return float(model.noise_variance * model.column_norms_sq.sum())


def predict_mse(model: SensingModel, rates: Rates) -> float:
    """
    Predicted MSE of quantized least squares: sum_i (sigma^2 + Delta_i^2 / 12) ||A_pinv(:, i)||^2.

    Args:
        model: Sensing model
        rates: Bits per sensor (row order)

    Returns:
        Predicted mean squared error of x_hat
    """
    delta = step_size(model.rates_vector(rates), model.quantizer_range)
    return float(np.sum((model.noise_variance + delta ** 2 / 12.0) * model.column_norms_sq))


def estimate(model: SensingModel, d: np.ndarray) -> np.ndarray:
    """Least-squares estimate x_hat = A_pinv d (d may be stacked as rows)."""
    d = np.asarray(d, dtype=float)
    return d @ model.A_pinv.T if d.ndim == 2 else model.A_pinv @ d
