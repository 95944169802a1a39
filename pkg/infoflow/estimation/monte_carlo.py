# infoflow/estimation/monte_carlo.py
# This file contains the Monte Carlo harness that measures the empirical MSE of quantized least squares
# Purpose: Simulate x, noise, quantization and estimation for a fixed model and integral allocation, reproducibly and in parallel chunks. This is NOT for the analytical MSE (see model.py).

"""
Monte Carlo estimation of E||x_hat - x||^2.

Runs are split into fixed-size chunks. Chunk k draws from the k-th child of
SeedSequence(seed), so the result depends only on (seed, runs, chunk_size)
and never on the number of worker threads.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import Rates, SensingModel, estimate
from .quantizer import quantize_array
from ..utils.config_loader import get_config
from ..utils.logger import get_logger

logger = get_logger("estimation.monte_carlo")


@dataclass(frozen=True)
class MonteCarloResult:
    """Empirical MSE with its standard error."""
    mse: float
    stderr: float
    runs: int

    @property
    def reliable(self) -> bool:
        """A standard error needs at least two runs."""
        return self.runs > 1 and math.isfinite(self.stderr)


def _chunk_errors(model: SensingModel, bits: np.ndarray, size: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    x = rng.standard_normal((size, model.dimension))
    eta = rng.uniform(-model.noise_half_width, model.noise_half_width, (size, model.n_sensors))
    y = x @ model.A.T + eta
    d = quantize_array(y, bits, model.quantizer_range)
    return np.sum((estimate(model, d) - x) ** 2, axis=1)


def monte_carlo_mse(
    model: SensingModel,
    rates: Rates,
    runs: int,
    seed: int,
    chunk_size: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> MonteCarloResult:
    """
    Empirical MSE of x_hat = A_pinv Q(A x + eta) with x ~ N(0, I) and eta ~ U(-w, w).

    Args:
        model: Sensing model
        rates: Integral bits per sensor (row order)
        runs: Number of independent realizations (>= 1)
        seed: Root seed
        chunk_size: Realizations per chunk (defaults from config)
        max_workers: Worker threads (defaults from config)

    Returns:
        MonteCarloResult; stderr is NaN when runs == 1
    """
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs}")
    bits = model.rates_vector(rates)
    if not np.allclose(bits, np.round(bits)):
        raise ValueError(f"Quantizer rates must be integral, got {bits}")
    bits = np.round(bits).astype(int)

    config = get_config()
    chunk_size = chunk_size or config.monte_carlo.chunk_size
    max_workers = max_workers or config.max_workers

    sizes = [chunk_size] * (runs // chunk_size)
    if runs % chunk_size:
        sizes.append(runs % chunk_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    logger.debug(f"🎲 Monte Carlo: runs={runs} chunks={len(sizes)} workers={max_workers} seed={seed}")
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        parts = list(pool.map(lambda args: _chunk_errors(model, bits, *args), zip(sizes, children)))

    errors = np.concatenate(parts)
    mse = float(errors.mean())
    stderr = float(errors.std(ddof=1) / math.sqrt(runs)) if runs > 1 else math.nan
    return MonteCarloResult(mse=mse, stderr=stderr, runs=runs)
