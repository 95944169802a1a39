# infoflow/detection/quantizer.py
# This file contains likelihood-ratio quantizers and the search for KL-optimal threshold vectors
# Purpose: Evaluate the likelihood ratio, map threshold vectors to quantized output distributions, compute their KL divergence, and optimize n-level thresholds. This is NOT for tabulating utilities (see utility.py).

"""
Likelihood-ratio quantizers (LRQs) for binary hypothesis testing.

An n-level LRQ sends y to cell l when L(y) lies in [t_{l-1}, t_l), with
0 = t_0 <= t_1 <= ... <= t_n = inf. Both supported families have a
monotone L, so every LRQ is an interval partition of the y axis and the
threshold search runs over n-1 ordered y cut points.

The search is coordinate ascent. Moving cut k only changes cells k and k+1,
so all even cuts can move together, then all odd cuts; each half sweep is
one vectorized golden-section search over the bracket [cut_{k-1}, cut_{k+1}].
A cut only moves when its two cells gain, so the divergence never decreases.
"""
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import rel_entr
from scipy.stats import qmc

from .densities import DensityPair
from ..utils.config_loader import ThresholdSearchConfig, get_config
from ..utils.logger import get_logger

logger = get_logger("detection.quantizer")

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
GOLDEN_RTOL = 1e-8
MASS_TOL = 1e-9


@dataclass(frozen=True)
class ThresholdVector:
    """Likelihood-ratio thresholds (t_0 = 0, ..., t_n = inf)."""
    t: tuple

    def __post_init__(self):
        t = tuple(float(v) for v in self.t)
        if len(t) < 2 or t[0] != 0.0 or t[-1] != np.inf:
            raise ValueError(f"Threshold vector must start at 0 and end at inf, got {t}")
        if any(b < a for a, b in zip(t, t[1:])):
            raise ValueError(f"Threshold vector must be nondecreasing, got {t}")
        object.__setattr__(self, "t", t)

    @property
    def levels(self) -> int:
        return len(self.t) - 1

    @classmethod
    def single_cell(cls) -> "ThresholdVector":
        return cls((0.0, np.inf))


@dataclass(frozen=True)
class QuantizerOutputDistributions:
    """Cell masses of the quantizer output under H0 and H1."""
    q0: np.ndarray
    q1: np.ndarray

    def __post_init__(self):
        for label, q in (("q0", self.q0), ("q1", self.q1)):
            if np.any(np.asarray(q) < 0) or abs(float(np.sum(q)) - 1.0) > MASS_TOL:
                raise ValueError(f"{label} is not a probability vector: {q}")

    @property
    def levels(self) -> int:
        return len(self.q0)


class OptimalQuantizer(NamedTuple):
    """Best threshold vector found and its KL divergence f(n)."""
    thresholds: ThresholdVector
    value: float


def likelihood_ratio(pair: DensityPair, y):
    """
    L(y) = p1(y) / p0(y), computed in log space.

    Returns 0 where p1 = 0 < p0, inf where p0 = 0 < p1, and NaN where both vanish.
    """
    return pair.lr_of_y(y)


def kl_divergence(q1: Sequence[float], q0: Sequence[float]) -> float:
    """
    D(q1 || q0) = sum_l q1[l] log(q1[l] / q0[l]) in nats.

    Terms with q1[l] = 0 contribute 0; q1[l] > 0 = q0[l] gives inf.
    """
    return float(np.sum(rel_entr(np.asarray(q1, dtype=float), np.asarray(q0, dtype=float))))


def _y_edges(pair: DensityPair, cuts: np.ndarray) -> np.ndarray:
    lo, hi = pair.support
    return np.concatenate(([lo], np.asarray(cuts, dtype=float), [hi]))


def cell_masses_y(pair: DensityPair, cuts: Sequence[float]) -> QuantizerOutputDistributions:
    """Masses of the intervals between increasing y cut points (outer cells reach the support ends)."""
    edges = _y_edges(pair, np.asarray(cuts, dtype=float))
    q0, q1 = pair.interval_masses(edges[:-1], edges[1:])
    return QuantizerOutputDistributions(q0 / q0.sum(), q1 / q1.sum())


def cell_masses(pair: DensityPair, thresholds: ThresholdVector) -> QuantizerOutputDistributions:
    """
    Output distributions of the LRQ with the given thresholds.

    Args:
        pair: H0/H1 densities
        thresholds: Likelihood-ratio threshold vector

    Returns:
        Masses ordered by likelihood-ratio cell (cell 1 holds the smallest ratios)
    """
    n = thresholds.levels
    if pair.direction == 0:
        # constant ratio 1: everything lands in the cell containing 1
        cell = int(np.searchsorted(np.asarray(thresholds.t[1:]), 1.0, side="right"))
        q = np.zeros(n)
        q[min(cell, n - 1)] = 1.0
        return QuantizerOutputDistributions(q, q.copy())

    cuts = pair.y_of_lr(np.asarray(thresholds.t[1:-1]))
    cuts = np.sort(np.atleast_1d(cuts)) if n > 1 else np.zeros(0)
    masses = cell_masses_y(pair, cuts)
    if pair.direction < 0:
        return QuantizerOutputDistributions(masses.q0[::-1].copy(), masses.q1[::-1].copy())
    return masses


def thresholds_from_cuts(pair: DensityPair, cuts: Sequence[float]) -> ThresholdVector:
    """LR-space threshold vector of the partition defined by increasing y cuts."""
    lr = np.asarray([pair.lr_of_y(c) for c in cuts], dtype=float)
    lr = np.sort(lr)
    return ThresholdVector((0.0, *lr.tolist(), np.inf))


def divergence_of_cuts(pair: DensityPair, cuts: Sequence[float]) -> float:
    """KL divergence of the y-space partition defined by increasing cuts."""
    masses = cell_masses_y(pair, cuts)
    return kl_divergence(masses.q1, masses.q0)


def _pair_terms(pair: DensityPair, left: np.ndarray, x: np.ndarray, right: np.ndarray) -> np.ndarray:
    q0_l, q1_l = pair.interval_masses(left, x)
    q0_r, q1_r = pair.interval_masses(x, right)
    return rel_entr(q1_l, q0_l) + rel_entr(q1_r, q0_r)


def _golden_max(pair, left, right, lo, hi) -> np.ndarray:
    """Vectorized golden-section maximization of the two-cell divergence on [lo, hi]."""
    a, b = lo.copy(), hi.copy()
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = _pair_terms(pair, left, c, right)
    fd = _pair_terms(pair, left, d, right)
    while np.any(b - a > GOLDEN_RTOL * np.maximum(1.0, np.abs(a) + np.abs(b))):
        move_right = fc < fd
        a = np.where(move_right, c, a)
        b = np.where(move_right, b, d)
        new_c = np.where(move_right, d, b - INV_PHI * (b - a))
        new_d = np.where(move_right, a + INV_PHI * (b - a), c)
        f_new = _pair_terms(pair, left, np.where(move_right, new_d, new_c), right)
        fc, fd = np.where(move_right, fd, f_new), np.where(move_right, f_new, fc)
        c, d = new_c, new_d
    return 0.5 * (a + b)


def _ascend(pair: DensityPair, cuts: np.ndarray, bounds, settings: ThresholdSearchConfig):
    """
    Red-black coordinate ascent from one start; returns (cuts, value, sweeps).

    Stops once a full sweep gains less than sweep_tol relative to the current divergence.
    """
    lo_bound, hi_bound = bounds
    support_lo, support_hi = pair.support
    cuts = np.sort(np.clip(cuts, lo_bound, hi_bound))
    m = len(cuts)
    value = divergence_of_cuts(pair, cuts)
    sweeps = 0
    for sweeps in range(1, settings.max_sweeps + 1):
        previous = value
        for parity in (0, 1):
            idx = np.arange(parity, m, 2)
            if idx.size == 0:
                continue
            padded = np.concatenate(([support_lo], cuts, [support_hi]))
            left, right = padded[idx], padded[idx + 2]
            bracket_lo = np.maximum(left, lo_bound)
            bracket_hi = np.minimum(right, hi_bound)
            candidate = _golden_max(pair, left, right, bracket_lo, bracket_hi)
            gain = _pair_terms(pair, left, candidate, right) - _pair_terms(pair, left, cuts[idx], right)
            cuts[idx] = np.where(gain > 0, candidate, cuts[idx])
        value = divergence_of_cuts(pair, cuts)
        if value - previous < settings.sweep_tol * max(value, MASS_TOL):
            break
    return cuts, value, sweeps


def _sobol_starts(m: int, count: int, bounds, seed: int) -> np.ndarray:
    lo, hi = bounds
    sampler = qmc.Sobol(d=m, scramble=True, seed=seed)
    with warnings.catch_warnings():
        # balance warning for non power-of-two sample counts
        warnings.simplefilter("ignore", UserWarning)
        points = sampler.random(count)
    return np.sort(lo + (hi - lo) * points, axis=1)


def refine_cuts(cuts: Sequence[float], bounds) -> np.ndarray:
    """
    Cuts of a 2m+1-cut partition that reproduces the given m-cut one.

    A midpoint is inserted inside every cell, so the finer quantizer is at
    least as informative as the coarser one.
    """
    lo, hi = bounds
    edges = np.concatenate(([lo], np.asarray(cuts, dtype=float), [hi]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(len(edges) + len(mids) - 2)
    out[0::2] = mids
    out[1::2] = edges[1:-1]
    return out


def optimize_cuts(
    pair: DensityPair,
    n: int,
    warm_start: Optional[Sequence[float]] = None,
    settings: Optional[ThresholdSearchConfig] = None,
):
    """
    y-space cuts of the best n-level LRQ found by multi-start coordinate ascent.

    Args:
        pair: H0/H1 densities
        n: Number of levels (>= 1)
        warm_start: Optional n-1 increasing cuts tried first; above
            settings.multistart_max_levels it is the only start
        settings: Search settings (defaults from config)

    Returns:
        (cuts, value) with the largest divergence over all starts
    """
    if n < 1:
        raise ValueError(f"Number of quantization levels must be at least 1, got {n}")
    settings = settings or get_config().threshold_search
    if n == 1 or pair.direction == 0:
        return np.zeros(0), 0.0

    m = n - 1
    bounds = pair.search_interval(settings.tail_mass)
    starts = []
    if warm_start is not None:
        warm = np.asarray(warm_start, dtype=float)
        if warm.shape != (m,):
            raise ValueError(f"Warm start needs {m} cuts, got {warm.shape}")
        starts.append(warm)
    if warm_start is None or n <= settings.multistart_max_levels:
        starts.extend(_sobol_starts(m, settings.starts, bounds, settings.seed))

    best_cuts, best_value = None, -np.inf
    total_sweeps = 0
    for start in starts:
        cuts, value, sweeps = _ascend(pair, np.array(start, dtype=float), bounds, settings)
        total_sweeps += sweeps
        if value > best_value:
            best_cuts, best_value = cuts, value
    logger.debug(f"🎯 Thresholds for {pair!r}: n={n} f={best_value:.9f} starts={len(starts)} sweeps={total_sweeps}")
    return best_cuts, float(best_value)


def optimize_thresholds(
    pair: DensityPair,
    n: int,
    settings: Optional[ThresholdSearchConfig] = None,
) -> OptimalQuantizer:
    """
    Threshold vector maximizing D(Q1 || Q0) over n-level LRQs.

    Args:
        pair: H0/H1 densities
        n: Number of levels (>= 1)
        settings: Search settings (defaults from config)

    Returns:
        OptimalQuantizer(thresholds, value); f(1) is exactly 0

    Raises:
        ValueError: If n < 1
    """
    cuts, value = optimize_cuts(pair, n, settings=settings)
    if len(cuts) == 0:
        if n == 1:
            return OptimalQuantizer(ThresholdVector.single_cell(), 0.0)
        # constant ratio: any thresholds are optimal
        return OptimalQuantizer(ThresholdVector((0.0,) + (1.0,) * (n - 1) + (np.inf,)), 0.0)
    return OptimalQuantizer(thresholds_from_cuts(pair, cuts), value)
