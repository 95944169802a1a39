# infoflow/detection/utility.py
# This file contains the rate-to-divergence tables and the detection utility built from them
# Purpose: Tabulate f(2^r) for r = 0..r_max with a thread-safe cache, turn the table into a concave piecewise-linear utility, and score integral allocations by total KL divergence. This is NOT for threshold search itself (see quantizer.py).

"""
Detection utilities: rate r buys n = 2^r quantization levels worth f(n) nats.
"""
import threading
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .densities import DensityPair
from .quantizer import optimize_cuts, refine_cuts
from ..num.utility import PiecewiseLinearUtility
from ..utils.config_loader import ThresholdSearchConfig, get_config
from ..utils.logger import get_logger

logger = get_logger("detection.utility")

MONOTONE_TOL = 1e-7
ENVELOPE_TOL = 1e-12


class DivergenceTable:
    """
    Thread-safe cache of f(n) and its optimal y cuts, keyed by (pair, n).

    Entries for n = 2^r are computed in increasing r, each warm-started from
    the refined optimum at 2^(r-1), so the cached values never decrease in r.
    """

    def __init__(self):
        self._values: Dict[Tuple, Tuple[np.ndarray, float]] = {}
        self._lock = threading.Lock()
        self._pair_locks: Dict[Tuple, threading.Lock] = {}
        self.logger = get_logger("detection.table")

    def _pair_lock(self, pair: DensityPair) -> threading.Lock:
        with self._lock:
            return self._pair_locks.setdefault(pair.key, threading.Lock())

    def lookup(self, pair: DensityPair, n: int) -> Optional[float]:
        with self._lock:
            entry = self._values.get((pair.key, n))
        return None if entry is None else entry[1]

    def tabulate(self, pair: DensityPair, r_max: int, settings: Optional[ThresholdSearchConfig] = None) -> List[float]:
        """
        f(2^r) for r = 0..r_max.

        Args:
            pair: H0/H1 densities
            r_max: Largest rate (>= 0)
            settings: Search settings (defaults from config)

        Returns:
            List of r_max + 1 divergences, starting with f(1) = 0
        """
        if r_max < 0:
            raise ValueError(f"r_max must be nonnegative, got {r_max}")
        settings = settings or get_config().threshold_search

        # one writer per pair; other pairs proceed in parallel
        with self._pair_lock(pair):
            table = []
            previous_cuts = np.zeros(0)
            bounds = pair.search_interval(settings.tail_mass)
            for r in range(r_max + 1):
                n = 2 ** r
                key = (pair.key, n)
                with self._lock:
                    entry = self._values.get(key)
                if entry is None:
                    warm = refine_cuts(previous_cuts, bounds) if n > 1 else None
                    cuts, value = optimize_cuts(pair, n, warm_start=warm, settings=settings)
                    if table and value < table[-1] - MONOTONE_TOL:
                        self.logger.warning(f"⚠️ f({n}) = {value:.9g} < f({n // 2}) = {table[-1]:.9g} for {pair!r}")
                    entry = (cuts, value)
                    with self._lock:
                        self._values.setdefault(key, entry)
                        entry = self._values[key]
                previous_cuts, value = entry
                table.append(value)
        self.logger.debug(f"📈 Tabulated {pair!r} up to r={r_max}: f(2^r_max)={table[-1]:.9g}")
        return table

    def cuts(self, pair: DensityPair, n: int) -> Optional[np.ndarray]:
        """Optimal y cuts cached for (pair, n), if tabulated."""
        with self._lock:
            entry = self._values.get((pair.key, n))
        return None if entry is None else entry[0].copy()

    def clear(self) -> None:
        """Drop cached values; per-pair locks survive so a running tabulate keeps exclusive access."""
        with self._lock:
            self._values.clear()
        self.logger.info("🧹 Cleared divergence table")


# Global table shared by curves, utilities and scoring
divergence_table = DivergenceTable()


def f_table(pair: DensityPair, r_max: int, settings: Optional[ThresholdSearchConfig] = None) -> List[float]:
    """Convenience wrapper around the shared DivergenceTable."""
    return divergence_table.tabulate(pair, r_max, settings)


class DetectionUtility(PiecewiseLinearUtility):
    """
    Concave piecewise-linear utility through the tabulated divergences.

    `raw` holds the table itself; `envelope_applied` is True when the upper
    concave envelope had to lift some tabulated point.
    """

    name = "detection"

    def __init__(self, raw: Sequence[float]):
        raw_arr = np.asarray(raw, dtype=float)
        xs = np.arange(len(raw_arr), dtype=float)
        envelope = PiecewiseLinearUtility.concave_envelope(xs, raw_arr)
        super().__init__(xs, envelope.ys)
        self.raw = raw_arr
        self.envelope_applied = bool(np.any(envelope.ys - raw_arr > ENVELOPE_TOL))

    def __repr__(self) -> str:
        return f"<DetectionUtility r_max={len(self.raw) - 1} envelope_applied={self.envelope_applied}>"


def detection_utility(pair: DensityPair, r_max: int, settings: Optional[ThresholdSearchConfig] = None) -> DetectionUtility:
    """
    Utility g(r) interpolating f(2^r) at integer rates, made concave, constant beyond r_max.

    Args:
        pair: H0/H1 densities
        r_max: Largest tabulated rate (>= 0)
        settings: Search settings (defaults from config)

    Returns:
        DetectionUtility with g(0) = 0
    """
    utility = DetectionUtility(f_table(pair, r_max, settings))
    if utility.envelope_applied:
        logger.info(f"🔧 Concave envelope lifted the divergence table of {pair!r}")
    return utility


def total_kl(
    pairs: Mapping[int, DensityPair],
    rates: Mapping[int, int],
    settings: Optional[ThresholdSearchConfig] = None,
) -> float:
    """
    Sum over sensors of f_j(2^{r_j}) from the exact table, no interpolation.

    Args:
        pairs: Densities per sensor
        rates: Nonnegative integral rate per sensor (missing sensors send 0)
        settings: Search settings (defaults from config)

    Returns:
        Total KL divergence in nats
    """
    total = 0.0
    for sensor, pair in pairs.items():
        r = rates.get(sensor, 0)
        if r < 0 or float(r) != int(r):
            raise ValueError(f"Rate of sensor {sensor} must be a nonnegative integer, got {r}")
        total += f_table(pair, int(r), settings)[int(r)]
    return float(total)
