# infoflow/num/utility.py
# This file contains the concave, nondecreasing per-sensor utility functions of a sensor's rate
# Purpose: Provide a standard utility interface (value, right supergradient, domain cap) with concrete linear, exponential-decay and piecewise-linear forms, plus concavity/monotonicity checks. This is NOT for solving the allocation problem (see solver.py).

"""
Utility functions g_s(r) of a sensor's rate r (bits per use).
"""
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..utils.validation import NonConcaveUtilityError

SLOPE_TOL = 1e-9


class UtilityFunction(ABC):
    """Abstract base class for concave, nondecreasing utilities."""

    name: str = "utility"

    def __init__(self, domain_max: Optional[float] = None):
        self.domain_max = domain_max

    @abstractmethod
    def _value(self, r: np.ndarray) -> np.ndarray:
        """Utility on the native domain."""

    @abstractmethod
    def _slope(self, r: np.ndarray) -> np.ndarray:
        """Right derivative on the native domain."""

    def _clip(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.domain_max is not None:
            r = np.minimum(r, self.domain_max)
        return r

    def value(self, r):
        """g(r), extended constantly beyond domain_max."""
        out = self._value(self._clip(r))
        return float(out) if np.ndim(out) == 0 else out

    def supergradient(self, r):
        """Right slope of g at r (0 at and beyond domain_max)."""
        r_arr = np.asarray(r, dtype=float)
        out = self._slope(self._clip(r_arr))
        if self.domain_max is not None:
            out = np.where(r_arr >= self.domain_max, 0.0, out)
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, r):
        return self.value(r)

    def validate(self, rate_bound: float, points: int = 257) -> None:
        """
        Numerically check monotonicity and concavity on [0, rate_bound].

        Raises:
            NonConcaveUtilityError: if a slope is negative or increases by more than 1e-9
        """
        grid = np.linspace(0.0, max(rate_bound, 1.0), points)
        slopes = np.asarray(self.supergradient(grid), dtype=float)
        if np.any(slopes < -SLOPE_TOL):
            raise NonConcaveUtilityError(f"{self!r} is decreasing somewhere on [0, {rate_bound}]")
        if np.any(np.diff(slopes) > SLOPE_TOL):
            raise NonConcaveUtilityError(f"{self!r} has an increasing slope on [0, {rate_bound}]")

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}>"


class LinearUtility(UtilityFunction):
    """g(r) = slope * r + intercept; slope 0 gives a constant utility."""

    name = "linear"

    def __init__(self, slope: float = 1.0, intercept: float = 0.0, domain_max: Optional[float] = None):
        super().__init__(domain_max)
        self.slope = float(slope)
        self.intercept = float(intercept)

    def _value(self, r):
        return self.slope * r + self.intercept

    def _slope(self, r):
        return np.full_like(r, self.slope, dtype=float)

    def __repr__(self) -> str:
        return f"<LinearUtility slope={self.slope} intercept={self.intercept}>"


class ExponentialUtility(UtilityFunction):
    """g(r) = -scale * 4^(-r): quantization-variance reduction of a uniform quantizer."""

    name = "exponential"

    def __init__(self, scale: float, domain_max: Optional[float] = None):
        if scale < 0:
            raise NonConcaveUtilityError(f"Exponential utility needs scale >= 0, got {scale}")
        super().__init__(domain_max)
        self.scale = float(scale)

    def _value(self, r):
        return -self.scale * np.power(4.0, -r)

    def _slope(self, r):
        return self.scale * np.log(4.0) * np.power(4.0, -r)

    def __repr__(self) -> str:
        return f"<ExponentialUtility scale={self.scale:.6g}>"


class PiecewiseLinearUtility(UtilityFunction):
    """
    Linear interpolation through (x_k, y_k), constant beyond the last breakpoint.

    Breakpoints must start at 0 and increase strictly; the segments must have
    nonincreasing, nonnegative slopes.
    """

    name = "piecewise"

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        xs_arr = np.asarray(xs, dtype=float)
        ys_arr = np.asarray(ys, dtype=float)
        if xs_arr.ndim != 1 or xs_arr.shape != ys_arr.shape or len(xs_arr) < 1:
            raise NonConcaveUtilityError("Breakpoints and values must be 1-D arrays of equal length")
        if xs_arr[0] != 0 or np.any(np.diff(xs_arr) <= 0):
            raise NonConcaveUtilityError(f"Breakpoints must start at 0 and increase: {list(xs_arr)}")
        super().__init__(domain_max=float(xs_arr[-1]))
        self.xs = xs_arr
        self.ys = ys_arr
        self.slopes = np.diff(ys_arr) / np.diff(xs_arr) if len(xs_arr) > 1 else np.zeros(0)
        if np.any(self.slopes < -SLOPE_TOL) or np.any(np.diff(self.slopes) > SLOPE_TOL):
            raise NonConcaveUtilityError(f"Piecewise-linear utility is not concave nondecreasing: slopes {list(self.slopes)}")

    @classmethod
    def concave_envelope(cls, xs: Sequence[float], ys: Sequence[float]) -> "PiecewiseLinearUtility":
        """Upper concave envelope of the running maximum of the points."""
        hx, hy = upper_concave_envelope(xs, np.maximum.accumulate(np.asarray(ys, dtype=float)))
        return cls(xs, np.interp(xs, hx, hy))

    def _value(self, r):
        return np.interp(r, self.xs, self.ys)

    def _slope(self, r):
        if len(self.slopes) == 0:
            return np.zeros_like(r, dtype=float)
        # right slope: segment k covers [x_k, x_{k+1})
        index = np.searchsorted(self.xs, r, side="right") - 1
        index = np.clip(index, 0, len(self.slopes) - 1)
        return self.slopes[index]

    def segments(self) -> List[Tuple[float, float]]:
        """(length, slope) of every segment in order."""
        return list(zip(np.diff(self.xs).tolist(), self.slopes.tolist()))

    def validate(self, rate_bound: float, points: int = 257) -> None:
        # slopes were checked at construction
        return None

    def __repr__(self) -> str:
        return f"<PiecewiseLinearUtility points={len(self.xs)}>"


def upper_concave_envelope(xs: Sequence[float], ys: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vertices of the smallest concave function dominating the points (monotone chain).

    Args:
        xs: Strictly increasing abscissae
        ys: Values

    Returns:
        (hull_xs, hull_ys) - a subset of the input points
    """
    hull: List[Tuple[float, float]] = []
    for x, y in zip(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or below the chord
            if (y2 - y1) * (x - x1) <= (y - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x, y))
    hx, hy = zip(*hull)
    return np.asarray(hx), np.asarray(hy)
