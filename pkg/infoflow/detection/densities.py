# infoflow/detection/densities.py
# This file contains the parametric observation densities used under the two hypotheses
# Purpose: Provide Gaussian and exponential densities with fast closed-form pdf/cdf/quantiles, the hypothesis pair with its monotone likelihood ratio, and a factory that builds them from config specs. This is NOT for quantizer design (see quantizer.py).

"""
Scalar densities and hypothesis pairs with a monotone likelihood ratio.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Tuple, Type

import numpy as np
from pydantic import BaseModel, model_validator
from scipy import integrate, special

from ..utils.logger import get_logger
from ..utils.validation import ConfigurationError

NORMALIZATION_TOL = 1e-6


class Density(ABC):
    """Abstract base class for continuous scalar densities."""

    family: str = "density"

    @property
    @abstractmethod
    def params(self) -> Tuple[float, ...]:
        """Parameters identifying the density within its family."""

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """(lower, upper) end of the support."""

    @abstractmethod
    def logpdf(self, y):
        """Log density (-inf outside the support)."""

    @abstractmethod
    def cdf(self, y):
        """P(Y <= y)."""

    @abstractmethod
    def sf(self, y):
        """P(Y > y), accurate in the upper tail."""

    @abstractmethod
    def ppf(self, p):
        """Lower-tail quantile."""

    @abstractmethod
    def isf(self, p):
        """Upper-tail quantile."""

    @abstractmethod
    def median(self) -> float:
        """Median of the distribution."""

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    @property
    def key(self) -> Tuple:
        return (self.family, *self.params)

    def __eq__(self, other) -> bool:
        return isinstance(other, Density) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}{self.params}"


class Gaussian(Density):
    """N(mean, variance)."""

    family = "gaussian"

    def __init__(self, mean: float, variance: float):
        if not variance > 0:
            raise ConfigurationError(f"Gaussian variance must be positive, got {variance}")
        self.mean = float(mean)
        self.variance = float(variance)
        self.std = float(np.sqrt(variance))

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.mean, self.variance)

    @property
    def support(self) -> Tuple[float, float]:
        return (-np.inf, np.inf)

    def _z(self, y):
        return (np.asarray(y, dtype=float) - self.mean) / self.std

    def logpdf(self, y):
        z = self._z(y)
        return -0.5 * z ** 2 - np.log(self.std) - 0.5 * np.log(2 * np.pi)

    def cdf(self, y):
        return special.ndtr(self._z(y))

    def sf(self, y):
        return special.ndtr(-self._z(y))

    def ppf(self, p):
        return self.mean + self.std * special.ndtri(p)

    def isf(self, p):
        return self.mean - self.std * special.ndtri(p)

    def median(self) -> float:
        return self.mean


class Exponential(Density):
    """Exp(rate) on [0, inf)."""

    family = "exponential"

    def __init__(self, rate: float):
        if not rate > 0:
            raise ConfigurationError(f"Exponential rate must be positive, got {rate}")
        self.rate = float(rate)

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.rate,)

    @property
    def support(self) -> Tuple[float, float]:
        return (0.0, np.inf)

    def logpdf(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.where(y >= 0, np.log(self.rate) - self.rate * y, -np.inf)

    def cdf(self, y):
        y = np.maximum(np.asarray(y, dtype=float), 0.0)
        return -np.expm1(-self.rate * y)

    def sf(self, y):
        y = np.maximum(np.asarray(y, dtype=float), 0.0)
        return np.exp(-self.rate * y)

    def ppf(self, p):
        return -np.log1p(-np.asarray(p, dtype=float)) / self.rate

    def isf(self, p):
        return -np.log(np.asarray(p, dtype=float)) / self.rate

    def median(self) -> float:
        return float(np.log(2.0) / self.rate)


@dataclass(frozen=True)
class DensityPair:
    """
    Observation densities p0 (under H0) and p1 (under H1) of one sensor.

    Both must come from the same family, and Gaussian pairs must share a
    variance, so the likelihood ratio p1/p0 is monotone in y.
    """
    p0: Density
    p1: Density

    def __post_init__(self):
        if self.p0.family != self.p1.family:
            raise ConfigurationError(f"Densities must share a family, got {self.p0.family} and {self.p1.family}")
        if isinstance(self.p0, Gaussian) and not np.isclose(self.p0.variance, self.p1.variance):
            raise ConfigurationError(
                f"Gaussian pairs need equal variances for a monotone likelihood ratio, got {self.p0!r} and {self.p1!r}"
            )

    @property
    def key(self) -> Tuple:
        return (self.p0.key, self.p1.key)

    @property
    def support(self) -> Tuple[float, float]:
        return self.p0.support

    @property
    def log_lr_slope(self) -> float:
        """d/dy log L(y); constant for both supported families."""
        if isinstance(self.p0, Gaussian):
            return (self.p1.mean - self.p0.mean) / self.p0.variance
        return self.p0.rate - self.p1.rate

    @property
    def direction(self) -> int:
        """+1 if L increases with y, -1 if it decreases, 0 if constant."""
        return int(np.sign(self.log_lr_slope))

    def log_likelihood_ratio(self, y):
        """log p1(y) - log p0(y); NaN where both densities vanish."""
        with np.errstate(invalid="ignore"):
            out = self.p1.logpdf(y) - self.p0.logpdf(y)
        return float(out) if np.ndim(out) == 0 else out

    def y_of_lr(self, t):
        """
        Point where L(y) = t, clipped to the support.

        LR threshold 0 maps to the end of the support where L is smallest and
        infinity to the end where L is largest.
        """
        t = np.asarray(t, dtype=float)
        lo, hi = self.support
        slope = self.log_lr_slope
        if slope == 0:
            raise ValueError("Likelihood ratio is constant; thresholds have no y-space image")
        if isinstance(self.p0, Gaussian):
            offset = 0.5 * (self.p0.mean + self.p1.mean)
        else:
            offset = np.log(self.p1.rate / self.p0.rate) / (self.p1.rate - self.p0.rate)
        with np.errstate(divide="ignore"):
            y = offset + np.log(t) / slope
        out = np.clip(y, lo, hi)
        return float(out) if np.ndim(out) == 0 else out

    def lr_of_y(self, y):
        """L(y) for points inside the support."""
        with np.errstate(over="ignore"):
            out = np.exp(self.log_likelihood_ratio(y))
        return out

    def search_interval(self, tail_mass: float) -> Tuple[float, float]:
        """y-interval holding all but tail_mass of the mass under both hypotheses."""
        half = tail_mass / 2.0
        lo = min(float(self.p0.ppf(half)), float(self.p1.ppf(half)))
        hi = max(float(self.p0.isf(half)), float(self.p1.isf(half)))
        return max(lo, self.support[0]), min(hi, self.support[1])

    def interval_masses(self, a, b) -> Tuple[np.ndarray, np.ndarray]:
        """
        P_0 and P_1 masses of the y-intervals (a, b], vectorized.

        Lower-tail intervals use cdf differences and upper-tail intervals use
        sf differences so that tiny tail masses keep their relative accuracy.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return _interval_mass(self.p0, a, b), _interval_mass(self.p1, a, b)

    def kl_divergence(self) -> float:
        """Unquantized D(p1 || p0) in nats, the ceiling of every quantized divergence."""
        if isinstance(self.p0, Gaussian):
            return (self.p1.mean - self.p0.mean) ** 2 / (2.0 * self.p0.variance)
        ratio = self.p1.rate / self.p0.rate
        return float(np.log(ratio) + 1.0 / ratio - 1.0)

    def validate(self, tail_mass: float = 1e-8) -> List[str]:
        """Check numerically that both densities integrate to one over the working interval."""
        lo, hi = self.search_interval(tail_mass)
        violations = []
        for label, density in (("p0", self.p0), ("p1", self.p1)):
            mass, _ = integrate.quad(density.pdf, lo, hi, limit=200)
            if not (1.0 - tail_mass - NORMALIZATION_TOL <= mass <= 1.0 + NORMALIZATION_TOL):
                violations.append(f"{label}={density!r} integrates to {mass:.9f} on [{lo:.4g}, {hi:.4g}]")
        return violations

    def __repr__(self) -> str:
        return f"DensityPair(h0={self.p0!r}, h1={self.p1!r})"


def _interval_mass(density: Density, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    median = density.median()
    lower = density.cdf(b) - density.cdf(a)
    upper = density.sf(a) - density.sf(b)
    middle = 1.0 - density.cdf(a) - density.sf(b)
    mass = np.where(b <= median, lower, np.where(a >= median, upper, middle))
    return np.maximum(mass, 0.0)


class DensitySpec(BaseModel):
    """Config entry describing one density."""
    family: Literal["gaussian", "exponential"]
    mean: Optional[float] = None
    variance: Optional[float] = None
    rate: Optional[float] = None

    @model_validator(mode="after")
    def _check_params(self) -> "DensitySpec":
        if self.family == "gaussian":
            if self.mean is None:
                raise ValueError("gaussian density needs 'mean'")
            if self.variance is None:
                self.variance = 1.0
            if self.rate is not None:
                raise ValueError("gaussian density takes 'mean' and 'variance', not 'rate'")
        else:
            if self.rate is None:
                raise ValueError("exponential density needs 'rate'")
            if self.mean is not None or self.variance is not None:
                raise ValueError("exponential density takes only 'rate'")
        return self


class DensityPairSpec(BaseModel):
    """Config entry for one sensor: its density under H0 and under H1."""
    h0: DensitySpec
    h1: DensitySpec


class DensityFactory:
    """Factory for creating and caching density instances."""

    _families: Dict[str, Type[Density]] = {
        "gaussian": Gaussian,
        "exponential": Exponential,
    }

    _densities: Dict[Tuple, Density] = {}

    def __init__(self):
        self.logger = get_logger("detection.densities")

    def create_density(self, spec: DensitySpec) -> Density:
        """
        Create or retrieve a cached density.

        Raises:
            ConfigurationError: If the family is not supported
        """
        family = spec.family.lower()
        if family not in self._families:
            supported = ", ".join(self._families)
            raise ConfigurationError(f"Unsupported density family: '{family}'. Supported: {supported}")

        if family == "gaussian":
            params = (spec.mean, spec.variance)
        else:
            params = (spec.rate,)
        cache_key = (family, *params)
        if cache_key not in self._densities:
            self._densities[cache_key] = self._families[family](*params)
            self.logger.debug(f"✅ Created {family} density {params}")
        return self._densities[cache_key]

    def create_pair(self, spec: DensityPairSpec) -> DensityPair:
        """Build and validate the H0/H1 pair of one sensor."""
        pair = DensityPair(self.create_density(spec.h0), self.create_density(spec.h1))
        violations = pair.validate()
        if violations:
            raise ConfigurationError(f"Invalid density pair {pair!r}: " + "; ".join(violations))
        return pair

    def get_available_families(self) -> List[str]:
        return list(self._families)

    def clear_cache(self) -> None:
        self._densities.clear()
        self.logger.info("🧹 Cleared density cache")
