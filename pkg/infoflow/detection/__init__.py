# infoflow/detection/__init__.py
# This file marks the detection directory as a Python package
# Purpose: Expose densities, likelihood-ratio quantizers and detection utilities. This is NOT for estimation.

from .densities import DensityFactory, DensityPair, DensityPairSpec, DensitySpec, Exponential, Gaussian
from .quantizer import (
    OptimalQuantizer,
    QuantizerOutputDistributions,
    ThresholdVector,
    cell_masses,
    kl_divergence,
    likelihood_ratio,
    optimize_thresholds,
)
from .utility import DetectionUtility, divergence_table, detection_utility, f_table, total_kl

__all__ = [
    "DensityFactory",
    "DensityPair",
    "DensityPairSpec",
    "DensitySpec",
    "Exponential",
    "Gaussian",
    "OptimalQuantizer",
    "QuantizerOutputDistributions",
    "ThresholdVector",
    "cell_masses",
    "kl_divergence",
    "likelihood_ratio",
    "optimize_thresholds",
    "DetectionUtility",
    "divergence_table",
    "detection_utility",
    "f_table",
    "total_kl",
]
