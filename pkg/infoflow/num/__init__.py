# infoflow/num/__init__.py
# This file marks the num directory as a Python package
# Purpose: Expose the utility functions and the network utility maximization solver. This is NOT for building task-specific utilities.

from .utility import ExponentialUtility, LinearUtility, PiecewiseLinearUtility, UtilityFunction
from .solver import NumSolution, RelaxationResult, round_rates, solve, solve_relaxation, total_utility

__all__ = [
    "UtilityFunction",
    "LinearUtility",
    "ExponentialUtility",
    "PiecewiseLinearUtility",
    "NumSolution",
    "RelaxationResult",
    "round_rates",
    "solve",
    "solve_relaxation",
    "total_utility",
]
