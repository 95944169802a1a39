# infoflow/network/__init__.py
# This file marks the network directory as a Python package
# Purpose: Expose the network types, the layered generator and the flow computations. This is NOT for utility maximization.

from .graph import Edge, Network, RateAssignment
from .generator import LayeredGraphSpec, generate_layered
from .flow import FeasibilityResult, feasible_rates, headroom, max_flow, priority_flow, priority_rates

__all__ = [
    "Edge",
    "Network",
    "RateAssignment",
    "LayeredGraphSpec",
    "generate_layered",
    "FeasibilityResult",
    "feasible_rates",
    "headroom",
    "max_flow",
    "priority_flow",
    "priority_rates",
]
