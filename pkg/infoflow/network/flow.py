# infoflow/network/flow.py
# This file contains the flow computations on the capacitated relay network
# Purpose: Compute the max-flow baseline, priority-ordered (lexicographic) sensor rates, demand feasibility with integral witnesses, and per-sensor headroom. This is NOT for utility maximization (see num/solver.py).

"""
Max flow, priority flows and rate feasibility over a super-source construction.

Every undirected edge {u, v} becomes two arcs of capacity c_uv. A super source
feeds each sensor through an arc whose capacity is either the sensor's demand
or, when uncapped, the sum of the sensor's incident capacities. Flow is
computed with networkx's Edmonds-Karp (shortest augmenting paths), so
integral capacities give integral flows.
"""
from functools import lru_cache
from typing import Dict, Mapping, NamedTuple, Optional, Sequence

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .graph import Network, NodeId, RateAssignment
from ..utils.logger import get_logger
from ..utils.validation import require_valid

logger = get_logger("network.flow")

SUPER_SOURCE = "__super_source__"
FEASIBILITY_TOL = 1e-9


class FeasibilityResult(NamedTuple):
    """Outcome of a demand feasibility check."""
    feasible: bool
    witness: Optional[RateAssignment]


@lru_cache(maxsize=64)
def _base_digraph(network: Network) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(sorted(network.nodes))
    g.add_node(SUPER_SOURCE)
    for edge in network.edges:
        g.add_edge(edge.u, edge.v, capacity=edge.capacity)
        g.add_edge(edge.v, edge.u, capacity=edge.capacity)
    for s in network.sensors:
        g.add_edge(SUPER_SOURCE, s, capacity=network.incident_capacity(s))
    return g


def _with_source_caps(network: Network, source_caps: Mapping[NodeId, float]) -> nx.DiGraph:
    g = _base_digraph(network).copy()
    for s in network.sensors:
        if s in source_caps:
            g[SUPER_SOURCE][s]["capacity"] = source_caps[s]
        else:
            g[SUPER_SOURCE][s]["capacity"] = 0
    return g


def _uncapped(network: Network, sensors: Sequence[NodeId]) -> Dict[NodeId, float]:
    return {s: network.incident_capacity(s) for s in sensors}


def _flow_value(network: Network, source_caps: Mapping[NodeId, float]) -> float:
    if not source_caps:
        return 0
    g = _with_source_caps(network, source_caps)
    return nx.maximum_flow_value(g, SUPER_SOURCE, network.fusion_center, flow_func=edmonds_karp)


def _flow_assignment(network: Network, source_caps: Mapping[NodeId, float]) -> RateAssignment:
    g = _with_source_caps(network, source_caps)
    _, flow = nx.maximum_flow(g, SUPER_SOURCE, network.fusion_center, flow_func=edmonds_karp)
    rates = {edge.key: flow[edge.u][edge.v] - flow[edge.v][edge.u] for edge in network.edges}
    return RateAssignment.from_edge_rates(network, rates)


def priority_rates(network: Network, order: Sequence[NodeId]) -> Dict[NodeId, int]:
    """
    Sensor rates of the max flow that serves sensors in the given priority order.

    Sensor order[k] receives M_k - M_{k-1}, where M_k is the max flow value
    when only order[0..k] may send. This equals augmenting shortest paths
    sensor by sensor, and it maximizes every prefix sum simultaneously, which
    makes it the exact maximizer of any linear objective whose weights are
    nonincreasing along the order.

    Args:
        network: Valid network
        order: Sensors in decreasing priority

    Returns:
        Integral rate per sensor
    """
    rates: Dict[NodeId, int] = {s: 0 for s in network.sensors}
    previous = 0
    for k in range(len(order)):
        value = _flow_value(network, _uncapped(network, order[: k + 1]))
        rates[order[k]] = int(round(value - previous))
        previous = value
    return rates


def priority_flow(network: Network, order: Sequence[NodeId]) -> RateAssignment:
    """Integral RateAssignment realizing priority_rates for the given order."""
    rates = priority_rates(network, order)
    assignment = _flow_assignment(network, rates)
    return _as_integral(network, assignment)


def _as_integral(network: Network, assignment: RateAssignment) -> RateAssignment:
    return RateAssignment.from_edge_rates(
        network, {key: int(round(r)) for key, r in assignment.rates.items()}
    )


def max_flow(network: Network) -> RateAssignment:
    """
    Max-flow baseline: maximize the total rate delivered to the fusion center.

    The per-sensor split follows sensor id order (lower ids first), which
    makes the baseline reproducible.

    Args:
        network: Network to route through

    Returns:
        Integral RateAssignment whose total equals the min-cut value
    """
    require_valid(network.validate())
    assignment = priority_flow(network, sorted(network.sensors))
    logger.debug(f"🚰 Max flow total={assignment.total}")
    return assignment


def feasible_rates(network: Network, demands: Mapping[NodeId, float]) -> FeasibilityResult:
    """
    Check whether every sensor can send at least its demand simultaneously.

    Args:
        network: Network to route through
        demands: Nonnegative demand per sensor (missing sensors demand 0)

    Returns:
        FeasibilityResult; on success the witness achieves exactly the demands
        and is integral whenever the demands are integers
    """
    require_valid(network.validate())
    for s, d in demands.items():
        if d < 0:
            raise ValueError(f"Demand for sensor {s} is negative: {d}")
        if s not in network.sensors:
            raise ValueError(f"Demand given for unknown sensor {s}")

    caps = {s: demands.get(s, 0) for s in network.sensors}
    required = sum(caps.values())
    if required == 0:
        return FeasibilityResult(True, RateAssignment.zero(network))

    assignment = _flow_assignment(network, caps)
    if assignment.total < required - FEASIBILITY_TOL:
        return FeasibilityResult(False, None)

    if all(float(d).is_integer() for d in caps.values()):
        assignment = _as_integral(network, assignment)
    return FeasibilityResult(True, assignment)


def headroom(network: Network, current: Mapping[NodeId, float], sensor: NodeId) -> float:
    """
    Largest increase of one sensor's rate that keeps `current` feasible.

    Computed as the max flow with every other sensor capped at its current
    rate and `sensor` uncapped, minus the current total.
    """
    caps = {s: current.get(s, 0) for s in network.sensors}
    caps[sensor] = network.incident_capacity(sensor)
    value = _flow_value(network, caps)
    return max(0.0, value - sum(current.get(s, 0) for s in network.sensors))
