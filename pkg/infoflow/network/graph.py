# infoflow/network/graph.py
# This file contains the capacitated relay network and rate assignment types
# Purpose: Represent sensors, relays, fusion center and integral edge capacities; validate invariants; (de)serialize networks; check rate assignments against capacity and conservation. This is NOT for flow computation (see flow.py) or random generation (see generator.py).

"""
Capacitated relay network and antisymmetric rate assignments.
"""
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping, Tuple, Union

import networkx as nx
import yaml

from ..utils.validation import ConfigurationError, OutputError

NodeId = int
EdgeKey = Tuple[NodeId, NodeId]

CONSERVATION_TOL = 1e-9


@dataclass(frozen=True)
class Edge:
    """Undirected edge with integral capacity (bits per use, either way)."""
    u: NodeId
    v: NodeId
    capacity: int

    @property
    def key(self) -> EdgeKey:
        return (self.u, self.v)


@dataclass(frozen=True)
class Network:
    """
    Undirected capacitated graph with sensors, relays and one fusion center.

    Construction never raises on invariant violations; call validate() to get
    the diagnostics. Flow operations require a valid network.
    """
    nodes: FrozenSet[NodeId]
    edges: Tuple[Edge, ...]
    sensors: Tuple[NodeId, ...]
    fusion_center: NodeId

    @property
    def relays(self) -> FrozenSet[NodeId]:
        return self.nodes - set(self.sensors) - {self.fusion_center}

    @cached_property
    def graph(self) -> nx.Graph:
        """networkx view with a 'capacity' attribute on every edge."""
        g = nx.Graph()
        g.add_nodes_from(sorted(self.nodes))
        for edge in self.edges:
            g.add_edge(edge.u, edge.v, capacity=edge.capacity)
        return g

    def capacity(self, u: NodeId, v: NodeId) -> int:
        """Capacity of edge {u, v}; 0 when the edge does not exist."""
        data = self.graph.get_edge_data(u, v)
        return data["capacity"] if data else 0

    def incident_capacity(self, node: NodeId) -> int:
        """Sum of capacities of the edges incident to node."""
        return sum(edge.capacity for edge in self.edges if node in (edge.u, edge.v))

    def validate(self) -> List[str]:
        """Return one diagnostic per violated invariant; empty iff the network is valid."""
        violations: List[str] = []

        if len(set(self.sensors)) != len(self.sensors):
            violations.append(f"duplicate sensor ids in {list(self.sensors)}")
        for s in self.sensors:
            if s not in self.nodes:
                violations.append(f"sensor {s} is not in the node set")
        if self.fusion_center not in self.nodes:
            violations.append(f"fusion center {self.fusion_center} is not in the node set")
        if self.fusion_center in self.sensors:
            violations.append(f"fusion center {self.fusion_center} is also listed as a sensor")

        seen = set()
        for edge in self.edges:
            label = f"edge ({edge.u}, {edge.v})"
            if edge.u == edge.v:
                violations.append(f"{label} is a self-loop")
            for endpoint in (edge.u, edge.v):
                if endpoint not in self.nodes:
                    violations.append(f"{label} references unknown node {endpoint}")
            if isinstance(edge.capacity, bool) or not isinstance(edge.capacity, int):
                violations.append(f"{label} has non-integral capacity {edge.capacity!r}")
            elif edge.capacity < 0:
                violations.append(f"{label} has negative capacity {edge.capacity}")
            pair = frozenset((edge.u, edge.v))
            if pair in seen:
                violations.append(f"{label} duplicates an existing edge")
            seen.add(pair)

        return violations

    def to_dict(self) -> Dict[str, Any]:
        """Serializable form with the fixed field names."""
        return {
            "nodes": sorted(self.nodes),
            "edges": [{"u": e.u, "v": e.v, "capacity": e.capacity} for e in self.edges],
            "sensors": list(self.sensors),
            "fusion_center": self.fusion_center,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Network":
        try:
            return cls(
                nodes=frozenset(data["nodes"]),
                edges=tuple(Edge(e["u"], e["v"], e["capacity"]) for e in data["edges"]),
                sensors=tuple(data["sensors"]),
                fusion_center=data["fusion_center"],
            )
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"Malformed network document: missing or invalid field {e}")

    def save(self, path: Union[str, Path]) -> None:
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                yaml.safe_dump(self.to_dict(), f, sort_keys=False)
        except OSError as e:
            raise OutputError(f"Could not write network to '{path}': {e}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Network":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except OSError as e:
            raise ConfigurationError(f"Could not read network file '{path}': {e}")
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in network file '{path}': {e}")
        return cls.from_dict(data or {})


@dataclass(frozen=True)
class RateAssignment:
    """
    Antisymmetric edge rates stored once per edge in the network's orientation.

    rates[(u, v)] is r_uv for the edge as listed in Network.edges; r_vu is its
    negation. sensor_rates[s] is the net outflow of sensor s.
    """
    rates: Dict[EdgeKey, float]
    sensor_rates: Dict[NodeId, float] = field(default_factory=dict)

    @classmethod
    def from_edge_rates(cls, network: Network, rates: Mapping[EdgeKey, float]) -> "RateAssignment":
        """Build an assignment and derive sensor rates from the edge rates."""
        full = {edge.key: rates.get(edge.key, 0.0) for edge in network.edges}
        outflow = {s: 0.0 for s in network.sensors}
        for (u, v), r in full.items():
            if u in outflow:
                outflow[u] += r
            if v in outflow:
                outflow[v] -= r
        return cls(rates=full, sensor_rates=outflow)

    @classmethod
    def zero(cls, network: Network) -> "RateAssignment":
        return cls.from_edge_rates(network, {})

    def rate(self, u: NodeId, v: NodeId) -> float:
        """r_uv with antisymmetry applied."""
        if (u, v) in self.rates:
            return self.rates[(u, v)]
        if (v, u) in self.rates:
            return -self.rates[(v, u)]
        return 0.0

    def net_outflow(self, node: NodeId) -> float:
        total = 0.0
        for (u, v), r in self.rates.items():
            if u == node:
                total += r
            elif v == node:
                total -= r
        return total

    @property
    def total(self) -> float:
        return sum(self.sensor_rates.values())

    @property
    def is_integral(self) -> bool:
        return all(float(r).is_integer() for r in self.rates.values())

    def check(self, network: Network, tol: float = CONSERVATION_TOL) -> List[str]:
        """Return violations of capacity, conservation, sensor-rate and sign invariants."""
        violations: List[str] = []
        for edge in network.edges:
            r = self.rates.get(edge.key, 0.0)
            if abs(r) > edge.capacity:
                violations.append(f"edge ({edge.u}, {edge.v}) rate {r} exceeds capacity {edge.capacity}")

        unknown = set(self.rates) - {edge.key for edge in network.edges}
        for key in sorted(unknown):
            violations.append(f"rate on unknown edge {key}")

        for node in sorted(network.relays):
            flow = self.net_outflow(node)
            if abs(flow) > tol:
                violations.append(f"relay {node} violates conservation (net outflow {flow})")

        for s in network.sensors:
            derived = self.net_outflow(s)
            recorded = self.sensor_rates.get(s, 0.0)
            if abs(derived - recorded) > tol:
                violations.append(f"sensor {s} rate {recorded} differs from edge outflow {derived}")
            if derived < -tol:
                violations.append(f"sensor {s} has negative rate {derived}")
        return violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edges": [{"u": u, "v": v, "rate": r} for (u, v), r in self.rates.items()],
            "sensor_rates": {s: r for s, r in self.sensor_rates.items()},
        }
