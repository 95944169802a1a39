# infoflow/network/generator.py
# This file contains the layered random network generator used by the experiments
# Purpose: Build four-layer sensor/relay networks with random K-fanout wiring and uniform integral capacities, deterministically from a seed. This is NOT for loading networks from files (see graph.py).

"""
Layered random graph generator.
"""
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .graph import Edge, Network
from ..utils.logger import get_logger

logger = get_logger("network.generator")


class LayeredGraphSpec(BaseModel):
    """Parameters of a sensors -> relays -> relays -> relays -> fusion center network."""
    layer_sizes: Tuple[int, int, int, int]
    fanout: int = Field(ge=1)
    capacity_range: Tuple[int, int] = (1, 15)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_invariants(self) -> "LayeredGraphSpec":
        if any(size < 1 for size in self.layer_sizes):
            raise ValueError(f"layer sizes must be positive, got {self.layer_sizes}")
        if any(self.fanout > size for size in self.layer_sizes[1:]):
            raise ValueError(
                f"fanout K={self.fanout} exceeds a downstream layer size in {self.layer_sizes}"
            )
        low, high = self.capacity_range
        if low < 1 or high < low:
            raise ValueError(f"capacity range must satisfy 1 <= low <= high, got {self.capacity_range}")
        return self


def generate_layered(spec: LayeredGraphSpec) -> Network:
    """
    Generate a layered network.

    Node ids are consecutive integers: layer 1 (sensors) first, then layers
    2-4, then the fusion center. Every layer-1 node picks K distinct partners
    in layer 2; every layer-2 node that received a link picks K distinct
    partners in layer 3; likewise layer 3 to layer 4. Every layer-4 node links
    to the fusion center. Capacities are i.i.d. uniform over capacity_range.

    Args:
        spec: Generator parameters

    Returns:
        Generated network
    """
    rng = np.random.default_rng(spec.seed)
    low, high = spec.capacity_range

    layers: List[List[int]] = []
    next_id = 0
    for size in spec.layer_sizes:
        layers.append(list(range(next_id, next_id + size)))
        next_id += size
    fusion_center = next_id

    pairs: List[Tuple[int, int]] = []
    active = layers[0]
    for downstream in layers[1:]:
        reached = set()
        for node in active:
            partners = rng.choice(len(downstream), size=spec.fanout, replace=False)
            for index in sorted(partners):
                pairs.append((node, downstream[index]))
                reached.add(downstream[index])
        active = sorted(reached)

    for node in layers[-1]:
        pairs.append((node, fusion_center))

    capacities = rng.integers(low, high + 1, size=len(pairs))
    edges = tuple(Edge(u, v, int(c)) for (u, v), c in zip(pairs, capacities))

    network = Network(
        nodes=frozenset(range(fusion_center + 1)),
        edges=edges,
        sensors=tuple(layers[0]),
        fusion_center=fusion_center,
    )
    logger.debug(
        f"🕸️ Generated layered network: {len(network.nodes)} nodes, {len(edges)} edges, seed={spec.seed}"
    )
    return network
