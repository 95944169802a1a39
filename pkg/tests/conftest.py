# tests/conftest.py
# This file contains shared pytest fixtures
# Purpose: Provide small hand-checked networks, a brute-force min-cut oracle and an isolated application config. This is NOT for test cases.

import itertools
from pathlib import Path
from typing import Iterable

import pytest

from infoflow.network.graph import Edge, Network
from infoflow.utils.config_loader import CONFIG_ENV_VAR, ConfigLoader

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def diamond() -> Network:
    """
    Two sensors behind a shared relay.

    Sensor 0 reaches the fusion center 3 directly (capacity 1) and via relay 2
    (capacity 3); sensor 1 only via relay 2 (capacity 3). The relay link to
    the fusion center has capacity 4, so the min cut is 5.
    """
    return Network(
        nodes=frozenset({0, 1, 2, 3}),
        edges=(Edge(0, 2, 3), Edge(1, 2, 3), Edge(0, 3, 1), Edge(2, 3, 4)),
        sensors=(0, 1),
        fusion_center=3,
    )


@pytest.fixture
def path_network() -> Network:
    """One sensor, one relay, bottleneck capacity 3."""
    return Network(
        nodes=frozenset({0, 1, 2}),
        edges=(Edge(0, 1, 5), Edge(1, 2, 3)),
        sensors=(0,),
        fusion_center=2,
    )


def brute_force_min_cut(network: Network, sensors: Iterable[int] = None) -> int:
    """
    Min cut between a super source feeding `sensors` (uncapped) and the fusion center.

    Enumerates every node set S on the source side; exponential, so only for
    small networks.
    """
    sensors = set(network.sensors if sensors is None else sensors)
    others = sorted(network.nodes - {network.fusion_center})
    best = None
    for size in range(len(others) + 1):
        for subset in itertools.combinations(others, size):
            side = set(subset)
            # uncapped source arcs: a sensor left outside S costs its incident capacity
            cost = sum(network.incident_capacity(s) for s in sensors if s not in side)
            for edge in network.edges:
                if (edge.u in side) != (edge.v in side):
                    cost += edge.capacity
            best = cost if best is None else min(best, cost)
    return best


@pytest.fixture
def min_cut_oracle():
    return brute_force_min_cut


@pytest.fixture
def app_config(tmp_path, monkeypatch):
    """
    Point the config singleton at a temporary config.yml.

    Yields a writer: call it with YAML text, then the singleton is reloaded.
    The repo config is restored afterwards.
    """
    path = tmp_path / "config.yml"
    path.write_text("app_name: test\n", encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))

    def write(text: str):
        path.write_text(text, encoding="utf-8")
        ConfigLoader().reload()
        return ConfigLoader().config

    write("app_name: test\n")
    yield write
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    ConfigLoader().reload()
