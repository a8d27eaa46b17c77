"""Shared fixtures and independent reference helpers for the test suite."""

from __future__ import annotations

from collections import deque

import numpy as np
import pytest

from gridsplit import (
    Branch,
    Grid,
    SynthSpec,
    build_adjacency,
    build_base_case,
    build_fixture_f1,
    generate,
)


@pytest.fixture(scope="session")
def f1():
    grid = build_fixture_f1()
    return grid, build_adjacency(grid)


def random_multigraph(seed: int, rng: np.random.Generator | None = None,
                      max_buses: int = 200):
    """One random connected multigraph: |V| <= max_buses, edge factor 1..3,
    10% of chords duplicated as parallel lines."""
    if rng is None:
        rng = np.random.default_rng(seed)
    n = int(rng.integers(5, max_buses + 1))
    factor = float(rng.uniform(1.0, 3.0))
    extra = max(0, int(round(n * factor)) - (n - 1))
    return generate(SynthSpec(seed=seed, buses=n, extra_edges=extra,
                              parallel_fraction=0.1))


def count_components(grid, removed: int = -1) -> int:
    """Textbook queue BFS component count, independent of the engines."""
    n = grid.n_buses
    lists = [[] for _ in range(n)]
    for b in range(grid.n_branches):
        if b == removed:
            continue
        f, t = int(grid.from_idx[b]), int(grid.to_idx[b])
        lists[f].append(t)
        lists[t].append(f)
    seen = [False] * n
    components = 0
    for start in range(n):
        if seen[start]:
            continue
        components += 1
        seen[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in lists[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return components


def external_pairs(grid, report) -> set[tuple[int, int]]:
    """Bridge set as unordered external (from, to) bus-id pairs."""
    pairs = set()
    for b in report.bridge_ids:
        f = grid.external_id(int(grid.from_idx[b]))
        t = grid.external_id(int(grid.to_idx[b]))
        pairs.add((min(f, t), max(f, t)))
    return pairs


def rebuild_flows(grid: Grid, removed: int) -> np.ndarray:
    """Independent oracle: drop the branch, rebuild B' from scratch, re-solve."""
    survivors = [br for br in grid.branches if br.id != removed]
    renumbered = [Branch(i, br.from_bus, br.to_bus, br.reactance_x, br.rating,
                         br.weight, br.voltage_kv) for i, br in enumerate(survivors)]
    reduced = Grid(buses=grid.buses, branches=renumbered, slack=grid.slack)
    base = build_base_case(reduced)
    flows = np.zeros(grid.n_branches)
    flows[[br.id for br in survivors]] = base.base_flows
    return flows


def nodal_imbalance(grid: Grid, flows: np.ndarray, outaged: int) -> float:
    """Max |injection - net outgoing flow| over non-slack buses."""
    in_service = np.ones(grid.n_branches, dtype=bool)
    in_service[outaged] = False
    net = np.zeros(grid.n_buses)
    np.add.at(net, grid.from_idx[in_service], flows[in_service])
    np.add.at(net, grid.to_idx[in_service], -flows[in_service])
    residual = grid.injections - net
    residual[grid.slack] = 0.0
    return float(np.abs(residual).max())
