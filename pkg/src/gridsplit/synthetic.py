"""Reproducible grid-shaped random networks for tests and benchmarks.

Topology is a random recursive spanning tree (vertex i attaches to a
uniformly random earlier vertex) plus chord edges, a fraction of which are
duplicated as parallel lines. A fraction of tree leaves can be reserved so
no chord touches them, guaranteeing degree-1 pendants whose tree edge stays
a splitting branch. Electrical parameters are drawn uniformly: reactance in
[0.01, 0.2] pu, ratings in [50, 500] MW, voltage levels from
{10, 35, 110, 220, 500} kV; injections are balanced to zero mean.

All randomness comes from numpy's PCG64 generator seeded with ``spec.seed``,
so a given spec reproduces the same grid (and the same serialized bytes)
on every run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid_model import Branch, Bus, Grid

VOLTAGE_LEVELS_KV = (10.0, 35.0, 110.0, 220.0, 500.0)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic network."""

    seed: int
    buses: int
    extra_edges: int = 0
    parallel_fraction: float = 0.0
    pendant_fraction: float = 0.0
    injection_scale: float = 100.0

    def validate(self) -> None:
        if self.buses < 2:
            raise ValueError("buses must be >= 2")
        if self.extra_edges < 0:
            raise ValueError("extra_edges must be >= 0")
        for name in ("parallel_fraction", "pendant_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.injection_scale < 0.0:
            raise ValueError("injection_scale must be >= 0")


def generate(spec: SynthSpec) -> Grid:
    """Build a connected random multigraph grid; pure function of the spec."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.buses

    # spanning tree: vertex i in 1..n-1 hangs off a random earlier vertex
    parents = rng.integers(0, np.arange(1, n))
    edges = [(int(parents[i - 1]), i) for i in range(1, n)]

    degree = np.zeros(n, dtype=np.int64)
    for f, t in edges:
        degree[f] += 1
        degree[t] += 1
    leaves = np.flatnonzero(degree == 1)

    reserved = np.empty(0, dtype=np.int64)
    if spec.pendant_fraction > 0.0 and leaves.size:
        n_reserved = int(round(spec.pendant_fraction * leaves.size))
        n_reserved = min(n_reserved, max(0, n - 2))  # keep >= 2 attachable vertices
        if n_reserved:
            reserved = np.sort(rng.choice(leaves, size=n_reserved, replace=False))
    attachable = np.setdiff1d(np.arange(n), reserved)

    chords: list[tuple[int, int]] = []
    for _ in range(spec.extra_edges):
        a = int(rng.choice(attachable))
        b = int(rng.choice(attachable))
        while b == a:
            b = int(rng.choice(attachable))
        chords.append((a, b))
    edges.extend(chords)

    n_parallel = int(round(spec.parallel_fraction * len(chords)))
    if n_parallel:
        twin_idx = np.sort(rng.choice(len(chords), size=n_parallel, replace=False))
        edges.extend(chords[int(i)] for i in twin_idx)

    m = len(edges)
    reactances = rng.uniform(0.01, 0.2, size=m)
    ratings = rng.uniform(50.0, 500.0, size=m)
    branch_kv = rng.choice(VOLTAGE_LEVELS_KV, size=m)
    bus_kv = rng.choice(VOLTAGE_LEVELS_KV, size=n)
    injections = rng.uniform(-1.0, 1.0, size=n) * spec.injection_scale
    injections -= injections.mean()

    buses = [Bus(i + 1, float(injections[i]), float(bus_kv[i])) for i in range(n)]
    branches = [
        Branch(bid, f, t, float(reactances[bid]), float(ratings[bid]),
               1.0, float(branch_kv[bid]))
        for bid, (f, t) in enumerate(edges)
    ]
    return Grid(buses=buses, branches=branches, slack=0)
