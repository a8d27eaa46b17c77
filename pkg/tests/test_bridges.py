"""Bridge engines: oracle, one-pass Tarjan, per-edge Tarjan, dual-frontier BFS."""

from __future__ import annotations

import numpy as np
import pytest

from gridsplit import (
    Branch,
    Bus,
    DisconnectedGridError,
    Grid,
    bfs_cc,
    build_adjacency,
    build_dense_adjacency,
    build_fixture_f1,
    oracle_bridges,
    parallel_bridges,
    per_edge_tarjan_bridges,
    tarjan_bridges,
    tarjan_sweep,
)
from gridsplit.bridges import DualFrontierState, _dual_frontier_cc
from conftest import count_components, external_pairs, random_multigraph


def make_grid(n_buses: int, edges: list[tuple[int, int]]) -> Grid:
    buses = [Bus(i + 1, 0.0) for i in range(n_buses)]
    branches = [Branch(b, f, t, 1.0, 100.0) for b, (f, t) in enumerate(edges)]
    return Grid(buses=buses, branches=branches, slack=0)


TRIANGLE = make_grid(3, [(0, 1), (1, 2), (0, 2)])
PATH3 = make_grid(3, [(0, 1), (1, 2)])

ALL_ENGINES = [
    oracle_bridges,
    tarjan_bridges,
    per_edge_tarjan_bridges,
    lambda g, a: parallel_bridges(g, a, workers=1),
]


# ---------------------------------------------------------------------------
# Small fixed graphs
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("engine", ALL_ENGINES)
def test_f1_bridge_set(engine, f1):
    grid, adj = f1
    report = engine(grid, adj)
    assert external_pairs(grid, report) == {(1, 2), (4, 6)}
    assert report.bridges_count == 2
    assert report.skipped_parallel == 2
    # neither parallel 2-3 branch (ids 1 and 2) is ever reported
    assert not {1, 2} & set(report.bridge_ids)


@pytest.mark.parametrize("engine", ALL_ENGINES)
def test_triangle_has_no_bridges(engine):
    adj = build_adjacency(TRIANGLE)
    assert engine(TRIANGLE, adj).bridge_ids == []


@pytest.mark.parametrize("engine", ALL_ENGINES)
def test_path_all_bridges(engine):
    adj = build_adjacency(PATH3)
    assert engine(PATH3, adj).bridge_ids == [0, 1]


def test_parallel_pair_grid():
    grid = make_grid(2, [(0, 1), (0, 1)])
    adj = build_adjacency(grid)
    for engine in ALL_ENGINES:
        report = engine(grid, adj)
        assert report.bridge_ids == []
        assert report.skipped_parallel == 2


# ---------------------------------------------------------------------------
# Tarjan traversal specifics
# ---------------------------------------------------------------------------

def test_low_num_rooted_at_4_on_cut_f1(f1):
    # DFS rooted at vertex 4 on F1 minus branch 4-6: the two component roots
    # satisfy low = num, with the second tree starting at visit order 6.
    grid, adj = f1
    state = tarjan_sweep(adj, removed=6, start=3)  # internal 3 = vertex 4
    assert state.value_at(3) == (1, 1)             # num[4] = low[4] = 1
    assert state.value_at(5) == (6, 6)             # num[6] = low[6] = 6
    assert len(state.roots) == 2


def test_low_bounded_by_num(f1):
    grid, adj = f1
    state = tarjan_sweep(adj)
    n = grid.n_buses
    assert sorted(state.num) == list(range(1, n + 1))
    assert all(1 <= state.low[v] <= state.num[v] <= n for v in range(n))
    for seed in (5, 6, 7):
        g = random_multigraph(seed, max_buses=80)
        st = tarjan_sweep(build_adjacency(g))
        assert all(1 <= st.low[v] <= st.num[v] for v in range(g.n_buses))


def test_parallel_back_edge_to_parent_is_not_skipped():
    # 0-1 doubled, then 1-2 single: only 1-2 may be a bridge
    grid = make_grid(3, [(0, 1), (0, 1), (1, 2)])
    adj = build_adjacency(grid)
    assert tarjan_bridges(grid, adj).bridge_ids == [2]
    state = tarjan_sweep(adj)
    assert state.low[1] == state.low[0]  # twin branch closes the cycle


def test_tarjan_iterative_survives_long_path():
    n = 1_000_000
    buses = [Bus(i + 1, 0.0) for i in range(n)]
    branches = [Branch(i, i, i + 1, 1.0, 100.0) for i in range(n - 1)]
    grid = Grid(buses=buses, branches=branches, slack=0)
    adj = build_adjacency(grid)
    report = tarjan_bridges(grid, adj)
    assert report.bridges_count == n - 1


def test_tarjan_handles_disconnected_input():
    grid = make_grid(5, [(0, 1), (2, 3), (3, 4)])
    adj = build_adjacency(grid)
    report = tarjan_bridges(grid, adj)
    assert report.bridge_ids == [0, 1, 2]
    assert len(tarjan_sweep(adj).roots) == 2


@pytest.mark.parametrize("engine", [
    oracle_bridges,
    per_edge_tarjan_bridges,
    lambda g, a: parallel_bridges(g, a, workers=2),
])
def test_connected_precondition_enforced(engine):
    grid = make_grid(4, [(0, 1), (2, 3)])
    adj = build_adjacency(grid)
    with pytest.raises(DisconnectedGridError):
        engine(grid, adj)


# ---------------------------------------------------------------------------
# Per-edge engine component counts
# ---------------------------------------------------------------------------

def test_per_edge_component_counts(f1):
    grid, adj = f1
    assert len(tarjan_sweep(adj, removed=6).roots) == 2   # cut 4-6: splits
    assert len(tarjan_sweep(adj, removed=1).roots) == 1   # cut one 2-3 twin
    assert len(tarjan_sweep(adj, removed=5).roots) == 1   # cut 4-5
    report = per_edge_tarjan_bridges(grid, adj)
    assert 5 not in report.bridge_ids


def test_per_edge_dense_backend_matches(f1):
    grid, adj = f1
    dense = build_dense_adjacency(grid)
    sparse_report = per_edge_tarjan_bridges(grid, adj)
    dense_report = per_edge_tarjan_bridges(grid, adj, dense=dense)
    assert dense_report.bridge_ids == sparse_report.bridge_ids
    assert dense_report.engine == "per-edge-dense"
    for seed in (11, 12, 13):
        g = random_multigraph(seed, max_buses=40)
        a = build_adjacency(g)
        d = build_dense_adjacency(g)
        assert (per_edge_tarjan_bridges(g, a, dense=d).bridge_ids
                == per_edge_tarjan_bridges(g, a).bridge_ids)


# ---------------------------------------------------------------------------
# Dual-frontier BFS
# ---------------------------------------------------------------------------

def test_bfs_cc_f1(f1):
    grid, adj = f1
    assert bfs_cc(adj, 6) == 2   # branch 4-6
    assert bfs_cc(adj, 9) == 1   # branch 7-8
    path_adj = build_adjacency(PATH3)
    assert bfs_cc(path_adj, 1) == 2


def test_bfs_cc_rejects_parallel_branch(f1):
    grid, adj = f1
    with pytest.raises(ValueError, match="parallel"):
        bfs_cc(adj, 1)


def test_bfs_cc_supersteps_bounded():
    for seed in range(8):
        grid = random_multigraph(seed + 300, max_buses=60)
        adj = build_adjacency(grid)
        state = DualFrontierState.for_vertices(grid.n_buses)
        for b in range(grid.n_branches):
            if adj.branch_multiplicity[b] != 1:
                continue
            count, steps = _dual_frontier_cc(adj, b, state)
            assert steps <= grid.n_buses
            assert count == count_components(grid, removed=b)


def test_dual_frontier_state_flags(f1):
    grid, adj = f1
    state = DualFrontierState.for_vertices(grid.n_buses)
    count, _ = _dual_frontier_cc(adj, 6, state)
    assert count == 2
    assert state.cc_count == 0
    u, v = int(adj.branch_from[6]), int(adj.branch_to[6])
    assert state.cc1[u] == 6 and state.cc2[v] == 6
    # label sets stay disjoint across the cut
    side1 = set(np.flatnonzero(state.cc1 == 6).tolist())
    side2 = set(np.flatnonzero(state.cc2 == 6).tolist())
    assert not side1 & side2
    count, _ = _dual_frontier_cc(adj, 9, state)  # branch 7-8 reconnects
    assert count == 1 and state.cc_count == 1


# ---------------------------------------------------------------------------
# Parallel engine
# ---------------------------------------------------------------------------

def test_parallel_engine_worker_counts_agree(f1):
    grid, adj = f1
    baseline = parallel_bridges(grid, adjacency=adj, workers=1)
    for workers in (2, 8):
        report = parallel_bridges(grid, adj, workers=workers)
        assert report.bridge_ids == baseline.bridge_ids
        assert report.supersteps_total == baseline.supersteps_total
    assert external_pairs(grid, baseline) == {(1, 2), (4, 6)}


def test_parallel_engine_rejects_bad_worker_count(f1):
    grid, adj = f1
    with pytest.raises(ValueError):
        parallel_bridges(grid, adj, workers=0)


def test_parallel_matches_tarjan_on_3000_bus_grid():
    from gridsplit import SynthSpec, generate

    grid = generate(SynthSpec(seed=9, buses=3000, extra_edges=600,
                              parallel_fraction=0.05))
    adj = build_adjacency(grid)
    fast = tarjan_bridges(grid, adj)
    par = parallel_bridges(grid, adj, workers=2)
    assert par.bridge_ids == fast.bridge_ids
    assert par.skipped_parallel == fast.skipped_parallel


# ---------------------------------------------------------------------------
# Cross-engine agreement and Definition-3 checks (fast sweep)
# ---------------------------------------------------------------------------

def test_engine_agreement_random_sweep():
    rng = np.random.default_rng(20240917)
    for case in range(40):
        grid = random_multigraph(int(rng.integers(0, 2**63)), rng, max_buses=80)
        adj = build_adjacency(grid)
        reference = oracle_bridges(grid, adj)
        assert tarjan_bridges(grid, adj).bridge_ids == reference.bridge_ids
        assert per_edge_tarjan_bridges(grid, adj).bridge_ids == reference.bridge_ids
        assert parallel_bridges(grid, adj, workers=1).bridge_ids == reference.bridge_ids
        # Definition check: removal splits exactly the reported branches
        reported = set(reference.bridge_ids)
        for b in range(grid.n_branches):
            if adj.branch_multiplicity[b] >= 2:
                assert b not in reported
                continue
            assert count_components(grid, removed=b) == (2 if b in reported else 1)


def test_spanning_tree_every_branch_is_bridge():
    from gridsplit import SynthSpec, generate

    for seed in (1, 2, 3):
        grid = generate(SynthSpec(seed=seed, buses=40, extra_edges=0))
        adj = build_adjacency(grid)
        assert tarjan_bridges(grid, adj).bridges_count == grid.n_branches


def test_cycle_has_no_bridges():
    n = 17
    grid = make_grid(n, [(i, (i + 1) % n) for i in range(n)])
    adj = build_adjacency(grid)
    for engine in ALL_ENGINES:
        assert engine(grid, adj).bridge_ids == []


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------

def test_report_json_deterministic_across_workers(f1):
    grid, adj = f1
    blobs = []
    for workers in (1, 2, 4, 8):
        report = parallel_bridges(grid, adj, workers=workers)
        report.elapsed_ms = 0.0
        blobs.append(report.to_json(grid))
    assert len(set(blobs)) == 1


def test_report_json_schema(f1):
    import json

    grid, adj = f1
    payload = json.loads(tarjan_bridges(grid, adj).to_json(grid))
    assert set(payload) == {"engine", "bridges", "bridges_count",
                            "skipped_parallel", "elapsed_ms"}
    assert payload["bridges"] == [
        {"branch": 0, "from": 1, "to": 2},
        {"branch": 6, "from": 4, "to": 6},
    ]
    assert payload["bridges_count"] == 2
    assert payload["skipped_parallel"] == 2
