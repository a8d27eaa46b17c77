"""Grid parsing, adjacency construction, and the F1 reference fixture."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridsplit import (
    Branch,
    Bus,
    Grid,
    GridFormatError,
    build_adjacency,
    build_dense_adjacency,
    build_fixture_f1,
    check_connected,
    parse_grid,
    serialize_grid,
)
from conftest import count_components, random_multigraph

MINIMAL = """\
BUS 1 -100
BUS 2 100
BRANCH 1 2 0.1 200
SLACK 1
"""


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def test_parse_minimal():
    grid = parse_grid(MINIMAL)
    assert grid.n_buses == 2
    assert grid.n_branches == 1
    assert grid.slack == 0
    assert grid.buses[0].injection == -100.0
    assert grid.buses[0].voltage_kv == 0.0
    assert grid.branches[0].weight == 1.0


def test_parse_comments_and_blank_lines():
    text = "# header\n\nBUS 1 0  # trailing\nBUS 2 0\nBRANCH 1 2 0.5 10\nSLACK 2\n"
    grid = parse_grid(text)
    assert grid.n_buses == 2
    assert grid.slack == 1


def test_parse_sparse_external_ids():
    text = "BUS 700 0\nBUS 12 0\nBRANCH 700 12 0.1 10\nSLACK 700\n"
    grid = parse_grid(text)
    assert [b.id for b in grid.buses] == [12, 700]
    assert grid.slack == 1
    assert (grid.branches[0].from_bus, grid.branches[0].to_bus) == (1, 0)


@pytest.mark.parametrize("text, fragment", [
    ("BUS 1 0\nBUS 1 0\nSLACK 1\n", "duplicate bus id"),
    ("BUS 1 0\nBRANCH 1 2 0.1 10\nSLACK 1\n", "unknown bus"),
    ("BUS 1 0\nBRANCH 1 1 0.1 200\nSLACK 1\n", "self-loop"),
    ("BUS 1 0\nBUS 2 0\nBRANCH 1 2 -0.1 10\nSLACK 1\n", "reactance"),
    ("BUS 1 0\nBUS 2 0\nBRANCH 1 2 0.1 0\nSLACK 1\n", "rating"),
    ("BUS 1 0\nBUS 2 0\nBRANCH 1 2 0.1 10\n", "no SLACK"),
    ("BUS 1 0\nSLACK 1\nSLACK 1\n", "multiple SLACK"),
    ("BVS 1 0\nSLACK 1\n", "unknown record tag"),
    ("BUS 1 zero\nSLACK 1\n", "could not convert"),
    ("BUS 1 0\nSLACK 9\n", "unknown bus"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(GridFormatError) as err:
        parse_grid(text)
    assert fragment in str(err.value)


def test_parse_error_reports_line_number():
    with pytest.raises(GridFormatError) as err:
        parse_grid("BUS 1 0\nBUS 2 0\nBRANCH 1 1 0.1 10\nSLACK 1\n")
    assert err.value.line_no == 3
    assert "line 3" in str(err.value)


def test_roundtrip_f1():
    grid = build_fixture_f1()
    assert parse_grid(serialize_grid(grid)) == grid


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_roundtrip_random_grids(seed):
    grid = random_multigraph(seed, max_buses=40)
    again = parse_grid(serialize_grid(grid))
    assert again == grid
    assert serialize_grid(again) == serialize_grid(grid)


# ---------------------------------------------------------------------------
# Adjacency
# ---------------------------------------------------------------------------

def test_adjacency_f1_sorted_neighbor_sequences(f1):
    grid, adj = f1
    ext = lambda arr: [grid.external_id(int(v)) for v in arr]
    assert ext(adj.neighbors_of(1)[0]) == [1, 3, 3, 4]   # vertex 2
    assert ext(adj.neighbors_of(6)[0]) == [6, 8]         # vertex 7


def test_adjacency_single_branch():
    grid = parse_grid(MINIMAL)
    adj = build_adjacency(grid)
    assert adj.neighbors_of(0)[0].tolist() == [1]
    assert adj.neighbors_of(1)[0].tolist() == [0]
    assert adj.pair_multiplicity(0, 1) == 1


def test_adjacency_handle_counts(f1):
    grid, adj = f1
    lengths = np.diff(adj.offsets)
    assert lengths.sum() == 2 * grid.n_branches
    for i, j in [(1, 2), (2, 1), (3, 5), (5, 3)]:
        assert adj.pair_multiplicity(i, j) == adj.pair_multiplicity(j, i)
    assert adj.pair_multiplicity(1, 2) == 2
    assert adj.branch_multiplicity[1] == 2
    assert adj.branch_multiplicity[2] == 2
    assert adj.branch_multiplicity[0] == 1


def test_adjacency_invariants_random():
    for seed in range(12):
        grid = random_multigraph(seed, max_buses=60)
        adj = build_adjacency(grid)
        assert np.diff(adj.offsets).sum() == 2 * grid.n_branches
        # multiplicity equals the repeat count in the sorted neighbor list
        for v in range(grid.n_buses):
            nbrs = adj.neighbors_of(v)[0].tolist()
            assert nbrs == sorted(nbrs)
            for w in set(nbrs):
                assert nbrs.count(w) == adj.pair_multiplicity(v, w)


def test_dense_adjacency_f1(f1):
    grid, _ = f1
    dense = build_dense_adjacency(grid)
    assert dense.matrix[1, 2] == 2 and dense.matrix[2, 1] == 2   # pair 2-3
    assert dense.matrix[5, 6] == 1                               # pair 6-7
    assert (np.diag(dense.matrix) == 0).all()
    assert (dense.matrix == dense.matrix.T).all()


def test_dense_adjacency_cap():
    grid = build_fixture_f1()
    with pytest.raises(ValueError, match="cap"):
        build_dense_adjacency(grid, max_vertices=5)


# ---------------------------------------------------------------------------
# Connectivity
# ---------------------------------------------------------------------------

def test_check_connected_f1(f1):
    grid, adj = f1
    assert check_connected(grid, adj)


def test_check_connected_after_cut():
    grid = build_fixture_f1()
    cut = [br for br in grid.branches if br.id != 6]  # drop branch 4-6
    reduced = Grid(buses=grid.buses, branches=cut, slack=grid.slack)
    assert not check_connected(reduced)
    assert count_components(grid, removed=6) == 2


def test_check_connected_single_vertex():
    grid = Grid(buses=[Bus(1, 0.0)], branches=[], slack=0)
    assert check_connected(grid)


def test_check_connected_matches_component_count():
    for seed in range(10):
        grid = random_multigraph(seed + 100, max_buses=50)
        assert check_connected(grid) == (count_components(grid) == 1)


# ---------------------------------------------------------------------------
# F1 fixture facts
# ---------------------------------------------------------------------------

def test_f1_shape(f1):
    grid, adj = f1
    assert grid.n_buses == 10
    assert grid.n_branches == 13
    assert grid.external_id(grid.slack) == 1
    assert adj.pair_multiplicity(1, 2) == 2  # vertices 2 and 3


def test_f1_bridges_by_brute_force(f1):
    grid, adj = f1
    bridges = set()
    for b in range(grid.n_branches):
        if count_components(grid, removed=b) == 2:
            bridges.add((grid.external_id(int(grid.from_idx[b])),
                         grid.external_id(int(grid.to_idx[b]))))
    assert bridges == {(1, 2), (4, 6)}


def test_f1_components_after_cutting_4_6():
    grid = build_fixture_f1()
    cut = [br for br in grid.branches if br.id != 6]
    reduced = Grid(buses=grid.buses, branches=cut, slack=grid.slack)
    adj = build_adjacency(reduced)
    side = np.zeros(10, dtype=bool)
    side[0] = True
    frontier = [0]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj.neighbors_of(v)[0].tolist():
                if not side[w]:
                    side[w] = True
                    nxt.append(w)
        frontier = nxt
    reached = {grid.external_id(v) for v in np.flatnonzero(side)}
    rest = {grid.external_id(v) for v in np.flatnonzero(~side)}
    assert reached == {1, 2, 3, 4, 5}
    assert rest == {6, 7, 8, 9, 10}
