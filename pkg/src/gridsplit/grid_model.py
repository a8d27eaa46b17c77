"""Power-grid multigraph model: parsing, validation, and adjacency indexing.

The grid file format is plain UTF-8 text, one record per line, ``#`` starting
a comment, fields whitespace-separated:

    BUS <id:int> <injection_MW:float> [voltage_kV:float]
    BRANCH <from:int> <to:int> <x_pu:float> <rating_MW:float> [weight:float] [voltage_kV:float]
    SLACK <id:int>

Omitted optional fields default to voltage_kV = 0 (unknown) and weight = 1.
External bus ids may be arbitrary positive integers; internally buses are
reindexed densely 0..n-1 in ascending external-id order. Branch ids are dense
0..m-1 in file order. Parallel branches between the same bus pair keep
distinct ids (they may carry distinct reactances and ratings).

Grid and Adjacency are immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridFormatError

DENSE_VERTEX_CAP = 10_000


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bus:
    """A network bus. ``injection`` is net MW (positive = generation)."""

    id: int
    injection: float
    voltage_kv: float = 0.0


@dataclass(frozen=True)
class Branch:
    """An undirected branch; (from_bus, to_bus) fixes the flow sign convention.

    ``from_bus``/``to_bus`` are internal bus indices, not external ids.
    """

    id: int
    from_bus: int
    to_bus: int
    reactance_x: float
    rating: float
    weight: float = 1.0
    voltage_kv: float = 0.0


@dataclass
class Grid:
    """Immutable bus/branch model with a single slack bus (internal index).

    Construction builds flat numpy views of the branch table (``from_idx``,
    ``to_idx``, ``reactance``, ``rating``, ``weight``, ``branch_voltage_kv``)
    plus ``injections`` and ``bus_ids``; treat all of them as read-only.
    """

    buses: list[Bus]
    branches: list[Branch]
    slack: int

    def __post_init__(self):
        self.bus_ids = np.array([b.id for b in self.buses], dtype=np.int64)
        self.injections = np.array([b.injection for b in self.buses], dtype=np.float64)
        self.from_idx = np.array([br.from_bus for br in self.branches], dtype=np.int64)
        self.to_idx = np.array([br.to_bus for br in self.branches], dtype=np.int64)
        self.reactance = np.array([br.reactance_x for br in self.branches], dtype=np.float64)
        self.rating = np.array([br.rating for br in self.branches], dtype=np.float64)
        self.weight = np.array([br.weight for br in self.branches], dtype=np.float64)
        self.branch_voltage_kv = np.array(
            [br.voltage_kv for br in self.branches], dtype=np.float64
        )
        for arr in (self.bus_ids, self.injections, self.from_idx, self.to_idx,
                    self.reactance, self.rating, self.weight, self.branch_voltage_kv):
            arr.flags.writeable = False

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def external_id(self, vertex: int) -> int:
        """External bus id for an internal vertex index."""
        return self.buses[vertex].id


@dataclass(frozen=True)
class Adjacency:
    """Compressed neighbor lists of the multigraph.

    Each physical branch appears exactly twice (once per endpoint); per-vertex
    slices are sorted ascending by neighbor index (then branch id) so that
    traversal order is deterministic across runs and engines. Parallel
    branches show up as repeated neighbors.
    """

    offsets: np.ndarray            # int64, len n_vertices+1
    neighbors: np.ndarray          # int64, len 2*n_branches
    branch_ids: np.ndarray         # int64, len 2*n_branches, parallel to neighbors
    branch_from: np.ndarray        # int64, len n_branches
    branch_to: np.ndarray          # int64, len n_branches
    branch_multiplicity: np.ndarray  # int64, len n_branches
    pair_counts: dict = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.offsets) - 1

    @property
    def n_branches(self) -> int:
        return len(self.branch_from)

    def neighbors_of(self, vertex: int) -> tuple[np.ndarray, np.ndarray]:
        """(neighbor indices, branch ids) for one vertex, sorted ascending."""
        lo, hi = self.offsets[vertex], self.offsets[vertex + 1]
        return self.neighbors[lo:hi], self.branch_ids[lo:hi]

    def pair_multiplicity(self, i: int, j: int) -> int:
        """Number of parallel branches joining vertices i and j (0 if none)."""
        return self.pair_counts.get((min(i, j), max(i, j)), 0)


@dataclass(frozen=True)
class DenseAdjacency:
    """n x n symmetric integer matrix of edge multiplicities, zero diagonal."""

    matrix: np.ndarray


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

def parse_grid(text: str) -> Grid:
    """Parse grid-file content into a validated Grid.

    Raises GridFormatError (with the offending line number) on duplicate bus
    ids, branches referencing unknown buses, self-loops, non-positive
    reactance or rating, zero or multiple SLACK lines, unknown record tags,
    or malformed fields.
    """
    bus_recs: dict[int, tuple[float, float, int]] = {}
    branch_recs: list[tuple[int, int, float, float, float, float, int]] = []
    slack_ext: int | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        tag, args = fields[0], fields[1:]
        try:
            if tag == "BUS":
                if not 2 <= len(args) <= 3:
                    raise ValueError("BUS takes 2 or 3 fields")
                ext = int(args[0])
                injection = float(args[1])
                voltage = float(args[2]) if len(args) == 3 else 0.0
                if ext in bus_recs:
                    raise ValueError(f"duplicate bus id {ext}")
                bus_recs[ext] = (injection, voltage, line_no)
            elif tag == "BRANCH":
                if not 4 <= len(args) <= 6:
                    raise ValueError("BRANCH takes 4 to 6 fields")
                f_ext, t_ext = int(args[0]), int(args[1])
                x, rating = float(args[2]), float(args[3])
                weight = float(args[4]) if len(args) >= 5 else 1.0
                voltage = float(args[5]) if len(args) == 6 else 0.0
                if f_ext == t_ext:
                    raise ValueError(f"self-loop at bus {f_ext}")
                if x <= 0.0:
                    raise ValueError(f"non-positive reactance {x}")
                if rating <= 0.0:
                    raise ValueError(f"non-positive rating {rating}")
                if weight < 0.0:
                    raise ValueError(f"negative weight {weight}")
                branch_recs.append((f_ext, t_ext, x, rating, weight, voltage, line_no))
            elif tag == "SLACK":
                if len(args) != 1:
                    raise ValueError("SLACK takes exactly 1 field")
                if slack_ext is not None:
                    raise ValueError("multiple SLACK lines")
                slack_ext = int(args[0])
            else:
                raise ValueError(f"unknown record tag {tag!r}")
        except ValueError as exc:
            raise GridFormatError(str(exc), line_no) from None

    if slack_ext is None:
        raise GridFormatError("no SLACK line")
    if not bus_recs:
        raise GridFormatError("no BUS records")

    ext_ids = sorted(bus_recs)
    index_of = {ext: i for i, ext in enumerate(ext_ids)}
    buses = [Bus(ext, bus_recs[ext][0], bus_recs[ext][1]) for ext in ext_ids]

    branches = []
    for bid, (f_ext, t_ext, x, rating, weight, voltage, line_no) in enumerate(branch_recs):
        for ext in (f_ext, t_ext):
            if ext not in index_of:
                raise GridFormatError(f"branch references unknown bus {ext}", line_no)
        branches.append(Branch(bid, index_of[f_ext], index_of[t_ext],
                               x, rating, weight, voltage))

    if slack_ext not in index_of:
        raise GridFormatError(f"SLACK references unknown bus {slack_ext}")

    return Grid(buses=buses, branches=branches, slack=index_of[slack_ext])


def serialize_grid(grid: Grid) -> str:
    """Write a Grid back to grid-file text; parse(serialize(g)) == g."""
    lines = []
    for bus in grid.buses:
        lines.append(f"BUS {bus.id} {bus.injection!r} {bus.voltage_kv!r}")
    for br in grid.branches:
        lines.append(
            f"BRANCH {grid.external_id(br.from_bus)} {grid.external_id(br.to_bus)} "
            f"{br.reactance_x!r} {br.rating!r} {br.weight!r} {br.voltage_kv!r}"
        )
    lines.append(f"SLACK {grid.external_id(grid.slack)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Adjacency builders
# ---------------------------------------------------------------------------

def build_adjacency(grid: Grid) -> Adjacency:
    """Build sorted compressed neighbor lists with parallel-line multiplicities."""
    n, m = grid.n_buses, grid.n_branches
    verts = np.concatenate((grid.from_idx, grid.to_idx))
    nbrs = np.concatenate((grid.to_idx, grid.from_idx))
    bids = np.concatenate((np.arange(m, dtype=np.int64),) * 2) if m else np.empty(0, np.int64)

    order = np.lexsort((bids, nbrs, verts))
    neighbors = nbrs[order]
    branch_ids = bids[order]
    counts = np.bincount(verts, minlength=n) if m else np.zeros(n, dtype=np.int64)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])

    lo = np.minimum(grid.from_idx, grid.to_idx)
    hi = np.maximum(grid.from_idx, grid.to_idx)
    key = lo * n + hi
    uniq, inverse, cnt = np.unique(key, return_inverse=True, return_counts=True)
    multiplicity = cnt[inverse].astype(np.int64) if m else np.empty(0, np.int64)
    pair_counts = {(int(k // n), int(k % n)): int(c) for k, c in zip(uniq, cnt)}

    adj = Adjacency(
        offsets=offsets,
        neighbors=neighbors,
        branch_ids=branch_ids,
        branch_from=grid.from_idx,
        branch_to=grid.to_idx,
        branch_multiplicity=multiplicity,
        pair_counts=pair_counts,
    )
    for arr in (adj.offsets, adj.neighbors, adj.branch_ids, adj.branch_multiplicity):
        arr.flags.writeable = False
    return adj


def build_dense_adjacency(grid: Grid, max_vertices: int = DENSE_VERTEX_CAP) -> DenseAdjacency:
    """Build the n x n multiplicity matrix; O(n^2) memory, capped."""
    n = grid.n_buses
    if n > max_vertices:
        raise ValueError(f"vertex count {n} exceeds dense adjacency cap {max_vertices}")
    matrix = np.zeros((n, n), dtype=np.int64)
    np.add.at(matrix, (grid.from_idx, grid.to_idx), 1)
    np.add.at(matrix, (grid.to_idx, grid.from_idx), 1)
    return DenseAdjacency(matrix=matrix)


# ---------------------------------------------------------------------------
# Traversal support
# ---------------------------------------------------------------------------

def gather_neighbors(adjacency: Adjacency,
                     frontier: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate the neighbor slices of all frontier vertices (vectorized)."""
    offsets = adjacency.offsets
    starts = offsets[frontier]
    counts = offsets[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    cum = np.cumsum(counts)
    idx = np.repeat(starts - (cum - counts), counts) + np.arange(total)
    return adjacency.neighbors[idx], adjacency.branch_ids[idx]


def check_connected(grid: Grid, adjacency: Adjacency | None = None) -> bool:
    """True iff a single BFS from vertex 0 visits all vertices."""
    n = grid.n_buses
    if n <= 1:
        return True
    if adjacency is None:
        adjacency = build_adjacency(grid)
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    frontier = np.array([0], dtype=np.int64)
    reached = 1
    while frontier.size:
        nbrs, _ = gather_neighbors(adjacency, frontier)
        new = nbrs[~visited[nbrs]]
        if new.size:
            new = np.unique(new)
            visited[new] = True
            reached += new.size
        frontier = new
    return reached == n


# ---------------------------------------------------------------------------
# Reference fixture
# ---------------------------------------------------------------------------

_F1_EDGES = [
    (1, 2), (2, 3), (2, 3), (2, 4), (3, 5), (4, 5), (4, 6),
    (6, 7), (6, 8), (7, 8), (8, 9), (8, 10), (9, 10),
]


def build_fixture_f1() -> Grid:
    """10-bus / 13-branch reference network with one parallel pair (2-3).

    Unit reactances, 100 MW ratings, unit weights, slack at bus 1. Splitting
    branches of this fixture are 1-2 and 4-6.
    """
    buses = [Bus(i, 0.0) for i in range(1, 11)]
    branches = [
        Branch(bid, f - 1, t - 1, reactance_x=1.0, rating=100.0)
        for bid, (f, t) in enumerate(_F1_EDGES)
    ]
    return Grid(buses=buses, branches=branches, slack=0)
