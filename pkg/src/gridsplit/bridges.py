"""Grid-splitting (bridge) branch detection.

A branch is a bridge when removing it increases the number of connected
components, i.e. its outage splits the grid into two electrical islands.
Branches with a parallel twin between the same bus pair are never bridges
and are skipped by every engine.

Four mutually cross-checking routes are provided:

* ``oracle_bridges``       -- brute force: remove each branch, plain BFS.
* ``tarjan_bridges``       -- one-pass low/num DFS, O(V+E), iterative.
* ``per_edge_tarjan_bridges`` -- remove each branch, full low/num sweep,
                              counting components at DFS restarts.
* ``parallel_bridges``     -- dual-frontier level-synchronous BFS per branch,
                              branches fanned out across worker processes.

All engines return identical bridge sets on connected multigraphs; the
parallel engine's result does not depend on the worker count.
"""

from __future__ import annotations

import json
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DisconnectedGridError
from .grid_model import (
    Adjacency,
    DenseAdjacency,
    Grid,
    check_connected,
    gather_neighbors,
)


# ---------------------------------------------------------------------------
# Result type
# ---------------------------------------------------------------------------

@dataclass
class BridgeReport:
    """Bridge set plus per-engine diagnostics."""

    engine: str
    bridge_ids: list[int]
    skipped_parallel: int
    supersteps_total: int = 0
    elapsed_ms: float = 0.0

    @property
    def bridges_count(self) -> int:
        return len(self.bridge_ids)

    def to_payload(self, grid: Grid) -> dict:
        return {
            "engine": self.engine,
            "bridges": [
                {
                    "branch": int(b),
                    "from": grid.external_id(int(grid.from_idx[b])),
                    "to": grid.external_id(int(grid.to_idx[b])),
                }
                for b in self.bridge_ids
            ],
            "bridges_count": self.bridges_count,
            "skipped_parallel": self.skipped_parallel,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }

    def to_json(self, grid: Grid) -> str:
        return json.dumps(self.to_payload(grid), indent=2) + "\n"

    def to_csv(self, grid: Grid) -> str:
        lines = ["branch_id,from_bus,to_bus"]
        for b in self.bridge_ids:
            lines.append(
                f"{int(b)},{grid.external_id(int(grid.from_idx[b]))},"
                f"{grid.external_id(int(grid.to_idx[b]))}"
            )
        return "\n".join(lines) + "\n"


def _require_connected(grid: Grid, adjacency: Adjacency, engine: str) -> None:
    if not check_connected(grid, adjacency):
        raise DisconnectedGridError(
            f"{engine}: base grid is not connected (single-BFS reachability failed)"
        )


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def oracle_bridges(grid: Grid, adjacency: Adjacency) -> BridgeReport:
    """Brute-force reference: a branch is a bridge iff a plain BFS of the
    grid minus that branch leaves its endpoints in different components.

    O(E*(V+E)); deliberately independent of the low/num and dual-frontier
    machinery so it can arbitrate between the fast engines.
    """
    t0 = time.perf_counter()
    _require_connected(grid, adjacency, "oracle_bridges")
    n, m = adjacency.n_vertices, adjacency.n_branches
    lists: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for v in range(n):
        nbrs, bids = adjacency.neighbors_of(v)
        lists[v] = list(zip(nbrs.tolist(), bids.tolist()))

    mult = adjacency.branch_multiplicity
    bridges = []
    skipped = 0
    seen = [-1] * n
    for b in range(m):
        if mult[b] >= 2:
            skipped += 1
            continue
        u = int(adjacency.branch_from[b])
        v = int(adjacency.branch_to[b])
        if _plain_bfs_splits(lists, u, v, b, seen):
            bridges.append(b)
    elapsed = (time.perf_counter() - t0) * 1e3
    return BridgeReport("oracle", bridges, skipped, elapsed_ms=elapsed)


def _plain_bfs_splits(lists, source, target, removed, seen) -> bool:
    """BFS from source avoiding the removed branch; True iff target unreached."""
    seen[source] = removed
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for w, b in lists[x]:
            if b == removed or seen[w] == removed:
                continue
            if w == target:
                return False
            seen[w] = removed
            queue.append(w)
    return True


# ---------------------------------------------------------------------------
# Tarjan low/num traversal
# ---------------------------------------------------------------------------

@dataclass
class TarjanState:
    """Bookkeeping of one full low/num traversal.

    ``num[i]`` is the 1-based DFS visit order (0 = unvisited); ``low[i]`` the
    smallest visit order reachable from i's subtree through at most one back
    edge. ``roots`` lists the outer-loop restart vertices, so ``len(roots)``
    is the number of connected components traversed.
    """

    num: list[int]
    low: list[int]
    level: int = 0
    roots: list[int] = field(default_factory=list)

    def value_at(self, vertex: int) -> tuple[int, int]:
        return self.num[vertex], self.low[vertex]


def tarjan_sweep(adjacency: Adjacency, removed: int = -1,
                 start: int | None = None) -> TarjanState:
    """Run the full iterative low/num traversal over every vertex.

    ``removed`` names a branch id to treat as absent. The outer loop visits
    vertices in ascending index order, optionally rooted at ``start`` first.
    Exactly one traversal of the arrival edge is skipped per vertex; a
    parallel edge back to the parent counts as a genuine back edge.
    """
    return _sweep_lists(
        adjacency.n_vertices,
        adjacency.offsets.tolist(),
        adjacency.neighbors.tolist(),
        adjacency.branch_ids.tolist(),
        removed,
        start,
    )


def _sweep_lists(n: int, offs: list[int], nbr: list[int], bid: list[int],
                 removed: int, start: int | None) -> TarjanState:
    state = TarjanState(num=[0] * n, low=[0] * n)
    num, low = state.num, state.low
    ptr = [0] * n
    arrival = [-1] * n

    order = range(n) if start is None else [start, *range(n)]
    for root in order:
        if num[root]:
            continue
        state.roots.append(root)
        state.level += 1
        num[root] = low[root] = state.level
        ptr[root] = offs[root]
        arrival[root] = -1
        stack = [root]
        while stack:
            v = stack[-1]
            i = ptr[v]
            if i < offs[v + 1]:
                ptr[v] = i + 1
                b = bid[i]
                if b == removed or b == arrival[v]:
                    # each branch occurs once per slice: skips arrival once
                    continue
                w = nbr[i]
                if num[w] == 0:
                    state.level += 1
                    num[w] = low[w] = state.level
                    ptr[w] = offs[w]
                    arrival[w] = b
                    stack.append(w)
                elif num[w] < low[v]:
                    low[v] = num[w]
            else:
                stack.pop()
                if stack:
                    parent = stack[-1]
                    if low[v] < low[parent]:
                        low[parent] = low[v]
    return state


def tarjan_bridges(grid: Grid, adjacency: Adjacency) -> BridgeReport:
    """One-pass serial engine: iterative low/num DFS, O(V+E).

    A tree edge into child w is a bridge iff low[w] == num[w] and the
    endpoint pair has no parallel twin. Handles disconnected grids (each
    component traversed from its lowest-index vertex). The explicit stack
    keeps million-vertex path graphs within memory instead of the
    interpreter's recursion limit.
    """
    t0 = time.perf_counter()
    n = adjacency.n_vertices
    offs = adjacency.offsets.tolist()
    nbr = adjacency.neighbors.tolist()
    bid = adjacency.branch_ids.tolist()
    mult = adjacency.branch_multiplicity.tolist()

    num = [0] * n
    low = [0] * n
    ptr = [0] * n
    arrival = [-1] * n
    level = 0
    bridges = []

    for root in range(n):
        if num[root]:
            continue
        level += 1
        num[root] = low[root] = level
        ptr[root] = offs[root]
        arrival[root] = -1
        stack = [root]
        while stack:
            v = stack[-1]
            i = ptr[v]
            if i < offs[v + 1]:
                ptr[v] = i + 1
                b = bid[i]
                if b == arrival[v]:
                    continue
                w = nbr[i]
                if num[w] == 0:
                    level += 1
                    num[w] = low[w] = level
                    ptr[w] = offs[w]
                    arrival[w] = b
                    stack.append(w)
                elif num[w] < low[v]:
                    low[v] = num[w]
            else:
                stack.pop()
                if stack:
                    parent = stack[-1]
                    if low[v] < low[parent]:
                        low[parent] = low[v]
                    if low[v] == num[v] and mult[arrival[v]] == 1:
                        bridges.append(arrival[v])

    skipped = int(np.count_nonzero(adjacency.branch_multiplicity >= 2))
    bridges.sort()
    elapsed = (time.perf_counter() - t0) * 1e3
    return BridgeReport("tarjan", bridges, skipped, elapsed_ms=elapsed)


def per_edge_tarjan_bridges(grid: Grid, adjacency: Adjacency,
                            dense: DenseAdjacency | None = None) -> BridgeReport:
    """Outer-loop serial engine: remove each non-parallel branch, run a full
    low/num sweep, and mark a bridge iff more than one DFS restart was
    needed (component count > 1). O(E*(V+E)) with neighbor lists, O(E*V^2)
    when ``dense`` supplies the multiplicity-matrix backend.
    """
    t0 = time.perf_counter()
    _require_connected(grid, adjacency, "per_edge_tarjan_bridges")
    n = adjacency.n_vertices
    if dense is None:
        offs = adjacency.offsets.tolist()
        nbr = adjacency.neighbors.tolist()
        bid = adjacency.branch_ids.tolist()
    mult = adjacency.branch_multiplicity
    bridges = []
    skipped = 0
    for b in range(adjacency.n_branches):
        if mult[b] >= 2:
            skipped += 1
            continue
        if dense is not None:
            cc_count = _dense_sweep_components(
                dense.matrix, int(adjacency.branch_from[b]), int(adjacency.branch_to[b])
            )
        else:
            cc_count = len(_sweep_lists(n, offs, nbr, bid, b, None).roots)
        if cc_count > 1:
            bridges.append(b)
    engine = "per-edge-dense" if dense is not None else "per-edge"
    elapsed = (time.perf_counter() - t0) * 1e3
    return BridgeReport(engine, bridges, skipped, elapsed_ms=elapsed)


def _dense_sweep_components(matrix: np.ndarray, bu: int, bv: int) -> int:
    """Low/num sweep on the multiplicity matrix with edge (bu, bv) removed."""
    n = matrix.shape[0]
    matrix[bu, bv] -= 1
    matrix[bv, bu] -= 1
    try:
        num = [0] * n
        low = [0] * n
        level = 0
        components = 0
        for root in range(n):
            if num[root]:
                continue
            components += 1
            level += 1
            num[root] = low[root] = level
            # frame: [vertex, parent, neighbor array, cursor, arrival consumed]
            stack = [[root, -1, np.flatnonzero(matrix[root]), 0, False]]
            while stack:
                frame = stack[-1]
                v, parent, row, i, consumed = frame
                if i < len(row):
                    frame[3] = i + 1
                    w = int(row[i])
                    if w == parent and not consumed and matrix[v, parent] == 1:
                        frame[4] = True  # the lone arrival edge, not a back edge
                        continue
                    if num[w] == 0:
                        level += 1
                        num[w] = low[w] = level
                        stack.append([w, v, np.flatnonzero(matrix[w]), 0, False])
                    elif num[w] < low[v]:
                        low[v] = num[w]
                else:
                    stack.pop()
                    if stack and low[v] < low[stack[-1][0]]:
                        low[stack[-1][0]] = low[v]
        return components
    finally:
        matrix[bu, bv] += 1
        matrix[bv, bu] += 1


# ---------------------------------------------------------------------------
# Dual-frontier BFS engine
# ---------------------------------------------------------------------------

@dataclass
class DualFrontierState:
    """Scratch for one dual-frontier connectivity query.

    ``cc1`` / ``cc2`` are epoch-stamped membership arrays: a vertex belongs
    to a side iff its stamp equals the id of the branch under test, which
    avoids an O(V) clear between branches. ``cc_count`` stays 0 until the
    frontiers touch.
    """

    cc1: np.ndarray
    cc2: np.ndarray
    frontier1: np.ndarray | None = None
    frontier2: np.ndarray | None = None
    cc1_vts: int = 0
    cc2_vts: int = 0
    cc_count: int = 0

    @classmethod
    def for_vertices(cls, n: int) -> "DualFrontierState":
        return cls(cc1=np.full(n, -1, np.int64), cc2=np.full(n, -1, np.int64))


def _expand_side(adjacency: Adjacency, frontier: np.ndarray, side: np.ndarray,
                 removed: int) -> np.ndarray:
    """One side's superstep: label unlabeled neighbors, skip the removed branch."""
    nbrs, bids = gather_neighbors(adjacency, frontier)
    nbrs = nbrs[bids != removed]
    fresh = nbrs[side[nbrs] != removed]
    if fresh.size:
        fresh = np.unique(fresh)
        side[fresh] = removed
    return fresh


def _dual_frontier_cc(adjacency: Adjacency, removed: int,
                      state: DualFrontierState) -> tuple[int, int]:
    """Level-synchronous dual BFS; returns (component count in {1,2}, supersteps).

    Both label sets grow one level per superstep, never crossing the removed
    branch. A vertex carrying both labels means the endpoints reconnect
    (count 1); a side whose superstep labels nothing is exhausted without a
    meeting, so the branch separates the grid (count 2).
    """
    u = int(adjacency.branch_from[removed])
    v = int(adjacency.branch_to[removed])
    cc1, cc2 = state.cc1, state.cc2
    cc1[u] = removed
    cc2[v] = removed
    state.frontier1 = np.array([u], dtype=np.int64)
    state.frontier2 = np.array([v], dtype=np.int64)
    state.cc_count = 0
    supersteps = 0
    while True:
        supersteps += 1
        new1 = _expand_side(adjacency, state.frontier1, cc1, removed)
        new2 = _expand_side(adjacency, state.frontier2, cc2, removed)
        state.cc1_vts = int(new1.size)
        state.cc2_vts = int(new2.size)
        if (new1.size and (cc2[new1] == removed).any()) or \
           (new2.size and (cc1[new2] == removed).any()):
            state.cc_count = 1
            return 1, supersteps
        if state.cc1_vts == 0 or state.cc2_vts == 0:
            return 2, supersteps
        state.frontier1, state.frontier2 = new1, new2


def bfs_cc(adjacency: Adjacency, removed: int) -> int:
    """Component count (1 or 2) of the grid minus one non-parallel branch.

    Precondition: the branch has pair multiplicity 1 and the base grid is
    connected (the caller's responsibility; engines validate it once).
    """
    if adjacency.branch_multiplicity[removed] != 1:
        raise ValueError(
            f"branch {removed} has a parallel twin; bfs_cc requires multiplicity 1"
        )
    count, _ = _dual_frontier_cc(
        adjacency, removed, DualFrontierState.for_vertices(adjacency.n_vertices)
    )
    return count


# --- worker-process plumbing -----------------------------------------------

_WORKER_ADJ: Adjacency | None = None
_WORKER_STATE: DualFrontierState | None = None


def _init_worker(adjacency: Adjacency) -> None:
    global _WORKER_ADJ, _WORKER_STATE
    _WORKER_ADJ = adjacency
    _WORKER_STATE = DualFrontierState.for_vertices(adjacency.n_vertices)


def _detect_chunk(branch_ids: list[int]) -> tuple[list[int], int]:
    found = []
    supersteps = 0
    for b in branch_ids:
        count, steps = _dual_frontier_cc(_WORKER_ADJ, b, _WORKER_STATE)
        supersteps += steps
        if count > 1:
            found.append(b)
    return found, supersteps


def parallel_bridges(grid: Grid, adjacency: Adjacency, workers: int = 1) -> BridgeReport:
    """Dual-frontier BFS applied to every non-parallel branch, with the
    branch set partitioned across up to ``workers`` processes.

    The adjacency is shared read-only; each worker owns private epoch-stamped
    label scratch. Results are merged and sorted, so the report is identical
    for any worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    t0 = time.perf_counter()
    _require_connected(grid, adjacency, "parallel_bridges")
    mult = adjacency.branch_multiplicity
    candidates = [b for b in range(adjacency.n_branches) if mult[b] == 1]
    skipped = adjacency.n_branches - len(candidates)

    if workers == 1 or len(candidates) <= 1:
        state = DualFrontierState.for_vertices(adjacency.n_vertices)
        bridges = []
        supersteps = 0
        for b in candidates:
            count, steps = _dual_frontier_cc(adjacency, b, state)
            supersteps += steps
            if count > 1:
                bridges.append(b)
    else:
        pool_size = min(workers, len(candidates))
        n_chunks = min(len(candidates), pool_size * 4)
        chunks = [candidates[i::n_chunks] for i in range(n_chunks)]
        bridges = []
        supersteps = 0
        with ProcessPoolExecutor(
            max_workers=pool_size, initializer=_init_worker, initargs=(adjacency,)
        ) as pool:
            for found, steps in pool.map(_detect_chunk, chunks):
                bridges.extend(found)
                supersteps += steps
        bridges.sort()

    elapsed = (time.perf_counter() - t0) * 1e3
    return BridgeReport("parallel", bridges, skipped,
                        supersteps_total=supersteps, elapsed_ms=elapsed)
