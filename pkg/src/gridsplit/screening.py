"""DC power flow base case, single-outage superposition, and severity ranking.

The base case factorizes the reduced nodal susceptance matrix once. Each
non-splitting branch outage is then priced with a rank-one compensation
against the stored factors (two triangular solves), never refactorizing:

    dtheta = y * (theta0_p - theta0_q) / (x_pq - (y_p - y_q)),  y = B'^-1 e_pq

which is the Sherman-Morrison update of B' after removing the branch's
susceptance. The denominator vanishes exactly when the branch is a bridge,
so splitting branches must be filtered out before screening.

Contingencies are ranked by the severity index

    SI = sum_k w_k * (P_k / P_k_max)^2

over all in-service branches k, the outaged branch excluded.
"""

from __future__ import annotations

import json
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .bridges import BridgeReport
from .errors import BridgeOutageError, DegenerateOutageError, SingularSystemError
from .grid_model import Grid

DEFAULT_MVA_BASE = 100.0
DENSE_SOLVER_THRESHOLD = 500
DENOMINATOR_TOL = 1e-12


# ---------------------------------------------------------------------------
# Base case
# ---------------------------------------------------------------------------

@dataclass
class DcBaseCase:
    """Factorized DC base case; immutable and shareable across workers.

    ``b_prime`` is the reduced susceptance matrix (slack row/column deleted,
    per-unit), ``factorization`` its reusable factors, ``theta0`` the base
    bus angles in radians (slack fixed at 0) and ``base_flows`` the base
    branch flows in MW.
    """

    b_prime: object
    factorization: object
    theta0: np.ndarray
    base_flows: np.ndarray
    mva_base: float
    slack: int
    reduced_index: np.ndarray = field(repr=False)  # full -> reduced, slack = -1
    _solve: callable = field(repr=False)

    def solve(self, rhs_reduced: np.ndarray) -> np.ndarray:
        """Solve B' x = rhs against the stored factors (thread-safe)."""
        return self._solve(rhs_reduced)


def build_base_case(grid: Grid, mva_base: float = DEFAULT_MVA_BASE,
                    dense_threshold: int = DENSE_SOLVER_THRESHOLD) -> DcBaseCase:
    """Assemble and factorize B', solve the base angles and branch flows.

    Every branch contributes susceptance 1/x (parallel branches add up). The
    injection residual is absorbed by the slack bus. Below ``dense_threshold``
    buses a dense Cholesky factorization is used; above it, sparse LU with a
    fill-reducing ordering. Raises SingularSystemError when B' cannot be
    factorized or the solution fails to reproduce the injections, which
    indicates a disconnected grid or degenerate data.
    """
    n = grid.n_buses
    slack = grid.slack
    reduced_index = np.full(n, -1, dtype=np.int64)
    keep = np.arange(n) != slack
    reduced_index[keep] = np.arange(n - 1)

    f_red = reduced_index[grid.from_idx]
    t_red = reduced_index[grid.to_idx]
    susceptance = 1.0 / grid.reactance

    rows, cols, vals = [], [], []
    fm = f_red >= 0
    tm = t_red >= 0
    rows.append(f_red[fm]); cols.append(f_red[fm]); vals.append(susceptance[fm])
    rows.append(t_red[tm]); cols.append(t_red[tm]); vals.append(susceptance[tm])
    both = fm & tm
    rows.append(f_red[both]); cols.append(t_red[both]); vals.append(-susceptance[both])
    rows.append(t_red[both]); cols.append(f_red[both]); vals.append(-susceptance[both])
    rows = np.concatenate(rows); cols = np.concatenate(cols); vals = np.concatenate(vals)

    p_red = (grid.injections / mva_base)[keep]

    if n - 1 == 0:
        b_prime = np.zeros((0, 0))
        factorization = None
        solve = lambda rhs: rhs.copy()
        theta_red = np.zeros(0)
    elif n - 1 < dense_threshold:
        b_prime = np.zeros((n - 1, n - 1))
        np.add.at(b_prime, (rows, cols), vals)
        try:
            factorization = scipy.linalg.cho_factor(b_prime)
        except scipy.linalg.LinAlgError as exc:
            raise SingularSystemError(
                f"reduced susceptance matrix is not positive definite ({exc}); "
                "grid disconnected or degenerate data"
            ) from None
        solve = lambda rhs: scipy.linalg.cho_solve(factorization, rhs)
        theta_red = solve(p_red)
    else:
        coo = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n - 1, n - 1))
        b_prime = coo.tocsc()
        try:
            factorization = scipy.sparse.linalg.splu(b_prime)
        except RuntimeError as exc:
            raise SingularSystemError(
                f"sparse factorization failed ({exc}); grid disconnected or degenerate data"
            ) from None
        solve = factorization.solve
        theta_red = solve(p_red)

    if n - 1 > 0:
        residual = np.abs(b_prime @ theta_red - p_red).max()
        scale = max(1.0, np.abs(p_red).max())
        if not np.isfinite(residual) or residual > 1e-8 * scale:
            raise SingularSystemError(
                f"base-case solve residual {residual:.3e} exceeds tolerance; "
                "grid disconnected or degenerate data"
            )

    theta0 = np.zeros(n)
    theta0[keep] = theta_red
    base_flows = (theta0[grid.from_idx] - theta0[grid.to_idx]) / grid.reactance * mva_base

    return DcBaseCase(
        b_prime=b_prime,
        factorization=factorization,
        theta0=theta0,
        base_flows=base_flows,
        mva_base=mva_base,
        slack=slack,
        reduced_index=reduced_index,
        _solve=solve,
    )


# ---------------------------------------------------------------------------
# Superposition outage update
# ---------------------------------------------------------------------------

@dataclass
class OutageUpdate:
    """Post-outage state: angle shift (radians) and branch flows (MW)."""

    branch: int
    delta_theta: np.ndarray
    flows: np.ndarray


def superposition_outage(base: DcBaseCase, grid: Grid, branch: int) -> OutageUpdate:
    """Update all branch flows after outaging one non-splitting branch,
    using only the base-case factorization (rank-one compensation).

    Only the named branch is removed; a parallel twin stays in service. The
    outaged branch's own reported flow is exactly 0. Raises BridgeOutageError
    when the compensation denominator vanishes because the branch is a bridge
    (must be pre-filtered), DegenerateOutageError when it falls below
    tolerance on a non-splitting branch.
    """
    p = int(grid.from_idx[branch])
    q = int(grid.to_idx[branch])
    x = float(grid.reactance[branch])
    rp = int(base.reduced_index[p])
    rq = int(base.reduced_index[q])

    rhs = np.zeros(grid.n_buses - 1)
    if rp >= 0:
        rhs[rp] = 1.0
    if rq >= 0:
        rhs[rq] = -1.0
    y = base.solve(rhs)

    y_diff = (y[rp] if rp >= 0 else 0.0) - (y[rq] if rq >= 0 else 0.0)
    denominator = x - y_diff
    if abs(denominator) < DENOMINATOR_TOL:
        if _splits_without(grid, branch):
            raise BridgeOutageError(
                branch, "outage splits the grid (compensation denominator vanishes); "
                        "bridges must be filtered out before screening")
        raise DegenerateOutageError(
            branch, f"compensation denominator {denominator:.3e} below tolerance")

    compensation = (base.theta0[p] - base.theta0[q]) / denominator
    delta_theta = np.zeros(grid.n_buses)
    delta_theta[np.arange(grid.n_buses) != base.slack] = y * compensation

    delta_flows = ((delta_theta[grid.from_idx] - delta_theta[grid.to_idx])
                   / grid.reactance * base.mva_base)
    flows = base.base_flows + delta_flows
    flows[branch] = 0.0
    return OutageUpdate(branch=branch, delta_theta=delta_theta, flows=flows)


def _splits_without(grid: Grid, branch: int) -> bool:
    """Plain BFS check: does removing the branch separate its endpoints?"""
    n = grid.n_buses
    lists: list[list[int]] = [[] for _ in range(n)]
    for b in range(grid.n_branches):
        if b == branch:
            continue
        f, t = int(grid.from_idx[b]), int(grid.to_idx[b])
        lists[f].append(t)
        lists[t].append(f)
    source, target = int(grid.from_idx[branch]), int(grid.to_idx[branch])
    seen = [False] * n
    seen[source] = True
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in lists[v]:
            if w == target:
                return False
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return True


# ---------------------------------------------------------------------------
# Severity index and screening sweep
# ---------------------------------------------------------------------------

def severity_index(flows: np.ndarray, grid: Grid, outaged: int) -> float:
    """Weighted sum of squared branch loadings over in-service branches."""
    if (grid.rating <= 0.0).any():
        raise ValueError("branch ratings must be positive")
    terms = grid.weight * (flows / grid.rating) ** 2
    return float(terms.sum() - terms[outaged])


@dataclass
class ScreeningResult:
    """Ranked non-splitting contingencies, most severe first."""

    ranked: list[tuple[int, float]]
    excluded_bridges: int
    excluded_voltage: int
    screened: int
    failures: list[tuple[int, str]] = field(default_factory=list)
    elapsed_ms: float = 0.0

    def top(self, limit: int | None) -> list[tuple[int, float]]:
        return self.ranked if limit is None else self.ranked[:limit]

    def to_payload(self, grid: Grid, limit: int | None = None) -> dict:
        return {
            "screened": self.screened,
            "excluded_bridges": self.excluded_bridges,
            "excluded_voltage": self.excluded_voltage,
            "failures": [{"branch": b, "reason": r} for b, r in self.failures],
            "ranking": [
                {
                    "rank": i + 1,
                    "branch": b,
                    "from": grid.external_id(int(grid.from_idx[b])),
                    "to": grid.external_id(int(grid.to_idx[b])),
                    "si": si,
                }
                for i, (b, si) in enumerate(self.top(limit))
            ],
            "elapsed_ms": round(self.elapsed_ms, 3),
        }

    def to_json(self, grid: Grid, limit: int | None = None) -> str:
        return json.dumps(self.to_payload(grid, limit), indent=2) + "\n"

    def to_csv(self, grid: Grid, limit: int | None = None) -> str:
        lines = ["rank,branch_id,from_bus,to_bus,SI"]
        for i, (b, si) in enumerate(self.top(limit)):
            lines.append(
                f"{i + 1},{b},{grid.external_id(int(grid.from_idx[b]))},"
                f"{grid.external_id(int(grid.to_idx[b]))},{si!r}"
            )
        lines.append(f"# elapsed_ms={self.elapsed_ms:.3f}")
        return "\n".join(lines) + "\n"


def fast_screen(grid: Grid, bridges: BridgeReport, min_kv: float = 35.0,
                workers: int = 1, mva_base: float = DEFAULT_MVA_BASE) -> ScreeningResult:
    """Screen every candidate N-1 branch outage and rank by severity index.

    Candidates are all branches minus the detected bridges minus branches
    below the voltage floor (unknown voltage 0 is retained). Each candidate
    gets a superposition update and a severity index, fanned out across
    ``workers`` threads against the shared factorization; per-branch failures
    are collected without aborting the sweep. Ties rank by ascending branch
    id, and the output is identical for any worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    t0 = time.perf_counter()
    bridge_set = set(bridges.bridge_ids)
    excluded_voltage = 0
    candidates = []
    for b in range(grid.n_branches):
        if b in bridge_set:
            continue
        if 0.0 < grid.branch_voltage_kv[b] < min_kv:
            excluded_voltage += 1
            continue
        candidates.append(b)

    base = build_base_case(grid, mva_base)

    def evaluate(chunk: list[int]) -> tuple[list[tuple[int, float]], list[tuple[int, str]]]:
        scored, failed = [], []
        for b in chunk:
            try:
                update = superposition_outage(base, grid, b)
                scored.append((b, severity_index(update.flows, grid, b)))
            except (BridgeOutageError, DegenerateOutageError) as exc:
                failed.append((b, str(exc)))
        return scored, failed

    scored: list[tuple[int, float]] = []
    failures: list[tuple[int, str]] = []
    if workers == 1 or len(candidates) <= 1:
        scored, failures = evaluate(candidates)
    else:
        chunks = [candidates[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part_scored, part_failed in pool.map(evaluate, chunks):
                scored.extend(part_scored)
                failures.extend(part_failed)

    scored.sort(key=lambda item: (-item[1], item[0]))
    failures.sort(key=lambda item: item[0])
    elapsed = (time.perf_counter() - t0) * 1e3
    return ScreeningResult(
        ranked=scored,
        excluded_bridges=len(bridge_set),
        excluded_voltage=excluded_voltage,
        screened=len(candidates),
        failures=failures,
        elapsed_ms=elapsed,
    )
