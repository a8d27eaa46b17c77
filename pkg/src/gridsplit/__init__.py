"""Grid-splitting detection and N-1 DC contingency screening for power networks."""

from .bridges import (
    BridgeReport,
    DualFrontierState,
    TarjanState,
    bfs_cc,
    oracle_bridges,
    parallel_bridges,
    per_edge_tarjan_bridges,
    tarjan_bridges,
    tarjan_sweep,
)
from .errors import (
    BridgeOutageError,
    DegenerateOutageError,
    DisconnectedGridError,
    GridFormatError,
    OutageError,
    SingularSystemError,
)
from .grid_model import (
    Adjacency,
    Branch,
    Bus,
    DenseAdjacency,
    Grid,
    build_adjacency,
    build_dense_adjacency,
    build_fixture_f1,
    check_connected,
    parse_grid,
    serialize_grid,
)
from .screening import (
    DcBaseCase,
    OutageUpdate,
    ScreeningResult,
    build_base_case,
    fast_screen,
    severity_index,
    superposition_outage,
)
from .synthetic import SynthSpec, generate

__version__ = "0.1.0"

__all__ = [
    "Adjacency",
    "Branch",
    "BridgeOutageError",
    "BridgeReport",
    "Bus",
    "DcBaseCase",
    "DegenerateOutageError",
    "DenseAdjacency",
    "DisconnectedGridError",
    "DualFrontierState",
    "Grid",
    "GridFormatError",
    "OutageError",
    "OutageUpdate",
    "ScreeningResult",
    "SingularSystemError",
    "SynthSpec",
    "TarjanState",
    "bfs_cc",
    "build_adjacency",
    "build_base_case",
    "build_dense_adjacency",
    "build_fixture_f1",
    "check_connected",
    "fast_screen",
    "generate",
    "oracle_bridges",
    "parallel_bridges",
    "parse_grid",
    "per_edge_tarjan_bridges",
    "serialize_grid",
    "severity_index",
    "superposition_outage",
    "tarjan_bridges",
    "tarjan_sweep",
]
