"""Command-line front end: gridsplit detect | screen | bench | gen.

Exit codes are a stable scripting contract: 0 success, 1 input error,
2 topology error (disconnected base grid), 3 numerical error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass

from . import bridges as bridge_engines
from .errors import (
    DisconnectedGridError,
    GridFormatError,
    OutageError,
    SingularSystemError,
)
from .grid_model import (
    DENSE_VERTEX_CAP,
    Grid,
    build_adjacency,
    build_dense_adjacency,
    parse_grid,
    serialize_grid,
)
from .screening import fast_screen
from .synthetic import SynthSpec, generate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_TOPOLOGY = 2
EXIT_NUMERICAL = 3

BENCH_WORKER_COUNTS = (1, 4, 8, 16, 32)


@dataclass
class RunConfig:
    """Validated flags for one command invocation."""

    command: str
    input: str | None = None
    output: str | None = None
    engine: str = "parallel"
    workers: int | None = None
    min_kv: float = 35.0
    top: int | None = None
    format: str = "json"
    buses: int | None = None
    extra_edges: int = 0
    parallel_fraction: float = 0.0
    seed: int = 0
    reps: int = 5
    dense_cap: int = 3000


def _default_workers() -> int:
    env = os.environ.get("GRIDSPLIT_WORKERS")
    if env:
        try:
            value = int(env)
            if value >= 1:
                return value
        except ValueError:
            pass
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridsplit",
        description="Grid-splitting branch detection and N-1 DC contingency screening.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, input_required=True):
        if input_required:
            p.add_argument("--input", required=True, help="grid file to read")
        else:
            p.add_argument("--input", help="grid file to read")
        p.add_argument("--output", help="output file (default: stdout)")

    def add_workers(p):
        p.add_argument("--workers", type=int, default=_default_workers(),
                       help="worker count (default: GRIDSPLIT_WORKERS or CPU count)")

    def add_gen_flags(p):
        p.add_argument("--buses", type=int, help="bus count of the synthetic grid")
        p.add_argument("--extra-edges", type=int, default=0,
                       help="chord edges beyond the spanning tree")
        p.add_argument("--parallel-fraction", type=float, default=0.0,
                       help="fraction of chords duplicated as parallel lines")
        p.add_argument("--seed", type=int, default=0, help="generator seed")

    p = sub.add_parser("detect", help="report the grid-splitting branches")
    add_io(p)
    p.add_argument("--engine", choices=("oracle", "tarjan", "per-edge", "parallel"),
                   default="parallel")
    add_workers(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("screen", help="rank non-splitting N-1 outages by severity")
    add_io(p)
    add_workers(p)
    p.add_argument("--min-kv", type=float, default=35.0,
                   help="exclude branches below this voltage level (0 disables)")
    p.add_argument("--top", type=int, help="emit only the top N ranked cases")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("bench", help="time the detection engines")
    add_io(p, input_required=False)
    add_gen_flags(p)
    p.add_argument("--workers", type=int, default=None,
                   help="bench a single worker count instead of the default sweep")
    p.add_argument("--reps", type=int, default=5, help="repetitions per configuration")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--dense-cap", type=int, default=3000,
                   help="skip the dense per-edge row above this vertex count")

    p = sub.add_parser("gen", help="write a synthetic grid file")
    p.add_argument("--output", help="output file (default: stdout)")
    add_gen_flags(p)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    may_stay_none = {"input", "output", "top", "buses"}
    for name in ("input", "output", "engine", "workers", "min_kv", "top", "format",
                 "buses", "extra_edges", "parallel_fraction", "seed", "reps",
                 "dense_cap"):
        if not hasattr(args, name):
            continue
        value = getattr(args, name)
        if value is None and name not in may_stay_none:
            continue
        setattr(cfg, name, value)
    if getattr(args, "workers", None) is not None and args.workers < 1:
        raise GridFormatError("--workers must be >= 1")
    if cfg.command == "bench" and cfg.reps < 1:
        raise GridFormatError("--reps must be >= 1")
    return cfg


def _read_grid(cfg: RunConfig) -> Grid:
    if cfg.input is None:
        if cfg.buses is None:
            raise GridFormatError("either --input or --buses is required")
        return generate(SynthSpec(seed=cfg.seed, buses=cfg.buses,
                                  extra_edges=cfg.extra_edges,
                                  parallel_fraction=cfg.parallel_fraction))
    with open(cfg.input, encoding="utf-8") as handle:
        return parse_grid(handle.read())


def _write_output(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8") as handle:
            handle.write(text)


def _detect(grid: Grid, engine: str, workers: int) -> bridge_engines.BridgeReport:
    adjacency = build_adjacency(grid)
    if engine == "oracle":
        return bridge_engines.oracle_bridges(grid, adjacency)
    if engine == "tarjan":
        return bridge_engines.tarjan_bridges(grid, adjacency)
    if engine == "per-edge":
        return bridge_engines.per_edge_tarjan_bridges(grid, adjacency)
    return bridge_engines.parallel_bridges(grid, adjacency, workers=workers)


def cmd_detect(cfg: RunConfig) -> int:
    grid = _read_grid(cfg)
    report = _detect(grid, cfg.engine, cfg.workers)
    text = report.to_csv(grid) if cfg.format == "csv" else report.to_json(grid)
    _write_output(cfg, text)
    return EXIT_OK


def cmd_screen(cfg: RunConfig) -> int:
    grid = _read_grid(cfg)
    adjacency = build_adjacency(grid)
    report = bridge_engines.parallel_bridges(grid, adjacency, workers=cfg.workers)
    result = fast_screen(grid, report, min_kv=cfg.min_kv, workers=cfg.workers)
    if cfg.format == "csv":
        text = result.to_csv(grid, cfg.top)
    else:
        text = result.to_json(grid, cfg.top)
    _write_output(cfg, text)
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    grid = _read_grid(cfg)
    adjacency = build_adjacency(grid)
    rows = []
    sweep = BENCH_WORKER_COUNTS if cfg.workers is None else (cfg.workers,)

    for workers in sweep:
        times = []
        bridges_count = 0
        for _ in range(cfg.reps):
            t0 = time.perf_counter()
            report = bridge_engines.parallel_bridges(grid, adjacency, workers=workers)
            times.append((time.perf_counter() - t0) * 1e3)
            bridges_count = report.bridges_count
        rows.append({"engine": "parallel", "workers": workers,
                     "mean_ms": sum(times) / len(times), "bridges": bridges_count})

    times = []
    for _ in range(cfg.reps):
        t0 = time.perf_counter()
        report = bridge_engines.tarjan_bridges(grid, adjacency)
        times.append((time.perf_counter() - t0) * 1e3)
    rows.append({"engine": "tarjan", "workers": None,
                 "mean_ms": sum(times) / len(times), "bridges": report.bridges_count})

    if grid.n_buses <= min(cfg.dense_cap, DENSE_VERTEX_CAP):
        dense = build_dense_adjacency(grid)
        t0 = time.perf_counter()
        report = bridge_engines.per_edge_tarjan_bridges(grid, adjacency, dense=dense)
        rows.append({"engine": "per-edge-dense", "workers": None,
                     "mean_ms": (time.perf_counter() - t0) * 1e3,
                     "bridges": report.bridges_count})
    else:
        print(f"note: dense per-edge row skipped (|V|={grid.n_buses} exceeds "
              f"cap {cfg.dense_cap})", file=sys.stderr)

    _write_output(cfg, _render_bench(rows, cfg.format))
    return EXIT_OK


def _render_bench(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        import json
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        lines = ["engine,workers,mean_ms,bridges"]
        for r in rows:
            w = "" if r["workers"] is None else r["workers"]
            lines.append(f"{r['engine']},{w},{r['mean_ms']:.3f},{r['bridges']}")
        return "\n".join(lines) + "\n"
    lines = [f"{'engine':<16}{'workers':>8}{'mean_ms':>12}{'bridges':>9}"]
    for r in rows:
        w = "-" if r["workers"] is None else str(r["workers"])
        lines.append(f"{r['engine']:<16}{w:>8}{r['mean_ms']:>12.3f}{r['bridges']:>9}")
    return "\n".join(lines) + "\n"


def cmd_gen(cfg: RunConfig) -> int:
    if cfg.buses is None:
        raise GridFormatError("--buses is required for gen")
    grid = generate(SynthSpec(seed=cfg.seed, buses=cfg.buses,
                              extra_edges=cfg.extra_edges,
                              parallel_fraction=cfg.parallel_fraction))
    _write_output(cfg, serialize_grid(grid))
    return EXIT_OK


_COMMANDS = {
    "detect": cmd_detect,
    "screen": cmd_screen,
    "bench": cmd_bench,
    "gen": cmd_gen,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except DisconnectedGridError as exc:
        print(f"gridsplit: {exc}", file=sys.stderr)
        return EXIT_TOPOLOGY
    except (SingularSystemError, OutageError) as exc:
        print(f"gridsplit: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GridFormatError, OSError, ValueError) as exc:
        print(f"gridsplit: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
