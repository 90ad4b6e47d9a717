"""``graphif`` command line.

Every subcommand accepts the global flags ``--config``, ``--seed``, ``--out``
and ``--quiet`` either before or after the subcommand name. Errors are printed
to stderr as one JSON object and mapped to exit codes 2 (invalid input),
3 (numeric failure) and 4 (i/o).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .errors import DataIOError, GraphIFError, InvalidInputError
from .experiments import limit_check, run_benchmark
from .pipeline import RunConfig, generate_example, ingest, run_decompose, run_spectrum

__all__ = ["main", "build_parser"]

# decompose/spectrum flag -> RunConfig field
_CONFIG_FLAGS = {
    "method": "method",
    "graph": "graph",
    "bundle": "bundle",
    "points": "points",
    "signal": "signal",
    "edges": "edges",
    "neighbors_per_side": "neighbors_per_side",
    "nu": "nu",
    "cutoff": "cutoff",
    "mode": "mode",
    "max_imfs": "max_imfs",
    "distance": "distance",
    "distance_file": "distance_file",
    "edge_length": "edge_length",
}


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _cutoff(text: str):
    if text.strip() == "auto":
        return "auto"
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cutoff must be 'auto' or numbers, got {text!r}") from None


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--config", default=s, help="JSON run configuration")
    p.add_argument("--seed", type=_u64, default=s, help="seed for all randomness")
    p.add_argument("--out", default=s, help="output directory")
    p.add_argument("--quiet", action="store_true", default=s, help="no summary on stdout")
    return p


def _run_flags(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--method", choices=["gft_if", "db_if", "fif"], default=s)
    p.add_argument("--graph", choices=["ring", "delaunay", "edges"], default=s)
    p.add_argument("--bundle", default=s, help="directory written by 'ingest'")
    p.add_argument("--points", default=s, help="CSV id,x[,y]")
    p.add_argument("--signal", default=s, help="CSV id,value")
    p.add_argument("--edges", default=s, help="CSV i,j,weight")
    p.add_argument("--neighbors-per-side", dest="neighbors_per_side", type=int, default=s)
    p.add_argument("--nu", type=float, default=s, help="window-size factor")
    p.add_argument("--cutoff", type=_cutoff, default=s, help="'auto' or comma-separated kernel cutoffs")
    p.add_argument("--mode", choices=["row_stochastic", "symmetrized"], default=s)
    p.add_argument("--stopping", choices=["relative_change", "fixed_iterations"], default=s)
    p.add_argument("--max-iterations", dest="max_iterations", type=int, default=s)
    p.add_argument("--delta", type=float, default=s)
    p.add_argument("--max-imfs", dest="max_imfs", type=int, default=s)
    p.add_argument("--distance", choices=["embedding", "dijkstra", "floyd_warshall"], default=s)
    p.add_argument("--distance-file", dest="distance_file", default=s)
    p.add_argument("--edge-length", dest="edge_length", choices=["inverse_weight", "weight"], default=s)


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="graphif", description="Iterative filtering on graphs.", parents=[common]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a synthetic example")
    p.add_argument("--example", type=int, choices=[1, 2], required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("ingest", parents=[common], help="bind a signal to points and build the graph")
    p.add_argument("--points", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--graph", choices=["ring", "delaunay"], required=True)
    p.add_argument("--neighbors-per-side", dest="neighbors_per_side", type=int, default=2)

    p = sub.add_parser("decompose", parents=[common], help="run GFT-IF, DB-IF or FIF")
    _run_flags(p)
    p = sub.add_parser("spectrum", parents=[common], help="export the GFT of a signal and the kernel")
    _run_flags(p)

    p = sub.add_parser("benchmark", parents=[common], help="time precomputation and runs")
    p.add_argument("--sizes", type=_int_list, default=[128, 512, 2048])
    p.add_argument("--methods", default="gft_if,db_if,fif")
    p.add_argument("--m", type=int, default=10, help="sifting iterations per IMF")
    p.add_argument("--k", type=int, default=10, help="IMFs per run")
    p.add_argument("--sparse", action="store_true", help="let DB-IF store W sparsely")

    p = sub.add_parser("limit-check", parents=[common], help="compare sifting with its closed-form limit")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--iterations", type=int, default=10_000)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    """Merge the optional JSON config with explicit flags; flags win."""
    data = {}
    if getattr(ns, "config", None):
        data = RunConfig.load(ns.config).to_dict()
    for flag, key in _CONFIG_FLAGS.items():
        if hasattr(ns, flag):
            data[key] = getattr(ns, flag)
    stopping = dict(data.get("stopping") or {})
    for key in ("max_iterations", "delta"):
        if hasattr(ns, key):
            stopping[key] = getattr(ns, key)
    if hasattr(ns, "stopping"):
        stopping["mode"] = ns.stopping
    if stopping:
        data["stopping"] = stopping
    if hasattr(ns, "seed"):
        data["seed"] = ns.seed
    if hasattr(ns, "out"):
        data["out"] = ns.out
    return RunConfig.from_dict(data)


def _cmd_generate(ns) -> dict:
    out = Path(getattr(ns, "out", "out"))
    seed = getattr(ns, "seed", 0)
    files = generate_example(ns.example, ns.n, seed, out)
    return {"example": ns.example, "n": ns.n, "seed": seed, "files": {k: str(v) for k, v in files.items()}}


def _cmd_ingest(ns) -> dict:
    out = ingest(ns.points, ns.signal, ns.graph, getattr(ns, "out", "bundle"), ns.neighbors_per_side)
    return {"bundle": str(out)}


def _cmd_decompose(ns) -> dict:
    cfg = config_from_args(ns)
    result, out = run_decompose(cfg)
    return {
        "method": cfg.method,
        "imfs": len(result.imfs),
        "iterations": [m.iterations for m in result.meta],
        "out": str(out),
    }


def _cmd_spectrum(ns) -> dict:
    cfg = config_from_args(ns)
    return {"spectrum": str(run_spectrum(cfg))}


def _cmd_benchmark(ns) -> dict:
    sizes = ns.sizes
    if not sizes or sizes != sorted(sizes):
        raise InvalidInputError(f"benchmark sizes must be ascending, got {sizes}")
    methods = [m.strip() for m in ns.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in ("gft_if", "db_if", "fif")]
    if bad:
        raise InvalidInputError(f"unknown benchmark methods {bad}")
    report = run_benchmark(
        sizes, methods, ns.m, ns.k, seed=getattr(ns, "seed", 0), dense=not ns.sparse
    )
    out = Path(getattr(ns, "out", "benchmark"))
    rows = report.rows
    io.write_table(
        out / "benchmark.csv",
        ["n", "method", "precompute_seconds", "run_seconds", "status"],
        [
            [r.n for r in rows],
            [r.method for r in rows],
            [-1.0 if r.precompute_seconds is None else r.precompute_seconds for r in rows],
            [-1.0 if r.run_seconds is None else r.run_seconds for r in rows],
            [r.status for r in rows],
        ],
    )
    io.write_json(out / "benchmark.json", report.to_dict())
    return report.to_dict()


def _cmd_limit_check(ns) -> dict:
    if ns.trials < 1 or ns.n < 1 or ns.iterations < 1:
        raise InvalidInputError("trials, n and iterations must be positive")
    report = limit_check(ns.trials, ns.n, getattr(ns, "seed", 0), ns.iterations)
    out = Path(getattr(ns, "out", "limit_check"))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataIOError(f"cannot create {out}: {exc.strerror}") from None
    io.write_json(out / "limit_check.json", report)
    return {k: v for k, v in report.items() if k != "errors"}


_COMMANDS = {
    "generate": _cmd_generate,
    "ingest": _cmd_ingest,
    "decompose": _cmd_decompose,
    "spectrum": _cmd_spectrum,
    "benchmark": _cmd_benchmark,
    "limit-check": _cmd_limit_check,
}


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        summary = _COMMANDS[ns.command](ns)
    except GraphIFError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        err = DataIOError(str(exc))
        print(json.dumps(err.to_dict()), file=sys.stderr)
        return err.exit_code
    if not getattr(ns, "quiet", False):
        print(json.dumps(summary, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
