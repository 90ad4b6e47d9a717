"""CSV/JSON file formats shared by the command line tools.

All tables carry a header row except the dense distance matrix, which is
``n`` lines of ``n`` comma-separated values. Reals are written with 17
significant digits so that a write/read round trip is lossless.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import DataIOError, IngestionError, InvalidInputError
from .graph import Graph
from .sifting import DecompositionResult

__all__ = [
    "fmt",
    "write_table",
    "read_table",
    "read_points",
    "write_points",
    "read_signal",
    "write_signal",
    "read_edges",
    "write_edges",
    "bind_signal",
    "read_distance_matrix",
    "write_distance_matrix",
    "write_decomposition",
    "read_decomposition",
    "write_spectrum",
    "write_imf_spectra",
    "write_json",
]


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _open(path, mode):
    try:
        return open(path, mode, newline="")
    except OSError as exc:
        raise DataIOError(f"cannot open {path}: {exc.strerror}") from exc


def write_table(path, header: list[str], columns: list) -> None:
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0]) if cols else 0
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataIOError(f"cannot create directory for {path}: {exc.strerror}") from exc
    with _open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(c[i]) for c in cols) + "\n")


def read_table(path) -> tuple[list[str], list[list[str]]]:
    if not Path(path).is_file():
        raise DataIOError(f"no such file: {path}")
    with _open(path, "r") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise InvalidInputError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def _parse_float(text: str, path, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise InvalidInputError(f"{path}:{line}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise InvalidInputError(f"{path}:{line}: non-finite value {text!r}")
    return v


def _parse_ids(rows, path) -> np.ndarray:
    ids = []
    for k, r in enumerate(rows, start=2):
        try:
            ids.append(int(r[0]))
        except ValueError:
            raise InvalidInputError(f"{path}:{k}: id must be an integer, got {r[0]!r}") from None
    ids = np.array(ids, dtype=np.int64)
    uniq, counts = np.unique(ids, return_counts=True)
    if np.any(counts > 1):
        raise IngestionError(f"{path}: duplicate id {int(uniq[counts > 1][0])}")
    return ids


def read_points(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``id,x[,y]``; returns ids and coordinates of shape (n,) or (n, 2)."""
    header, rows = read_table(path)
    if header[:2] != ["id", "x"] or len(header) not in (2, 3) or (len(header) == 3 and header[2] != "y"):
        raise InvalidInputError(f"{path}: expected header 'id,x' or 'id,x,y', got {','.join(header)}")
    ids = _parse_ids(rows, path)
    ncol = len(header) - 1
    coords = np.array(
        [[_parse_float(r[c], path, k) for c in range(1, ncol + 1)] for k, r in enumerate(rows, start=2)]
    ).reshape(len(rows), ncol)
    return ids, coords[:, 0] if ncol == 1 else coords


def write_points(path, ids, coords) -> None:
    coords = np.asarray(coords)
    if coords.ndim == 1:
        write_table(path, ["id", "x"], [ids, coords])
    else:
        write_table(path, ["id", "x", "y"], [ids, coords[:, 0], coords[:, 1]])


def read_signal(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``id,value``."""
    header, rows = read_table(path)
    if header != ["id", "value"]:
        raise InvalidInputError(f"{path}: expected header 'id,value', got {','.join(header)}")
    ids = _parse_ids(rows, path)
    vals = np.array([_parse_float(r[1], path, k) for k, r in enumerate(rows, start=2)])
    return ids, vals


def write_signal(path, ids, values) -> None:
    write_table(path, ["id", "value"], [ids, values])


def bind_signal(point_ids, signal_ids, values) -> np.ndarray:
    """Reorder signal values to follow ``point_ids``; the id sets must coincide."""
    pos = {int(i): k for k, i in enumerate(signal_ids)}
    missing = [int(i) for i in point_ids if int(i) not in pos]
    extra = sorted(set(pos) - {int(i) for i in point_ids})
    if missing or extra:
        raise IngestionError(
            f"point and signal ids differ: missing signal for {missing[:10]}, "
            f"no point for {extra[:10]}"
        )
    return np.asarray(values)[[pos[int(i)] for i in point_ids]]


def read_edges(path, n: int | None = None) -> Graph:
    """Read ``i,j,weight`` into a graph on ``n`` vertices (default: max index + 1)."""
    header, rows = read_table(path)
    if header != ["i", "j", "weight"]:
        raise InvalidInputError(f"{path}: expected header 'i,j,weight', got {','.join(header)}")
    try:
        e = np.array([[int(r[0]), int(r[1])] for r in rows], dtype=np.intp).reshape(-1, 2)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: bad vertex index ({exc})") from None
    w = np.array([_parse_float(r[2], path, k) for k, r in enumerate(rows, start=2)])
    if n is None:
        n = int(e.max()) + 1 if len(e) else 0
    return Graph(n, e, w)


def write_edges(path, g: Graph) -> None:
    write_table(path, ["i", "j", "weight"], [g.edges[:, 0], g.edges[:, 1], g.weights])


def read_distance_matrix(path) -> np.ndarray:
    if not Path(path).is_file():
        raise DataIOError(f"no such file: {path}")
    with _open(path, "r") as fh:
        rows = [r for r in csv.reader(fh) if r]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InvalidInputError(f"{path}: distance matrix must be square")
    return np.array([[_parse_float(v, path, k) for v in r] for k, r in enumerate(rows, start=1)])


def write_distance_matrix(path, C) -> None:
    C = np.asarray(C)
    with _open(path, "w") as fh:
        for row in C:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_json(path, obj) -> None:
    def default(o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.bool_):
            return bool(o)
        raise TypeError(f"cannot serialise {type(o).__name__}")

    with _open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")


def write_decomposition(out_dir, result: DecompositionResult, vertex_ids=None, extra: dict | None = None):
    """Write ``imfs.csv`` (``vertex,imf_0,...,residual``) and the ``imfs.json`` sidecar."""
    out = Path(out_dir)
    comps = result.components
    n = len(result.residual)
    ids = np.arange(n) if vertex_ids is None else np.asarray(vertex_ids)
    header = ["vertex"] + [f"imf_{k}" for k in range(len(result.imfs))] + ["residual"]
    write_table(out / "imfs.csv", header, [ids, *comps])
    meta = {
        "method": result.method,
        "input_checksum": result.input_checksum,
        "n": n,
        "num_imfs": len(result.imfs),
        "imfs": [m.to_dict() for m in result.meta],
    }
    if extra:
        meta.update(extra)
    write_json(out / "imfs.json", meta)
    return out / "imfs.csv", out / "imfs.json"


def read_decomposition(path) -> tuple[np.ndarray, list[np.ndarray], np.ndarray]:
    """Inverse of :func:`write_decomposition` for the CSV part: ``(ids, imfs, residual)``."""
    header, rows = read_table(path)
    if header[0] != "vertex" or header[-1] != "residual":
        raise InvalidInputError(f"{path}: not an IMF table")
    data = np.array([[float(v) for v in r[1:]] for r in rows]).reshape(len(rows), len(header) - 1)
    ids = np.array([int(r[0]) for r in rows])
    return ids, [data[:, k] for k in range(data.shape[1] - 1)], data[:, -1]


def write_spectrum(path, eigenvalues, coefficients, kernel=None) -> None:
    """``index,eigenvalue,coefficient[,kernel]``."""
    idx = np.arange(len(eigenvalues))
    if kernel is None:
        write_table(path, ["index", "eigenvalue", "coefficient"], [idx, eigenvalues, coefficients])
    else:
        write_table(
            path, ["index", "eigenvalue", "coefficient", "kernel"], [idx, eigenvalues, coefficients, kernel]
        )


def write_imf_spectra(out_dir, result: DecompositionResult) -> list[Path]:
    """One ``index,eigenvalue,kernel_value,imf_coefficient`` file per GFT-IF extraction."""
    lam = result.info.get("eigenvalues")
    paths = []
    for k, spec in enumerate(result.info.get("spectra", [])):
        p = Path(out_dir) / f"imf_{k}_spectrum.csv"
        write_table(
            p,
            ["index", "eigenvalue", "kernel_value", "imf_coefficient"],
            [np.arange(len(lam)), lam, spec["kernel"], spec["imf"]],
        )
        paths.append(p)
    return paths
