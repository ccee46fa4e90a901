"""Writers and readers for every artifact format."""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .distfield import ScalarField
from .lift import BoundaryMesh, LiftedIndicator
from .ops.curve import OperatorMatrix
from .topo import DimensionFit


class ExportError(OSError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _ensure_nonempty(mesh: BoundaryMesh) -> None:
    if mesh is None or len(mesh.cells) == 0:
        raise ExportError("refusing to export an empty mesh")


def _xyz(mesh: BoundaryMesh) -> np.ndarray:
    v = np.asarray(mesh.vertices, float)
    if v.shape[1] == 2:
        v = np.column_stack([v, np.zeros(len(v))])
    return v


def write_obj(mesh: BoundaryMesh, path) -> Path:
    """ASCII OBJ with ``v`` records and ``l`` (polyline) or ``f`` (triangle) records."""
    _ensure_nonempty(mesh)
    path = Path(path)
    tag = "l" if mesh.cells.shape[1] == 2 else "f"
    lines = ["# lifted boundary"]
    lines += [f"v {_fmt(a)} {_fmt(b)} {_fmt(c)}" for a, b, c in _xyz(mesh)]
    lines += [tag + " " + " ".join(str(int(i) + 1) for i in cell) for cell in mesh.cells]
    _write_text(path, "\n".join(lines) + "\n")
    return path


def read_obj(path) -> BoundaryMesh:
    verts, cells = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] in ("l", "f"):
            cells.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
    v = np.array(verts)
    c = np.array(cells, dtype=np.int64)
    if c.shape[1] == 2 and np.all(v[:, 2] == 0):
        v = v[:, :2]
    return BoundaryMesh(v, c, 0.0)


def write_ply(mesh: BoundaryMesh, path) -> Path:
    """Binary little-endian PLY 1.0; triangles as ``face``, segments as ``edge``."""
    _ensure_nonempty(mesh)
    path = Path(path)
    v = _xyz(mesh)
    cells = mesh.cells
    header = ["ply", "format binary_little_endian 1.0", "comment lifted boundary",
              f"element vertex {len(v)}", "property double x", "property double y", "property double z"]
    if cells.shape[1] == 3:
        header += [f"element face {len(cells)}", "property list uchar int vertex_indices"]
    else:
        header += [f"element edge {len(cells)}", "property int vertex1", "property int vertex2"]
    header.append("end_header")
    body = bytearray(("\n".join(header) + "\n").encode("ascii"))
    body += v.astype("<f8").tobytes()
    if cells.shape[1] == 3:
        rec = np.zeros(len(cells), dtype=[("n", "u1"), ("idx", "<i4", (3,))])
        rec["n"] = 3
        rec["idx"] = cells
        body += rec.tobytes()
    else:
        body += cells.astype("<i4").tobytes()
    _write_bytes(path, bytes(body))
    return path


def read_ply(path) -> BoundaryMesh:
    data = Path(path).read_bytes()
    end = data.index(b"end_header\n") + len(b"end_header\n")
    header = data[:end].decode("ascii").splitlines()
    if header[1] != "format binary_little_endian 1.0":
        raise ExportError("only binary little-endian PLY is supported")
    counts = {}
    for line in header:
        if line.startswith("element"):
            _, name, n = line.split()
            counts[name] = int(n)
    nv = counts["vertex"]
    v = np.frombuffer(data, "<f8", 3 * nv, end).reshape(nv, 3)
    off = end + 24 * nv
    if "face" in counts:
        rec = np.frombuffer(data, [("n", "u1"), ("idx", "<i4", (3,))], counts["face"], off)
        c = rec["idx"].astype(np.int64)
    else:
        c = np.frombuffer(data, "<i4", 2 * counts["edge"], off).reshape(-1, 2).astype(np.int64)
        if np.all(v[:, 2] == 0):
            v = v[:, :2]
    return BoundaryMesh(v.copy(), c, 0.0)


def export_mesh(mesh: BoundaryMesh, fmt: str, path) -> Path:
    writers = {"obj": write_obj, "ply": write_ply}
    if fmt not in writers:
        raise ExportError(f"unknown mesh format {fmt!r}")
    return writers[fmt](mesh, path)


def write_csv(header: Sequence[str], rows: Iterable[Sequence], path) -> Path:
    rows = list(rows)
    if not rows:
        raise ExportError("refusing to write an empty table")
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(header)
            w.writerows([_fmt(x) for x in row] for row in rows)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path


def field_table(field: ScalarField):
    grid = field.grid
    nodes = grid.nodes()
    axes = ["x", "y"][: grid.dimension]
    header = [f"i{k}" for k in range(grid.dimension)] + axes + ["value"]
    idx = np.indices(grid.shape).reshape(grid.dimension, -1).T
    rows = [list(i) + list(x) + [v] for i, x, v in zip(idx, nodes, field.values.ravel())]
    return header, rows


def fit_table(fit: DimensionFit):
    return ["scale", "count", "log_inv_scale", "log_count"], list(fit.rows())


def operator_table(op: OperatorMatrix):
    """One row per matrix row; complex entries as re/im pairs, quaternions as 4-tuples."""
    e = op.entries
    if op.kind == "quaternion":
        n, m = e.shape[:2]
        header = [f"{c}_{j}" for j in range(m) for c in "wxyz"]
        rows = e.reshape(n, 4 * m).tolist()
    else:
        header = [f"{c}_{j}" for j in range(e.shape[1]) for c in ("re", "im")]
        rows = np.stack([e.real, e.imag], axis=-1).reshape(e.shape[0], -1).tolist()
    return header, rows


def export_csv(table, path) -> Path:
    if isinstance(table, ScalarField):
        header, rows = field_table(table)
    elif isinstance(table, DimensionFit):
        header, rows = fit_table(table)
    elif isinstance(table, OperatorMatrix):
        header, rows = operator_table(table)
    else:
        header, rows = table
    return write_csv(header, rows, path)


_MAGIC = b"ULIFT1"


def write_occupancy(indicator: LiftedIndicator, path) -> Path:
    """Run-length encoded occupancy lattice.

    Layout (little-endian): 6-byte magic, uint16 ndim, float64 base spacing,
    ndim uint32 dims, float64 t_max, uint32 run count, then uint32 run
    lengths alternating unoccupied/occupied starting with unoccupied.
    """
    occ = indicator.occupancy
    flat = occ.ravel().astype(np.int8)
    change = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate([[0], change, [flat.size]])
    runs = np.diff(bounds)
    if flat.size and flat[0]:
        runs = np.concatenate([[0], runs])
    out = bytearray(_MAGIC + struct.pack("<Hd", occ.ndim, indicator.base_grid.h))
    out += struct.pack(f"<{occ.ndim}I", *occ.shape)
    out += struct.pack("<dI", indicator.t_max, len(runs))
    out += runs.astype("<u4").tobytes()
    _write_bytes(Path(path), bytes(out))
    return Path(path)


def read_occupancy(path):
    """Returns (occupancy, base spacing, t_max)."""
    data = Path(path).read_bytes()
    if data[:6] != _MAGIC:
        raise ExportError("not an occupancy file")
    ndim, h = struct.unpack_from("<Hd", data, 6)
    off = 16
    dims = struct.unpack_from(f"<{ndim}I", data, off)
    off += 4 * ndim
    t_max, nruns = struct.unpack_from("<dI", data, off)
    off += 12
    runs = np.frombuffer(data, "<u4", nruns, off)
    values = np.arange(nruns) % 2 == 1
    occ = np.repeat(values, runs).reshape(dims)
    return occ, h, t_max


def dumps_json(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, floats via repr."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(obj, path) -> Path:
    path = Path(path)
    _write_text(path, dumps_json(obj))
    return path


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_text(path: Path, text: str) -> None:
    _write_bytes(path, text.encode("utf-8"))


def _write_bytes(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
