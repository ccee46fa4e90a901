"""Connected components, box-counting dimension, and Euler characteristics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

import numba
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .lift import BoundaryMesh, LiftedIndicator
from .region import PointSet


class NonBijectiveError(RuntimeError):
    def __init__(self, message, offending):
        super().__init__(message)
        self.offending = offending


class NonWatertightError(RuntimeError):
    def __init__(self, message, edges):
        super().__init__(message)
        self.edges = edges


class DimensionFitError(ValueError):
    pass


@dataclass(frozen=True)
class LabelField:
    labels: np.ndarray
    component_count: int

    @property
    def dims(self) -> tuple:
        return self.labels.shape


@numba.njit(cache=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@numba.njit(cache=True)
def _label_flat(occ, shape, strides):
    n = occ.shape[0]
    parent = np.arange(n)
    nd = shape.shape[0]
    for i in range(n):
        if not occ[i]:
            continue
        for k in range(nd):
            if (i // strides[k]) % shape[k] == 0:
                continue
            j = i - strides[k]
            if occ[j]:
                a = _find(parent, i)
                b = _find(parent, j)
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
    labels = np.zeros(n, np.int64)
    root_label = np.zeros(n, np.int64)
    count = 0
    for i in range(n):
        if not occ[i]:
            continue
        r = _find(parent, i)
        if root_label[r] == 0:
            count += 1
            root_label[r] = count
        labels[i] = root_label[r]
    return labels, count


def label_components(occupancy: np.ndarray) -> LabelField:
    """Face-adjacency components; labels ordered by each component's first node in C order."""
    occ = np.ascontiguousarray(occupancy, dtype=bool)
    shape = np.array(occ.shape, dtype=np.int64)
    strides = np.array([int(np.prod(occ.shape[k + 1:])) for k in range(occ.ndim)], dtype=np.int64)
    labels, count = _label_flat(occ.ravel(), shape, strides)
    return LabelField(labels.reshape(occ.shape), int(count))


def lifted_component_bijection(labels_u: LabelField, labels_lifted: LabelField,
                               indicator: LiftedIndicator) -> dict[int, int]:
    """Map each component of U to the unique lifted component above it.

    Raises NonBijectiveError when a base component meets zero or several
    lifted components, or a lifted component sits over several base ones.
    """
    occ = indicator.occupancy
    base = np.broadcast_to(labels_u.labels[..., None], occ.shape)[occ]
    up = labels_lifted.labels[occ]
    pairs = np.unique(np.column_stack([base, up]), axis=0) if len(base) else np.zeros((0, 2), int)
    image: dict[int, set] = {v: set() for v in range(1, labels_u.component_count + 1)}
    preimage: dict[int, set] = {w: set() for w in range(1, labels_lifted.component_count + 1)}
    for v, w in pairs:
        image.setdefault(int(v), set()).add(int(w))
        preimage.setdefault(int(w), set()).add(int(v))
    bad_v = {v: sorted(ws) for v, ws in image.items() if len(ws) != 1}
    bad_w = {w: sorted(vs) for w, vs in preimage.items() if len(vs) != 1}
    if 0 in image:
        bad_v[0] = sorted(image[0])
    if bad_v or bad_w:
        raise NonBijectiveError(
            f"component map is not a bijection: base {bad_v}, lifted {bad_w}",
            {"base": bad_v, "lifted": bad_w})
    return {v: next(iter(ws)) for v, ws in sorted(image.items())}


def mesh_component_count(mesh: BoundaryMesh) -> int:
    """Components of the vertex-edge graph; fills ``mesh.component_id`` per cell."""
    c = mesh.cells
    k = c.shape[1]
    rows = np.concatenate([c[:, i] for i in range(k)])
    cols = np.concatenate([c[:, (i + 1) % k] for i in range(k)])
    nv = len(mesh.vertices)
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(nv, nv))
    _, vlab = connected_components(adj, directed=False)
    used = np.unique(c)
    # relabel by first appearance among used vertices so ids are 0..count-1
    _, first = np.unique(vlab[used], return_index=True)
    order = np.argsort(first)
    remap = np.full(vlab.max() + 1, -1)
    remap[np.unique(vlab[used])[order]] = np.arange(len(order))
    mesh.component_id = remap[vlab[c[:, 0]]]
    return int(len(order))


@dataclass(frozen=True)
class DimensionFit:
    scales: np.ndarray
    counts: np.ndarray
    slope: float
    residual: float
    intercept: float = 0.0

    def rows(self):
        for s, n in zip(self.scales, self.counts):
            yield float(s), int(n), float(np.log(1 / s)), float(np.log(n))


def _sample_cells(mesh: BoundaryMesh, spacing: float) -> np.ndarray:
    v = mesh.vertices[mesh.cells]
    if mesh.cells.shape[1] == 2:
        ln = np.linalg.norm(v[:, 1] - v[:, 0], axis=1)
        m = max(1, int(np.ceil(ln.max() / spacing)))
        u = np.linspace(0.0, 1.0, m + 1)
        return (v[:, None, 0] * (1 - u)[None, :, None] + v[:, None, 1] * u[None, :, None]).reshape(-1, v.shape[2])
    edge = np.max([np.linalg.norm(v[:, a] - v[:, b], axis=1).max() for a, b in ((0, 1), (1, 2), (2, 0))])
    m = max(1, int(np.ceil(edge / spacing)))
    ij = [(i, j) for i in range(m + 1) for j in range(m + 1 - i)]
    bary = np.array([(i / m, j / m, 1 - (i + j) / m) for i, j in ij])
    return np.einsum("kb,cbd->ckd", bary, v).reshape(-1, v.shape[2])


def box_counts(points: np.ndarray, scales: Sequence[float], origin=None) -> np.ndarray:
    pts = np.asarray(points, float)
    o = pts.min(axis=0) if origin is None else np.asarray(origin, float)
    out = []
    for s in scales:
        # nudge points sitting on a box face into the upper box consistently
        idx = np.floor((pts - o) / s + 1e-9).astype(np.int64)
        out.append(len(np.unique(idx, axis=0)))
    return np.array(out)


def box_counting_dimension(target: Union[PointSet, BoundaryMesh], scales: Sequence[float],
                           origin=None) -> DimensionFit:
    """Least-squares slope of log N(s) against log(1/s).

    Mesh cells are sampled at spacing <= s/4 before counting at scale s.
    Boxes are anchored at the target's lower corner unless ``origin`` is given.
    """
    scales = np.array(sorted(map(float, scales), reverse=True))
    if isinstance(target, BoundaryMesh):
        pts_all = target.vertices
        o = pts_all.min(axis=0) if origin is None else origin
        counts = np.array([box_counts(_sample_cells(target, s / 4), [s], o)[0] for s in scales])
    else:
        counts = box_counts(target.points, scales, origin)
    usable = counts > 0
    if usable.sum() < 2:
        raise DimensionFitError("fewer than 2 usable scales")
    x = np.log(1 / scales[usable])
    y = np.log(counts[usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return DimensionFit(scales, counts, float(slope), resid, float(intercept))


def _edges(cells: np.ndarray) -> np.ndarray:
    k = cells.shape[1]
    e = np.concatenate([cells[:, [i, (i + 1) % k]] for i in range(k)])
    return np.sort(e, axis=1)


def euler_characteristic(mesh: BoundaryMesh) -> int:
    """V - E (closed polylines) or V - E + F (watertight triangle meshes)."""
    c = mesh.cells
    used = np.unique(c)
    if c.shape[1] == 2:
        deg = Counter(c.ravel().tolist())
        bad = sorted(v for v, d in deg.items() if d % 2)
        if bad:
            raise NonWatertightError(f"polyline not closed at vertices {bad[:10]}", bad)
        edges = np.unique(np.sort(c, axis=1), axis=0)
        return int(len(used) - len(edges))
    e, mult = np.unique(_edges(c), axis=0, return_counts=True)
    bad = e[mult != 2]
    if len(bad):
        raise NonWatertightError(f"{len(bad)} edges not shared by exactly two triangles, "
                                 f"e.g. {bad[:5].tolist()}", bad)
    return int(len(used) - len(e) + len(c))
