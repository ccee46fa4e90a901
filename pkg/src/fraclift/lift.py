"""The lifted open set one dimension up and its boundary as a mesh.

A node (x, t) of the lifted lattice is occupied iff x lies in U and
|t| < d(x). The boundary is built directly as the two graphs t = +d(x) and
t = -d(x) over the closure of U, glued along the nodes where the kept region
ends (and, in 1-D, at interior zeros of d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .distfield import Grid, GridError, ScalarField
from .region import PointSet, RegionSpec, closure_contains, contains_points


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class LiftedIndicator:
    base_grid: Grid
    t_max: float
    t_resolution: int
    occupancy: np.ndarray

    @property
    def t_min(self) -> float:
        return -self.t_max

    @property
    def ht(self) -> float:
        return 2 * self.t_max / self.t_resolution

    def t_values(self) -> np.ndarray:
        return -self.t_max + self.ht * np.arange(self.t_resolution + 1)

    def cell_measure(self) -> float:
        return self.base_grid.h ** self.base_grid.dimension * self.ht

    def occupied_measure(self) -> float:
        return float(self.occupancy.sum()) * self.cell_measure()


def lift_open_set(region: RegionSpec, dfield: ScalarField, t_resolution: Optional[int] = None, *,
                  t_max: Optional[float] = None, height: Optional[ScalarField] = None,
                  restrict: Optional[RegionSpec] = None) -> LiftedIndicator:
    """Occupancy of the lifted set on the (n+1)-dimensional node lattice.

    ``height`` replaces d by another lifting height (the regularized
    distance). ``restrict`` lifts a single component V instead of U.
    Without ``t_resolution`` the t spacing equals the base spacing.
    """
    grid = dfield.grid
    hv = (height or dfield).values
    base = restrict if restrict is not None else region
    inside = contains_points(base, grid.nodes()).reshape(grid.shape)
    # the t-range is sized from the whole of U so component lifts share a lattice
    in_u = contains_points(region, grid.nodes()).reshape(grid.shape)
    need = float(hv[in_u].max()) if in_u.any() else 0.0
    if t_resolution is None:
        half = max(1, math.ceil(need / grid.h) + 1)
        t_resolution = 2 * half
        if t_max is None:
            t_max = half * grid.h
    if t_resolution < 2 or t_resolution % 2:
        raise GridError("t_resolution must be an even integer >= 2 so that t = 0 is a node")
    if t_max is None:
        t_max = need * (1 + 1e-9) + 1e-12
    if t_max < need:
        raise GridError(f"t-range [-{t_max}, {t_max}] does not cover max distance {need}")
    ht = 2 * t_max / t_resolution
    t = -t_max + ht * np.arange(t_resolution + 1)
    occ = inside[..., None] & (np.abs(t) < hv[..., None])
    return LiftedIndicator(grid, float(t_max), int(t_resolution), occ)


def empty_interior_check(indicator: LiftedIndicator) -> float:
    """Fraction of lattice nodes with a face neighbour of different occupancy.

    Nodes beyond the lattice edge count as unoccupied, so a fully occupied
    lattice reports exactly its outer shell.
    """
    occ = indicator.occupancy
    pad = np.pad(occ, 1, constant_values=False)
    boundary = np.zeros(occ.shape, dtype=bool)
    for ax in range(occ.ndim):
        for lo, hi in ((0, -2), (2, None)):
            sl = [slice(1, -1)] * occ.ndim
            sl[ax] = slice(lo, hi)
            boundary |= pad[tuple(sl)] != occ
    return float(boundary.sum()) / occ.size


@dataclass
class BoundaryMesh:
    """Polyline (n = 1) or triangle mesh (n = 2) in R^(n+1)."""

    vertices: np.ndarray
    cells: np.ndarray
    h: float
    component_id: Optional[np.ndarray] = None

    @property
    def base_dimension(self) -> int:
        return self.vertices.shape[1] - 1

    def __len__(self):
        return len(self.cells)

    def total_measure(self) -> float:
        v = self.vertices[self.cells]
        if self.cells.shape[1] == 2:
            return float(np.linalg.norm(v[:, 1] - v[:, 0], axis=1).sum())
        cr = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        return float(0.5 * np.linalg.norm(cr, axis=1).sum())


def _kept_nodes(grid: Grid, region: RegionSpec):
    nodes = grid.nodes()
    in_u = contains_points(region, nodes).reshape(grid.shape)
    kept = closure_contains(region, nodes).reshape(grid.shape) | in_u
    for ax in range(in_u.ndim):
        sl_a = [slice(None)] * in_u.ndim
        sl_b = [slice(None)] * in_u.ndim
        sl_a[ax] = slice(1, None)
        sl_b[ax] = slice(None, -1)
        kept[tuple(sl_a)] |= in_u[tuple(sl_b)]
        kept[tuple(sl_b)] |= in_u[tuple(sl_a)]
    return in_u, kept


def _extract_1d(grid: Grid, hv: np.ndarray, kept: np.ndarray) -> BoundaryMesh:
    h = grid.h
    x = grid.axis(0)
    verts: list[tuple[float, float]] = []
    segs: list[tuple[int, int]] = []
    n = len(kept)
    i = 0
    while i < n:
        if not kept[i]:
            i += 1
            continue
        s = i
        while i + 1 < n and kept[i + 1]:
            i += 1
        e = i
        i += 1
        while e - s >= 1 and hv[s + 1] <= min(h / 2, hv[s]):
            s += 1
        while e - s >= 1 and hv[e - 1] <= min(h / 2, hv[e]):
            e -= 1
        if e - s < 1:
            continue
        shared = np.zeros(e - s + 1, dtype=bool)
        shared[0] = shared[-1] = True
        for k in range(s + 1, e):
            if hv[k] <= h / 2 and hv[k] < hv[k - 1] and hv[k] <= hv[k + 1]:
                shared[k - s] = True
        top = np.empty(e - s + 1, dtype=np.int64)
        bot = np.empty(e - s + 1, dtype=np.int64)
        for k in range(s, e + 1):
            if shared[k - s]:
                verts.append((x[k], 0.0))
                top[k - s] = bot[k - s] = len(verts) - 1
            else:
                verts.append((x[k], float(hv[k])))
                top[k - s] = len(verts) - 1
                verts.append((x[k], -float(hv[k])))
                bot[k - s] = len(verts) - 1
        for k in range(e - s):
            segs.append((bot[k], bot[k + 1]))
            if not (shared[k] and shared[k + 1]):
                segs.append((top[k + 1], top[k]))
    if not segs:
        raise MeshError("empty mesh: region has no closure nodes")
    return BoundaryMesh(np.array(verts, dtype=float), np.array(segs, dtype=np.int64), h)


def _cell_corner_counts(cell: np.ndarray) -> np.ndarray:
    cnt = np.zeros((cell.shape[0] + 1, cell.shape[1] + 1), dtype=np.int64)
    c = cell.astype(np.int64)
    cnt[:-1, :-1] += c
    cnt[1:, :-1] += c
    cnt[:-1, 1:] += c
    cnt[1:, 1:] += c
    return cnt


def _clean_cells(cell: np.ndarray) -> np.ndarray:
    """Remove cells until the kept complex is a 2-manifold with boundary
    whose double is watertight."""
    cell = cell.copy()
    while True:
        cnt = _cell_corner_counts(cell)
        bnd = (cnt > 0) & (cnt < 4)
        changed = False
        # cells whose four corners all lie on the boundary would double flat
        flat = cell & bnd[:-1, :-1] & bnd[1:, :-1] & bnd[:-1, 1:] & bnd[1:, 1:]
        if flat.any():
            cell &= ~flat
            continue
        # pinch nodes: exactly two cells meeting diagonally
        p = np.zeros_like(cell)
        c00 = np.pad(cell, 1)[:-1, :-1]   # cell (i-1, j-1) for node (i, j)
        c10 = np.pad(cell, 1)[1:, :-1]    # cell (i, j-1)
        c01 = np.pad(cell, 1)[:-1, 1:]    # cell (i-1, j)
        c11 = np.pad(cell, 1)[1:, 1:]     # cell (i, j)
        diag_a = c00 & c11 & ~c10 & ~c01
        diag_b = c10 & c01 & ~c00 & ~c11
        if diag_a.any() or diag_b.any():
            ii, jj = np.nonzero(diag_a)
            p[ii - 1, jj - 1] = True
            ii, jj = np.nonzero(diag_b)
            p[ii, jj - 1] = True
            cell &= ~p
            continue
        # necks: an interior grid edge whose two end nodes are both on the boundary
        e0 = bnd[:-1, :] & bnd[1:, :]          # edge (i,j)-(i+1,j), cells (i,j-1), (i,j)
        lo = np.pad(cell, ((0, 0), (1, 0)))
        hi = np.pad(cell, ((0, 0), (0, 1)))
        neck = e0 & lo & hi
        if neck.any():
            ii, jj = np.nonzero(neck)
            cell[ii, jj] = False
            changed = True
        e1 = bnd[:, :-1] & bnd[:, 1:]          # edge (i,j)-(i,j+1), cells (i-1,j), (i,j)
        lo = np.pad(cell, ((1, 0), (0, 0)))
        hi = np.pad(cell, ((0, 1), (0, 0)))
        neck = e1 & lo & hi
        if neck.any():
            ii, jj = np.nonzero(neck)
            cell[ii, jj] = False
            changed = True
        if not changed:
            return cell


def _extract_2d(grid: Grid, hv: np.ndarray, kept: np.ndarray, separate_sheets: bool = False) -> BoundaryMesh:
    cell = kept[:-1, :-1] & kept[1:, :-1] & kept[:-1, 1:] & kept[1:, 1:]
    cell = _clean_cells(cell)
    while separate_sheets:
        flat_inner = (_cell_corner_counts(cell) == 4) & (hv <= 0)
        if not flat_inner.any():
            break
        near = np.zeros_like(cell)
        for di in (0, 1):
            for dj in (0, 1):
                near |= flat_inner[di:di + cell.shape[0], dj:dj + cell.shape[1]]
        cell = _clean_cells(cell & ~near)
    if not cell.any():
        raise MeshError("empty mesh: region has no closure nodes")
    cnt = _cell_corner_counts(cell)
    used = cnt > 0
    shared = used & (cnt < 4)
    inner = used & ~shared

    x0, x1 = grid.axis(0), grid.axis(1)
    n0, n1 = used.shape
    top = -np.ones(used.shape, dtype=np.int64)
    bot = -np.ones(used.shape, dtype=np.int64)
    order = np.flatnonzero(used.ravel())
    nv_per = np.where(shared.ravel()[order], 1, 2)
    start = np.concatenate([[0], np.cumsum(nv_per)[:-1]])
    top.ravel()[order] = start
    bot.ravel()[order] = start + nv_per - 1
    verts = np.zeros((int(nv_per.sum()), 3))
    ii, jj = np.unravel_index(order, used.shape)
    verts[start, 0] = x0[ii]
    verts[start, 1] = x1[jj]
    verts[start, 2] = np.where(shared[ii, jj], 0.0, hv[ii, jj])
    dbl = inner[ii, jj]
    verts[start[dbl] + 1, 0] = x0[ii[dbl]]
    verts[start[dbl] + 1, 1] = x1[jj[dbl]]
    verts[start[dbl] + 1, 2] = -hv[ii[dbl], jj[dbl]]

    ci, cj = np.nonzero(cell)
    corners = [(ci, cj), (ci + 1, cj), (ci + 1, cj + 1), (ci, cj + 1)]
    a, b, c, d = corners
    # split along b-d when a and c are both glue nodes
    use_bd = shared[a] & shared[c]
    tris = []
    for ids in (top, bot):
        A, B, C, D = ids[a], ids[b], ids[c], ids[d]
        t1 = np.where(use_bd[:, None], np.column_stack([A, B, D]), np.column_stack([A, B, C]))
        t2 = np.where(use_bd[:, None], np.column_stack([B, C, D]), np.column_stack([A, C, D]))
        tt = np.empty((2 * len(ci), 3), dtype=np.int64)
        tt[0::2] = t1
        tt[1::2] = t2
        if ids is bot:
            tt = tt[:, ::-1]
        tris.append(tt)
    return BoundaryMesh(verts, np.vstack(tris), grid.h)


def extract_lifted_boundary(dfield: ScalarField, region: RegionSpec, *,
                            height: Optional[ScalarField] = None,
                            separate_sheets: bool = False) -> BoundaryMesh:
    """Mesh of the graphs t = +/- height(x) over the closure of U.

    Where the height vanishes at an interior node of a 2-D complex the two
    sheets touch there through coincident vertices, exactly as the graphs do.
    ``separate_sheets=True`` instead removes the cells around such nodes,
    which surface quadrature needs (distinct collocation points).
    """
    grid = dfield.grid
    hv = (height or dfield).values
    _, kept = _kept_nodes(grid, region)
    if grid.dimension == 1:
        return _extract_1d(grid, hv, kept)
    return _extract_2d(grid, hv, kept, separate_sheets)


def slice_t_zero(mesh: BoundaryMesh) -> PointSet:
    sel = np.abs(mesh.vertices[:, -1]) <= mesh.h / 2
    return PointSet(mesh.vertices[sel], mesh.h)


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return float(max(da.max(), db.max()))


def embed_t_zero(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, float)
    return np.column_stack([points, np.zeros(len(points))])
