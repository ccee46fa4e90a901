"""Quaternionic Cauchy integrals and Hardy projections on closed triangulated surfaces.

Points of R^3 are pure quaternions x1 i + x2 j + x3 k. Products are always
taken kernel * normal * density (the left Cauchy transform).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..lift import BoundaryMesh
from .curve import OperatorMatrix
from .quaternion import Quaternion, pure, qmatvec, qmul, real_block


class SurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceSampling:
    centroids: np.ndarray
    normals: np.ndarray
    areas: np.ndarray
    sizes: np.ndarray  # longest edge per triangle

    @property
    def n(self) -> int:
        return len(self.areas)

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())


def surface_from_mesh(mesh: BoundaryMesh) -> SurfaceSampling:
    """Centroid sampling with outward normals; orientation is flipped if inward."""
    v = mesh.vertices[mesh.cells]
    if v.shape[1:] != (3, 3):
        raise SurfaceError("surface sampling needs a triangle mesh in R^3")
    cr = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    two_area = np.linalg.norm(cr, axis=1)
    area = two_area / 2
    if np.any(area < 1e-12 * area.sum()):
        bad = np.flatnonzero(area < 1e-12 * area.sum())
        raise SurfaceError(f"degenerate triangles: {bad[:10].tolist()}")
    normal = cr / two_area[:, None]
    cen = v.mean(axis=1)
    flux = np.sum(np.einsum("ij,ij->i", cen - cen.mean(axis=0), normal) * area)
    if flux < 0:
        normal = -normal
    sizes = np.max([np.linalg.norm(v[:, a] - v[:, b], axis=1) for a, b in ((0, 1), (1, 2), (2, 0))], axis=0)
    return SurfaceSampling(cen, normal, area, sizes)


def icosphere(subdivisions: int, radius: float = 1.0) -> BoundaryMesh:
    """Geodesic sphere with 20 * 4**subdivisions triangles, outward orientation."""
    t = (1 + math.sqrt(5)) / 2
    verts = [np.array(p, float) for p in (
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
        (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1))]
    verts = [p / np.linalg.norm(p) for p in verts]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        nxt = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nxt += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = nxt
    V = radius * np.array(verts)
    F = np.array(faces, dtype=np.int64)
    edge = float(np.linalg.norm(V[F[0, 0]] - V[F[0, 1]]))
    return BoundaryMesh(V, F, edge)


def cauchy_kernel(v: np.ndarray) -> np.ndarray:
    """Quaternionic Cauchy kernel evaluated at y - x, as an array (..., 4).

    Equals conj(v) / (4 pi |v|^3) for pure v, the fundamental solution of the
    Dirac operator normalized so that a closed surface's flux around x is 1.
    """
    r = np.linalg.norm(v, axis=-1, keepdims=True)
    return pure(-v / (4 * math.pi * r**3))


def cauchy_integral_surface(surface: SurfaceSampling, density, point) -> Quaternion:
    """Sum_j e(y_j - x) n_j f_j |T_j| for a point x off the surface."""
    x = np.asarray(point, float)
    f = _density_array(density, surface.n)
    dist = np.linalg.norm(surface.centroids - x, axis=1)
    j = int(np.argmin(dist))
    if dist[j] < surface.sizes[j]:
        raise SurfaceError(f"point is within one local mesh size ({surface.sizes[j]:.3g}) of the surface")
    e = cauchy_kernel(surface.centroids - x)
    en = qmul(e, pure(surface.normals))
    out = (qmul(en, f) * surface.areas[:, None]).sum(axis=0)
    return Quaternion.from_array(out)


def _density_array(density, n: int) -> np.ndarray:
    if isinstance(density, Quaternion):
        return np.tile(density.as_array(), (n, 1))
    f = np.asarray(density, float)
    if f.shape == (4,):
        return np.tile(f, (n, 1))
    if f.shape != (n, 4):
        raise SurfaceError(f"density must have shape ({n}, 4)")
    return f


def singular_matrix_surface(surface: SurfaceSampling) -> np.ndarray:
    """S_ij = 2 e(y_j - y_i) n_j |T_j| off the diagonal; rows reproduce constants."""
    y = surface.centroids
    n = surface.n
    diff = y[None, :, :] - y[:, None, :]
    i = np.arange(n)
    diff[i, i] = 1.0  # placeholder, overwritten below
    e = cauchy_kernel(diff)
    S = 2 * qmul(e, pure(surface.normals)[None, :, :]) * surface.areas[None, :, None]
    S[i, i] = 0.0
    rows = S.sum(axis=1)
    S[i, i] = -rows
    S[i, i, 0] += 1.0
    return S


def hardy_projection_surface(surface: SurfaceSampling) -> OperatorMatrix:
    S = singular_matrix_surface(surface)
    P = S / 2
    i = np.arange(surface.n)
    P[i, i, 0] += 0.5
    return OperatorMatrix(P, "quaternion")


def apply(op: OperatorMatrix, f: np.ndarray) -> np.ndarray:
    return qmatvec(op.entries, f)


def _harmonic_polynomials(x: np.ndarray, degree: int) -> list[np.ndarray]:
    if not 0 <= degree <= 2:
        raise SurfaceError("test space degree must be 0, 1 or 2")
    X, Y, Z = x.T
    polys = [np.ones_like(X)]
    if degree >= 1:
        polys += [X, Y, Z]
    if degree >= 2:
        polys += [X * Y, Y * Z, X * Z, X * X - Y * Y, 2 * Z * Z - X * X - Y * Y]
    return polys


def polynomial_densities(surface: SurfaceSampling, degree: int = 2) -> np.ndarray:
    """Quaternion-valued harmonic polynomial densities of degree <= ``degree``, shape (n, 4, K).

    Harmonic polynomials stay linearly independent on any closed surface,
    unlike plain monomials (x^2 + y^2 + z^2 is nearly constant on a sphere).
    """
    cols = []
    for m in _harmonic_polynomials(surface.centroids, degree):
        for k in range(4):
            q = np.zeros((surface.n, 4))
            q[:, k] = m
            cols.append(q)
    return np.stack(cols, axis=-1)


def idempotence_defect(op: OperatorMatrix, surface: SurfaceSampling, degree: int = 2) -> float:
    """Norm of P^2 - P on polynomial densities, in the area-weighted L^2 norm.

    Restricting to a fixed smooth test space exposes discretization
    convergence; the full matrix norm is dominated by mesh-scale modes.
    """
    F = polynomial_densities(surface, degree)
    PF = qmatvec(op.entries, F)
    D = qmatvec(op.entries, PF) - PF
    w = np.sqrt(surface.areas)[:, None, None]
    Fw = (F * w).reshape(-1, F.shape[-1])
    Dw = (D * w).reshape(-1, F.shape[-1])
    _, R = np.linalg.qr(Fw)
    return float(np.linalg.norm(np.linalg.solve(R.T, Dw.T).T, 2))


def full_idempotence_defect(op: OperatorMatrix) -> float:
    """Spectral norm of P^2 - P over all densities (dense; small meshes only)."""
    R = real_block(op.entries)
    return float(np.linalg.norm(R @ R - R, 2))
