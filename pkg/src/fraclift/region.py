"""Bounded open sets in R^1 and R^2 built from a small catalog of primitives.

A region is a finite union of open primitives. Membership is the logical OR
of the primitives, and the boundary of the union is the part of the
primitive boundaries that is not covered by another primitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np


class RegionError(ValueError):
    """Malformed region or incompatible point/region dimensions."""


def _frac(v) -> Fraction:
    return Fraction(v) if not isinstance(v, Fraction) else v


@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    dimension = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise RegionError(f"interval needs a < b, got ({self.a}, {self.b})")

    def contains_exact(self, p) -> bool:
        x = _frac(p[0])
        return _frac(self.a) < x < _frac(self.b)

    # vectorized tests work in floats so that float(endpoint) is never inside
    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        x = pts[:, 0]
        return (x > float(self.a)) & (x < float(self.b))

    def closure_contains(self, pts: np.ndarray) -> np.ndarray:
        x = pts[:, 0]
        return (x >= float(self.a)) & (x <= float(self.b))

    def boundary_samples(self, spacing: float) -> np.ndarray:
        return np.array([[float(self.a)], [float(self.b)]])

    def bbox(self):
        return np.array([float(self.a)]), np.array([float(self.b)])

    def atoms(self):
        return [self]


@dataclass(frozen=True)
class CantorComplement:
    """Open middle-third gaps removed from [0, 1] through stage ``depth``."""

    depth: int
    dimension = 1

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 1:
            raise RegionError(f"cantor depth must be an integer >= 1, got {self.depth!r}")

    def pieces(self) -> list[tuple[Fraction, Fraction]]:
        """Closed intervals of the depth-k pre-Cantor set, exact."""
        iv = [(Fraction(0), Fraction(1))]
        for _ in range(self.depth):
            nxt = []
            for a, b in iv:
                w = (b - a) / 3
                nxt.append((a, a + w))
                nxt.append((b - w, b))
            iv = nxt
        return iv

    def gaps(self) -> list[tuple[Fraction, Fraction]]:
        p = self.pieces()
        return [(p[i][1], p[i + 1][0]) for i in range(len(p) - 1)]

    def endpoints(self) -> list[Fraction]:
        return sorted({e for ab in self.pieces() for e in ab})

    def contains_exact(self, p) -> bool:
        x = _frac(p[0])
        if not 0 < x < 1:
            return False
        for _ in range(self.depth):
            x *= 3
            if 1 < x < 2:
                return True
            if x >= 2:
                x -= 2
            if x == 0 or x == 1:
                return False
        return False

    def _float_gaps(self):
        g = self.gaps()
        return (np.array([float(a) for a, _ in g]), np.array([float(b) for _, b in g]))

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        lo, hi = self._float_gaps()
        x = pts[:, 0]
        k = np.searchsorted(lo, x, side="right") - 1
        ok = k >= 0
        kk = np.clip(k, 0, len(lo) - 1)
        return ok & (x > lo[kk]) & (x < hi[kk])

    def closure_contains(self, pts: np.ndarray) -> np.ndarray:
        # closure of the limiting Cantor complement is the whole unit interval
        x = pts[:, 0]
        return (x >= 0.0) & (x <= 1.0)

    def boundary_samples(self, spacing: float) -> np.ndarray:
        return np.array([[float(e)] for e in self.endpoints()])

    def bbox(self):
        return np.array([0.0]), np.array([1.0])

    def atoms(self):
        return [Interval(a, b) for a, b in self.gaps()]


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    r: float
    dimension = 2

    def __post_init__(self):
        if not self.r > 0:
            raise RegionError("disk radius must be positive")

    def contains_exact(self, p) -> bool:
        dx = _frac(p[0]) - _frac(self.center[0])
        dy = _frac(p[1]) - _frac(self.center[1])
        return dx * dx + dy * dy < _frac(self.r) ** 2

    def contains_points(self, pts):
        d2 = ((pts - np.asarray(self.center)) ** 2).sum(axis=1)
        return d2 < self.r**2

    def closure_contains(self, pts):
        d2 = ((pts - np.asarray(self.center)) ** 2).sum(axis=1)
        return d2 <= self.r**2

    def boundary_samples(self, spacing):
        return _circle_samples(self.center, self.r, spacing)

    def bbox(self):
        c = np.asarray(self.center, float)
        return c - self.r, c + self.r

    def atoms(self):
        return [self]

    def radial_range(self, c):
        dist = math.dist(c, self.center)
        return max(0.0, dist - self.r), dist + self.r


@dataclass(frozen=True)
class Annulus:
    center: tuple[float, float]
    r_in: float
    r_out: float
    dimension = 2

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise RegionError("annulus needs 0 < r_in < r_out")

    def contains_exact(self, p) -> bool:
        dx = _frac(p[0]) - _frac(self.center[0])
        dy = _frac(p[1]) - _frac(self.center[1])
        r2 = dx * dx + dy * dy
        return _frac(self.r_in) ** 2 < r2 < _frac(self.r_out) ** 2

    def contains_points(self, pts):
        d2 = ((pts - np.asarray(self.center)) ** 2).sum(axis=1)
        return (d2 > self.r_in**2) & (d2 < self.r_out**2)

    def closure_contains(self, pts):
        d2 = ((pts - np.asarray(self.center)) ** 2).sum(axis=1)
        return (d2 >= self.r_in**2) & (d2 <= self.r_out**2)

    def boundary_samples(self, spacing):
        return np.vstack([
            _circle_samples(self.center, self.r_out, spacing),
            _circle_samples(self.center, self.r_in, spacing, side=-1),
        ])

    def bbox(self):
        c = np.asarray(self.center, float)
        return c - self.r_out, c + self.r_out

    def atoms(self):
        return [self]

    def radial_range(self, c):
        dist = math.dist(c, self.center)
        if dist < self.r_in:
            lo = self.r_in - dist
        elif dist < self.r_out:
            lo = 0.0
        else:
            lo = dist - self.r_out
        return lo, dist + self.r_out


@dataclass(frozen=True)
class Box:
    lo: tuple[float, float]
    hi: tuple[float, float]
    dimension = 2

    def __post_init__(self):
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise RegionError("box needs lo < hi on every axis")

    def contains_exact(self, p) -> bool:
        return all(_frac(a) < _frac(x) < _frac(b) for a, x, b in zip(self.lo, p, self.hi))

    def contains_points(self, pts):
        return np.all((pts > np.asarray(self.lo)) & (pts < np.asarray(self.hi)), axis=1)

    def closure_contains(self, pts):
        return np.all((pts >= np.asarray(self.lo)) & (pts <= np.asarray(self.hi)), axis=1)

    def boundary_samples(self, spacing):
        (x0, y0), (x1, y1) = self.lo, self.hi
        corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
        out = []
        for (ax, ay), (bx, by) in zip(corners, corners[1:] + corners[:1]):
            m = max(1, math.ceil(math.hypot(bx - ax, by - ay) / spacing))
            s = np.arange(m) / m
            out.append(np.column_stack([ax + s * (bx - ax), ay + s * (by - ay)]))
        return np.vstack(out)

    def bbox(self):
        return np.asarray(self.lo, float), np.asarray(self.hi, float)

    def atoms(self):
        return [self]

    def radial_range(self, c):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        c = np.asarray(c, float)
        near = np.linalg.norm(np.maximum(0.0, np.maximum(lo - c, c - hi)))
        far = np.linalg.norm(np.maximum(np.abs(lo - c), np.abs(hi - c)))
        return float(near), float(far)


Primitive = Union[Interval, CantorComplement, Disk, Annulus, Box]


def _circle_samples(center, r, spacing, side: int = 1) -> np.ndarray:
    """Points on a circle with arc gaps <= spacing.

    Rounded samples are pushed a few ulps to the ``side`` (+1 outward, -1
    inward) until they are off the open disk, or inside the hole, in both
    floating-point and exact arithmetic.
    """
    m = max(3, math.ceil(2 * math.pi * r / spacing))
    th = 2 * math.pi * np.arange(m) / m
    c = np.asarray(center, float)
    off = r * np.column_stack([np.cos(th), np.sin(th)])
    margin = 8 * np.finfo(float).eps
    for _ in range(64):
        pts = c + off
        d2 = ((pts - c) ** 2).sum(axis=1)
        bad = d2 < r * r * (1 + margin) if side > 0 else d2 > r * r * (1 - margin)
        if not bad.any():
            break
        off[bad] *= 1 + side * margin
    return pts


@dataclass(frozen=True)
class RegionSpec:
    """Finite union of open primitives in R^dimension."""

    dimension: int
    primitives: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if self.dimension not in (1, 2):
            raise RegionError(f"dimension must be 1 or 2, got {self.dimension}")
        if not self.primitives:
            raise RegionError("region needs at least one primitive")
        for p in self.primitives:
            if p.dimension != self.dimension:
                raise RegionError(f"{type(p).__name__} is {p.dimension}-dimensional, "
                                  f"region is {self.dimension}-dimensional")


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    spacing: float

    def __len__(self):
        return len(self.points)


def _as_points(region: RegionSpec, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if region.dimension == 1 else pts.reshape(1, -1)
    if pts.shape[1] != region.dimension:
        raise RegionError(f"points have {pts.shape[1]} coordinates, region is "
                          f"{region.dimension}-dimensional")
    return pts


def contains(region: RegionSpec, point) -> bool:
    """Exact membership of one point in the open set."""
    p = (point,) if np.isscalar(point) else tuple(point)
    if len(p) != region.dimension:
        raise RegionError(f"point {point!r} does not match dimension {region.dimension}")
    return any(prim.contains_exact(p) for prim in region.primitives)


def contains_points(region: RegionSpec, pts) -> np.ndarray:
    """Vectorized membership for an (M, n) array, in floating point."""
    pts = _as_points(region, pts)
    out = np.zeros(len(pts), dtype=bool)
    for prim in region.primitives:
        out |= prim.contains_points(pts)
    return out


def closure_contains(region: RegionSpec, pts) -> np.ndarray:
    """Membership in the closure. For Cantor primitives this is [0, 1]."""
    pts = _as_points(region, pts)
    out = np.zeros(len(pts), dtype=bool)
    for prim in region.primitives:
        out |= prim.closure_contains(pts)
    return out


def bounding_box(region: RegionSpec) -> tuple[np.ndarray, np.ndarray]:
    boxes = [p.bbox() for p in region.primitives]
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    return lo, hi


def boundary_samples(region: RegionSpec, spacing: float) -> PointSet:
    """A ``spacing``-net of the boundary of the union.

    Primitive boundary points covered by another primitive are interior to
    the union and are dropped.
    """
    if not spacing > 0:
        raise RegionError("spacing must be positive")
    kept = []
    for i, p in enumerate(region.primitives):
        own = p.boundary_samples(spacing)
        # test only against the other primitives: rounding can place a
        # primitive's own boundary samples a hair inside it
        covered = np.zeros(len(own), dtype=bool)
        for j, q in enumerate(region.primitives):
            if j != i:
                covered |= q.contains_points(own)
        kept.append(own[~covered])
    pts = np.unique(np.vstack(kept), axis=0)
    return PointSet(pts, float(spacing))


def cantor_complement(depth: int) -> RegionSpec:
    return RegionSpec(1, (CantorComplement(depth),))


def atoms(region: RegionSpec) -> list:
    """Connected open pieces, one per primitive (Cantor gaps expand)."""
    return [a for p in region.primitives for a in p.atoms()]


def _atoms_overlap(p, q) -> bool:
    if isinstance(p, Interval):
        return max(p.a, q.a) < min(p.b, q.b)
    if isinstance(p, Box) and isinstance(q, Box):
        return all(max(a0, b0) < min(a1, b1) for a0, a1, b0, b1 in zip(p.lo, p.hi, q.lo, q.hi))
    if isinstance(q, (Disk, Annulus)):
        p, q = q, p
    # p is round: q meets p iff q's radial range about p's center meets p's
    r_in = p.r_in if isinstance(p, Annulus) else 0.0
    r_out = p.r_out if isinstance(p, Annulus) else p.r
    lo, hi = q.radial_range(p.center)
    return lo < r_out and hi > r_in


def exact_components(region: RegionSpec) -> list[list]:
    """Group atoms into the connected components of U, deterministic order."""
    at = atoms(region)
    parent = list(range(len(at)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(at)):
        for j in range(i + 1, len(at)):
            if _atoms_overlap(at[i], at[j]):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list] = {}
    for i in range(len(at)):
        groups.setdefault(find(i), []).append(at[i])
    return [groups[k] for k in sorted(groups)]


def component_count(region: RegionSpec) -> int:
    return len(exact_components(region))


def component_region(region: RegionSpec, comp: Sequence) -> RegionSpec:
    return RegionSpec(region.dimension, tuple(comp))


_KINDS = {
    "interval": lambda d: Interval(float(d["a"]), float(d["b"])),
    "cantor_complement": lambda d: CantorComplement(int(d["depth"])),
    "disk": lambda d: Disk(tuple(map(float, d["center"])), float(d["r"])),
    "annulus": lambda d: Annulus(tuple(map(float, d["center"])), float(d["r_in"]), float(d["r_out"])),
    "box": lambda d: Box(tuple(map(float, d["lo"])), tuple(map(float, d["hi"]))),
}


def primitive_from_dict(d: dict):
    kind = d.get("type")
    if kind not in _KINDS:
        raise RegionError(f"unknown primitive type {kind!r}")
    return _KINDS[kind](d)


def region_from_dict(d: dict) -> RegionSpec:
    return RegionSpec(int(d["dimension"]), tuple(primitive_from_dict(p) for p in d["primitives"]))
