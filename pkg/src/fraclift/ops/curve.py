"""Cauchy integrals and Toeplitz operators on closed plane curves.

Curves live in the complex plane; for a lifted 1-D region the point (x, t)
is the complex number x + i t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..lift import BoundaryMesh


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CircleSpec:
    center: complex = 0j
    radius: float = 1.0


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator: complex (N, N) or quaternion (N, N, 4)."""

    entries: np.ndarray
    kind: str = "complex"

    @property
    def side(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class CurveSampling:
    points: np.ndarray
    weights: np.ndarray
    tangents: np.ndarray
    source: object = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def length(self) -> float:
        return float(self.weights.sum())

    def signed_area(self) -> float:
        z = self.points
        return float(0.5 * np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag))

    def reversed(self) -> "CurveSampling":
        # same nodes, opposite direction; node 0 stays first
        idx = (-np.arange(self.n)) % self.n
        return CurveSampling(self.points[idx], self.weights[idx], -self.tangents[idx], None)


def _shoelace(z: np.ndarray) -> float:
    return float(0.5 * np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag))


def _loop_from_mesh(mesh: BoundaryMesh, component: Optional[int]) -> np.ndarray:
    if mesh.base_dimension != 1:
        raise CurveError("curve sampling needs a polyline mesh (1-D base)")
    cells = mesh.cells
    if component is not None:
        if mesh.component_id is None:
            from ..topo import mesh_component_count
            mesh_component_count(mesh)
        cells = cells[mesh.component_id == component]
    if len(cells) == 0:
        raise CurveError("no cells in the selected component")
    nbrs: dict[int, list[int]] = {}
    for a, b in cells:
        nbrs.setdefault(int(a), []).append(int(b))
        nbrs.setdefault(int(b), []).append(int(a))
    bad = [v for v, ns in nbrs.items() if len(ns) != 2]
    if bad:
        raise CurveError(f"not a simple closed loop: vertices {bad[:5]} have degree != 2")
    start = min(nbrs)
    order = [start]
    prev, cur = start, min(nbrs[start])
    while cur != start:
        order.append(cur)
        a, b = nbrs[cur]
        prev, cur = cur, (b if a == prev else a)
        if len(order) > len(nbrs):
            raise CurveError("loop traversal did not close")
    if len(order) != len(nbrs):
        raise CurveError("polyline has more than one loop; select a component")
    v = mesh.vertices[order]
    return v[:, 0] + 1j * v[:, 1]


def _check_simple(z: np.ndarray) -> None:
    """Raise if two non-adjacent edges of the closed polygon intersect."""
    a = z
    b = np.roll(z, -1)
    m = len(z)

    def cross(p, q):
        return p.real * q.imag - p.imag * q.real

    for i in range(m):
        j = np.arange(i + 2, m)
        if i == 0:
            j = j[j != m - 1]
        if len(j) == 0:
            continue
        p, r = a[i], b[i] - a[i]
        q, s = a[j], b[j] - a[j]
        den = cross(r, s)
        ok = np.abs(den) > 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            t = cross(q - p, s) / den
            u = cross(q - p, r) / den
        hit = ok & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        if hit.any():
            raise CurveError(f"self-intersecting loop: edge {i} meets edge {int(j[hit][0])}")


def _resample(poly: np.ndarray, n: int):
    closed = np.concatenate([poly, poly[:1]])
    seg = np.abs(np.diff(closed))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    length = s[-1]
    q = np.arange(n) * length / n
    z = np.interp(q, s, closed.real) + 1j * np.interp(q, s, closed.imag)
    return z, length


def sample_closed_curve(source: Union[CircleSpec, BoundaryMesh, np.ndarray], n: int, *,
                        component: Optional[int] = None) -> CurveSampling:
    """Equi-arclength counterclockwise sampling with arclength weights.

    ``n`` must be even (the singular quadrature pairs nodes of opposite parity).
    """
    if n < 4 or n % 2:
        raise CurveError("sample count must be an even integer >= 4")
    if isinstance(source, CircleSpec):
        th = 2 * np.pi * np.arange(n) / n
        e = np.exp(1j * th)
        z = source.center + source.radius * e
        w = np.full(n, 2 * np.pi * source.radius / n)
        return CurveSampling(z, w, 1j * e, source)
    if isinstance(source, BoundaryMesh):
        poly = _loop_from_mesh(source, component)
    else:
        poly = np.asarray(source, dtype=complex)
    if len(poly) < 3:
        raise CurveError("loop needs at least three vertices")
    _check_simple(poly)
    if _shoelace(poly) < 0:
        poly = np.concatenate([poly[:1], poly[1:][::-1]])
    z, length = _resample(poly, n)
    d = np.roll(z, -1) - np.roll(z, 1)
    if np.any(np.abs(d) == 0):
        raise CurveError("duplicate sample points")
    w = np.full(n, length / n)
    return CurveSampling(z, w, d / np.abs(d), poly)


def refine(curve: CurveSampling, n: int) -> CurveSampling:
    if curve.source is None:
        raise CurveError("curve has no source to resample")
    return sample_closed_curve(curve.source, n)


def cauchy_singular_matrix(curve: CurveSampling) -> np.ndarray:
    """Nystrom matrix of the principal-value Cauchy integral (1/(pi i)) p.v. int f(w)/(w - z) dw.

    Off-diagonal entries use the alternating-point rule (every other node,
    doubled weight); the diagonal makes each row sum to the curve's winding
    sign, so constants are reproduced on counterclockwise curves.
    """
    z, t, w = curve.points, curve.tangents, curve.weights
    n = len(z)
    if n % 2:
        raise CurveError("alternating-point rule needs an even number of nodes")
    diff = z[None, :] - z[:, None]
    i = np.arange(n)
    odd = ((i[None, :] - i[:, None]) % 2).astype(bool)
    if np.any(np.abs(diff[odd]) == 0):
        raise CurveError("duplicate points in curve sampling")
    S = np.zeros((n, n), dtype=complex)
    S[odd] = (2.0 / (np.pi * 1j)) * (t * w)[None, :].repeat(n, 0)[odd] / diff[odd]
    sign = 1.0 if curve.signed_area() > 0 else -1.0
    S[i, i] = sign - S.sum(axis=1)
    return S


def cauchy_projection_curve(curve: CurveSampling) -> OperatorMatrix:
    S = cauchy_singular_matrix(curve)
    return OperatorMatrix((np.eye(curve.n) + S) / 2, "complex")


def fourier_projection(n: int) -> np.ndarray:
    """Projection onto Fourier modes 0 .. n/2 - 1 of n equispaced samples."""
    freq = np.fft.fftfreq(n, 1.0 / n)
    keep = (freq >= 0).astype(float)
    return np.fft.ifft(keep[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)


def trig_interp_matrix(n: int, m: int) -> np.ndarray:
    """Trigonometric interpolation from n to m >= n equispaced samples (n even)."""
    F = np.fft.fft(np.eye(n), axis=0)
    G = np.zeros((m, n), dtype=complex)
    h = n // 2
    G[:h] = F[:h]
    G[m - h + 1:] = F[h + 1:]
    G[h] += 0.5 * F[h]
    G[m - h] += 0.5 * F[h]
    return np.fft.ifft(G, axis=0) * (m / n)


@dataclass(frozen=True)
class SymbolSpec:
    """Either z -> ((z - c)/|z - c|)^k about the curve centroid, or explicit nodal values."""

    winding_exponent: Optional[int] = None
    values: Optional[np.ndarray] = None
    scale: complex = 1.0

    def evaluate(self, curve: CurveSampling, center: Optional[complex] = None) -> np.ndarray:
        if self.winding_exponent is not None:
            c = curve_centroid(curve) if center is None else center
            u = curve.points - c
            a = self.scale * (u / np.abs(u)) ** int(self.winding_exponent)
        elif self.values is not None:
            a = np.asarray(self.values, dtype=complex)
            if len(a) != curve.n:
                raise CurveError("explicit symbol length does not match the sampling")
        else:
            raise CurveError("symbol needs a winding exponent or explicit values")
        return a


def curve_centroid(curve: CurveSampling) -> complex:
    z = curve.points
    zn = np.roll(z, -1)
    cr = z.real * zn.imag - zn.real * z.imag
    area = 0.5 * cr.sum()
    cx = ((z.real + zn.real) * cr).sum() / (6 * area)
    cy = ((z.imag + zn.imag) * cr).sum() / (6 * area)
    return complex(cx, cy)


def winding_number(values: np.ndarray) -> int:
    """Winding of a closed sequence of nonzero complex values about 0."""
    ph = np.angle(np.roll(values, -1) / values)
    return int(np.rint(ph.sum() / (2 * np.pi)))


@dataclass(frozen=True)
class ToeplitzOperator:
    T: OperatorMatrix
    P: OperatorMatrix
    curve: CurveSampling
    symbol: SymbolSpec
    symbol_values: np.ndarray
    center: complex

    @property
    def min_modulus(self) -> float:
        return float(np.min(np.abs(self.symbol_values)))


def toeplitz_curve(curve: CurveSampling, symbol: SymbolSpec,
                   P: Optional[OperatorMatrix] = None) -> ToeplitzOperator:
    """T_a = P M_a P on the discrete Hardy range."""
    if P is None:
        P = cauchy_projection_curve(curve)
    c = curve_centroid(curve)
    a = symbol.evaluate(curve, c)
    if not np.all(np.isfinite(a)) or np.min(np.abs(a)) <= 1e-12 * np.max(np.abs(a)):
        raise CurveError("symbol vanishes on the curve")
    Pm = P.entries
    T = Pm @ (a[:, None] * Pm)
    return ToeplitzOperator(OperatorMatrix(T, "complex"), P, curve, symbol, a, c)


@dataclass(frozen=True)
class IndexReport:
    index: int
    kernel_dim: int
    cokernel_dim: int
    gap_ratio: float
    reliable: bool
    winding: int
    threshold: float
    spectrum: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "gap_ratio": self.gap_ratio,
            "reliable": self.reliable,
            "winding": self.winding,
            "threshold": self.threshold,
        }


def _range_basis(P: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(P)
    r = int(np.sum(ev.real > 0.5))
    U, _, _ = np.linalg.svd(P)
    return U[:, :r]


def _tall_sections(op: ToeplitzOperator):
    """Sections of T_a and T_conj(a) from the n-node Hardy range into the 2n-node one.

    Working into a finer range keeps a * f from being truncated, so small
    singular values reflect genuine kernels rather than section artifacts.
    """
    curve = op.curve
    n = curve.n
    fine = refine(curve, 2 * n)
    P2 = cauchy_projection_curve(fine).entries
    interp = trig_interp_matrix(n, 2 * n)
    if op.symbol.winding_exponent is not None:
        a2 = op.symbol.evaluate(fine, op.center)
    else:
        a2 = interp @ op.symbol_values
    Q = interp @ _range_basis(op.P.entries)
    return P2 @ (a2[:, None] * Q), P2 @ (np.conj(a2)[:, None] * Q), a2


def fredholm_index(op: ToeplitzOperator, tol: Union[float, str] = 1e-8,
                   gap_required: float = 10.0) -> IndexReport:
    """dim ker T_a - dim ker T_a* from singular values below ``tol * sigma_max``.

    ``tol="auto"`` places the threshold in the widest gap of the lower half of
    the spectrum.
    """
    A, B, a2 = _tall_sections(op)
    sa = np.linalg.svd(A, compute_uv=False)
    sb = np.linalg.svd(B, compute_uv=False)
    smax = max(sa.max(), sb.max())
    both = np.sort(np.concatenate([sa, sb])) / smax
    if tol == "auto":
        low = both[both < 0.5]
        if len(low) == 0:
            thr = 1e-8
        else:
            cand = np.concatenate([low, [both[len(low)] if len(low) < len(both) else 1.0]])
            ratios = cand[1:] / np.maximum(cand[:-1], 1e-300)
            k = int(np.argmax(ratios))
            thr = float(np.sqrt(cand[k] * cand[k + 1])) if ratios[k] >= gap_required else 1e-8
    else:
        thr = float(tol)
    ker = int(np.sum(sa / smax < thr))
    coker = int(np.sum(sb / smax < thr))
    below = both[both < thr]
    above = both[both >= thr]
    lo = below.max() if len(below) else thr
    hi = above.min() if len(above) else np.inf
    gap = float(hi / lo) if lo > 0 else float("inf")
    # a wider gap sitting above the threshold means tol cut in the wrong place
    upper = above[: np.searchsorted(above, 0.5) + 1]
    stray = len(upper) > 1 and float(np.max(upper[1:] / upper[:-1])) >= gap_required
    return IndexReport(ker - coker, ker, coker, gap, bool(gap >= gap_required and not stray),
                       winding_number(op.symbol_values), thr, both)
