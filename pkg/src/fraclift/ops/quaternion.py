"""Quaternion arithmetic, scalar and vectorized over trailing axis of length 4."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        return cls(*map(float, a))

    @classmethod
    def pure(cls, v) -> "Quaternion":
        return cls(0.0, *map(float, v))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __add__(self, other):
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other):
        return Quaternion.from_array(self.as_array() - other.as_array())

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.as_array(), other.as_array()))
        return Quaternion.from_array(self.as_array() * float(other))

    __rmul__ = __mul__

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    w1, x1, y1, z1 = np.moveaxis(a, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(b, -1, 0)
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def pure(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, float)
    return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)


def qconj(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, float) * np.array([1.0, -1.0, -1.0, -1.0])


def left_matrix(q: np.ndarray) -> np.ndarray:
    """4x4 real matrices L(q) with L(q) @ p == qmul(q, p); shape (..., 4, 4)."""
    w, x, y, z = np.moveaxis(np.asarray(q, float), -1, 0)
    return np.stack([
        np.stack([w, -x, -y, -z], -1),
        np.stack([x, w, -z, y], -1),
        np.stack([y, z, w, -x], -1),
        np.stack([z, -y, x, w], -1),
    ], -2)


def real_block(entries: np.ndarray) -> np.ndarray:
    """(N, M, 4) quaternion matrix as a (4N, 4M) real matrix acting on stacked densities."""
    n, m = entries.shape[:2]
    return left_matrix(entries).transpose(0, 2, 1, 3).reshape(4 * n, 4 * m)


def qmatvec(entries: np.ndarray, f: np.ndarray) -> np.ndarray:
    """(A f)_i = sum_j A_ij f_j for quaternion A (N, M, 4) and f (M, 4) or (M, 4, K)."""
    vec = f.ndim == 2
    if vec:
        f = f[:, :, None]
    aw, ax, ay, az = (entries[..., k] for k in range(4))
    fw, fx, fy, fz = (f[:, k, :] for k in range(4))
    out = np.stack([
        aw @ fw - ax @ fx - ay @ fy - az @ fz,
        aw @ fx + ax @ fw + ay @ fz - az @ fy,
        aw @ fy - ax @ fz + ay @ fw + az @ fx,
        aw @ fz + ax @ fy - ay @ fx + az @ fw,
    ], axis=1)
    return out[:, :, 0] if vec else out
