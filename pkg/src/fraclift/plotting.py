"""PNG figures for scene reports (non-interactive backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .distfield import ScalarField  # noqa: E402
from .lift import BoundaryMesh  # noqa: E402
from .topo import DimensionFit  # noqa: E402

# fixed metadata keeps PNG bytes stable between runs
_META = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)
    return path


def plot_field(field: ScalarField, path, title: str = "distance to the boundary") -> Path:
    g = field.grid
    fig, ax = plt.subplots(figsize=(5, 4))
    if g.dimension == 1:
        ax.plot(g.axis(0), field.values, lw=1)
        ax.set_xlabel("x")
        ax.set_ylabel("value")
    else:
        x0, x1 = g.axis(0)[[0, -1]]
        y0, y1 = g.axis(1)[[0, -1]]
        im = ax.imshow(field.values.T, origin="lower", extent=(x0, x1, y0, y1), cmap="viridis")
        fig.colorbar(im, ax=ax)
        ax.set_aspect("equal")
    ax.set_title(title)
    return _save(fig, path)


def plot_mesh(mesh: BoundaryMesh, path) -> Path:
    v, c = mesh.vertices, mesh.cells
    if c.shape[1] == 2:
        fig, ax = plt.subplots(figsize=(6, 3))
        seg = v[c]
        for s in seg:
            ax.plot(s[:, 0], s[:, 1], "k-", lw=0.6)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("t")
    else:
        fig = plt.figure(figsize=(5, 5))
        ax = fig.add_subplot(projection="3d")
        ax.plot_trisurf(v[:, 0], v[:, 1], v[:, 2], triangles=c, cmap="viridis", lw=0)
        ax.set_zlabel("t")
    ax.set_title("lifted boundary")
    return _save(fig, path)


def plot_dimension_fit(fit: DimensionFit, path, label: str = "") -> Path:
    x = np.log(1 / fit.scales)
    y = np.log(np.maximum(fit.counts, 1))
    fig, ax = plt.subplots(figsize=(4.5, 4))
    ax.plot(x, y, "o", label="box counts")
    ax.plot(x, fit.slope * x + fit.intercept, "-", label=f"slope {fit.slope:.4f}")
    ax.set_xlabel("log(1/s)")
    ax.set_ylabel("log N(s)")
    ax.set_title(label or "box counting")
    ax.legend()
    return _save(fig, path)


def plot_singular_values(values: np.ndarray, threshold: float, path, title: str = "") -> Path:
    s = np.sort(np.asarray(values))
    fig, ax = plt.subplots(figsize=(4.5, 4))
    ax.semilogy(np.arange(len(s)), s, ".", ms=3)
    ax.axhline(threshold, color="r", lw=0.8, ls="--", label="threshold")
    ax.set_xlabel("index")
    ax.set_ylabel("singular value / max")
    ax.set_title(title or "Toeplitz section spectrum")
    ax.legend()
    return _save(fig, path)
