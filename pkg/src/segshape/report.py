"""Matplotlib report figures written next to the delimited outputs.

All figures are rendered through Agg with a pinned svg.hashsalt and empty Date
metadata so repeated runs emit byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "segshape"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .pimage import GROUPS  # noqa: E402


def _save(fig, path):
    if str(path).endswith(".svg"):
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path)
    plt.close(fig)


def elbow_figure(curve, path) -> None:
    """Distortion vs K elbow plot."""
    ks = [k for k, _ in curve]
    ds = [d for _, d in curve]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ks, ds, marker="o", color="#1f77b4")
    ax.set_xlabel("K")
    ax.set_ylabel("distortion")
    ax.set_xticks(ks)
    ax.set_title("K-medoids distortion")
    fig.tight_layout()
    _save(fig, path)


def ari_heatmap_figure(matrix: np.ndarray, labels: list[str], path) -> None:
    """Symmetric ARI matrix as an annotated heatmap."""
    n = len(labels)
    fig, ax = plt.subplots(figsize=(1.1 * n + 2, 1.1 * n + 1.5))
    im = ax.imshow(matrix, vmin=-0.5, vmax=1.0, cmap="viridis")
    ax.set_xticks(range(n), labels, rotation=45, ha="right")
    ax.set_yticks(range(n), labels)
    for i in range(n):
        for j in range(n):
            ax.text(j, i, f"{matrix[i, j]:.3f}", ha="center", va="center",
                    color="white" if matrix[i, j] < 0.6 else "black", fontsize=8)
    fig.colorbar(im, ax=ax, label="adjusted Rand index")
    ax.set_title("Clustering agreement")
    fig.tight_layout()
    _save(fig, path)


def medoid_pi_figure(medoid_pis: dict, selection: str, path) -> None:
    """Grid of medoid persistence images: one row per cluster, columns are
    (race, H0/H1) in the group's fixed order."""
    races = GROUPS[selection]
    nrows = len(medoid_pis)
    ncols = 2 * len(races)
    fig, axes = plt.subplots(nrows, ncols, figsize=(1.6 * ncols, 1.8 * nrows),
                             squeeze=False)
    for row, (cluster, pis) in enumerate(sorted(medoid_pis.items())):
        for col, (race, dim) in enumerate((r, d) for r in races for d in (0, 1)):
            ax = axes[row][col]
            pi = pis[(race, dim)]
            ax.imshow(pi.pixels, origin="lower", cmap="viridis")
            ax.set_xticks([])
            ax.set_yticks([])
            if row == 0:
                ax.set_title(f"{race[0].upper()} H{dim}", fontsize=8)
            if col == 0:
                city = pi.provenance[0] if pi.provenance else ""
                ax.set_ylabel(f"{cluster}: {city}", fontsize=8)
    fig.suptitle(f"Medoid persistence images ({selection})")
    fig.tight_layout()
    _save(fig, path)
