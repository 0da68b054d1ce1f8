"""Superlevel-set filtered cubical complexes of grayscale percentage rasters.

Every pixel is a vertex with value floor(u); an edge enters once both of its
vertices have, a square once all four corners have. The filtration parameter
is a percentage threshold eps descending from 100 to 0, so edge and square
values are the min over their vertices.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .geo import Raster

DESCENDING = "descending"


@dataclass
class FilteredCubicalComplex:
    """V-construction over a (height x width) pixel grid, vertex index = row-major
    pixel index. Edges list horizontal (row-major) then vertical (row-major);
    squares are row-major with corners (tl, tr, bl, br)."""

    width: int
    height: int
    vertex_values: np.ndarray   # (h*w,) int
    edges: np.ndarray           # (ne, 2) vertex indices
    edge_values: np.ndarray     # (ne,) int
    squares: np.ndarray         # (ns, 4) vertex indices
    square_values: np.ndarray   # (ns,) int
    square_edges: np.ndarray    # (ns, 4) edge indices (top, bottom, left, right)
    order: str = field(default=DESCENDING)

    @property
    def n_cells(self) -> int:
        return len(self.vertex_values) + len(self.edge_values) + len(self.square_values)


def build_cubical_filtration(gray: Raster) -> FilteredCubicalComplex:
    """Filtered cubical complex of a raster with values in [0, 100]; values are
    floored onto the integer eps grid."""
    v = gray.values
    if not np.isfinite(v).all() or v.min() < 0 or v.max() > 100:
        raise ValidationError("grayscale raster values must lie in [0, 100]")
    vals = np.floor(v).astype(np.int64)
    h, w = vals.shape
    idx = np.arange(h * w).reshape(h, w)

    he = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    hev = np.minimum(vals[:, :-1], vals[:, 1:]).ravel()
    ve = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    vev = np.minimum(vals[:-1, :], vals[1:, :]).ravel()
    edges = np.concatenate([he, ve], axis=0) if len(he) or len(ve) else np.zeros((0, 2), np.int64)
    edge_values = np.concatenate([hev, vev]) if len(hev) or len(vev) else np.zeros(0, np.int64)

    if h > 1 and w > 1:
        squares = np.stack([
            idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel(),
            idx[1:, :-1].ravel(), idx[1:, 1:].ravel(),
        ], axis=1)
        square_values = np.minimum.reduce([
            vals[:-1, :-1], vals[:-1, 1:], vals[1:, :-1], vals[1:, 1:],
        ]).ravel()
        # edge indices by construction: horizontal edge (r, c) is r*(w-1)+c,
        # vertical edge (r, c) is n_horizontal + r*w + c
        nh = h * (w - 1)
        r, c = np.divmod(np.arange((h - 1) * (w - 1)), w - 1)
        square_edges = np.stack([
            r * (w - 1) + c,            # top
            (r + 1) * (w - 1) + c,      # bottom
            nh + r * w + c,             # left
            nh + r * w + c + 1,         # right
        ], axis=1)
    else:
        squares = np.zeros((0, 4), np.int64)
        square_values = np.zeros(0, np.int64)
        square_edges = np.zeros((0, 4), np.int64)

    return FilteredCubicalComplex(w, h, vals.ravel(), edges, edge_values,
                                  squares, square_values, square_edges)


def cells_at(cx: FilteredCubicalComplex, eps: float) -> tuple[int, int, int]:
    """(V, E, F) counts of the subcomplex at threshold eps (value >= eps)."""
    return (int((cx.vertex_values >= eps).sum()),
            int((cx.edge_values >= eps).sum()),
            int((cx.square_values >= eps).sum()))


def dump_cells_csv(cx: FilteredCubicalComplex, path) -> None:
    """Diagnostic dump: one row per cell (cell_dim, vertex ids..., value)."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cell_dim", "v0", "v1", "v2", "v3", "value"])
        for i, val in enumerate(cx.vertex_values):
            writer.writerow([0, i, "", "", "", int(val)])
        for (a, b), val in zip(cx.edges, cx.edge_values):
            writer.writerow([1, int(a), int(b), "", "", int(val)])
        for (a, b, c, d), val in zip(cx.squares, cx.square_values):
            writer.writerow([2, int(a), int(b), int(c), int(d), int(val)])
