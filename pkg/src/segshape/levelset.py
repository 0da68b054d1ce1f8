"""Level-set front propagation and triangulation into a filtered complex.

The front of a binary mask is expanded outward under dphi/dt = v * |grad phi|
with first-order upwind (Godunov) differences, accumulating phi from the mask
itself (no reinitialization). A pixel belongs to the region once phi >= 0.5;
the first time-grid step at which that happens is its inclusion time. The
inclusion-time field is then triangulated on a strided pixel lattice: strided
pixels are vertices, connected to their cardinal and both diagonal strided
neighbors, with triangles filled in as 3-cliques.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .geo import Raster

NEVER = float("inf")

ASCENDING = "ascending"


@dataclass(frozen=True)
class FrontConfig:
    velocity: float = 1.0
    dt: float = 0.5
    t_max: float = 20.0

    def __post_init__(self):
        if self.velocity <= 0:
            raise ParameterError("velocity must be positive (inward motion unsupported)")
        if self.dt <= 0 or self.t_max < 0:
            raise ParameterError("dt must be positive and t_max non-negative")
        steps = self.t_max / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ParameterError(f"t_max/dt = {steps} is not an integer number of steps")

    @property
    def steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def time_grid(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt


@dataclass
class InclusionTimeField:
    """Per-pixel first inclusion time on the grid {0, dt, ..., t_max}; NEVER
    (+inf) marks pixels the front does not reach."""

    raster: Raster
    dt: float
    t_max: float

    @property
    def times(self) -> np.ndarray:
        return self.raster.values


@dataclass
class FilteredSimplicialComplex:
    """Vertices carry pixel coordinates; edges/triangles reference vertex
    indices. Cell value = max over its vertices (a valid ascending filtration)."""

    vertices: list  # [((x, y), value), ...]
    edges: list     # [((i, j), value), ...] with i < j
    triangles: list  # [((i, j, k), value), ...] with i < j < k
    order: str = field(default=ASCENDING)


def godunov_gradient_magnitude(phi: Raster) -> Raster:
    """Upwind |grad phi| for outward growth of the high-phi region.

    Per axis the one-sided differences pointing toward a higher neighbor are
    selected: |grad|^2 = min(D-,0)^2 + max(D+,0)^2 summed over x and y.
    Differences across the grid boundary are treated as 0.
    """
    g = _upwind_magnitude(phi.values)
    return phi.like(g)


def _upwind_magnitude(v: np.ndarray) -> np.ndarray:
    dxm = np.zeros_like(v)
    dxp = np.zeros_like(v)
    dym = np.zeros_like(v)
    dyp = np.zeros_like(v)
    dxm[:, 1:] = v[:, 1:] - v[:, :-1]   # D-x: toward the west neighbor
    dxp[:, :-1] = v[:, 1:] - v[:, :-1]  # D+x: toward the east neighbor
    dym[1:, :] = v[1:, :] - v[:-1, :]
    dyp[:-1, :] = v[1:, :] - v[:-1, :]
    return np.sqrt(np.minimum(dxm, 0.0) ** 2 + np.maximum(dxp, 0.0) ** 2
                   + np.minimum(dym, 0.0) ** 2 + np.maximum(dyp, 0.0) ** 2)


def propagate_front(mask: Raster, cfg: FrontConfig = FrontConfig()) -> InclusionTimeField:
    """Explicit forward-Euler evolution phi <- phi + dt * v * |grad phi| from
    phi_0 = mask, recording each pixel's first step with phi >= 0.5."""
    values = mask.values
    if not np.isin(values, (0.0, 1.0)).all():
        raise ParameterError("mask must be 0/1 valued")
    phi = values.astype(np.float64).copy()
    times = np.where(phi >= 0.5, 0.0, NEVER)
    for k in range(1, cfg.steps + 1):
        phi += cfg.dt * cfg.velocity * _upwind_magnitude(phi)
        newly = (phi >= 0.5) & np.isinf(times)
        times[newly] = k * cfg.dt
    return InclusionTimeField(mask.like(times), cfg.dt, cfg.t_max)


# Strided-lattice neighbor generators; as undirected pairs these cover the
# cardinal directions plus both diagonals (NW/SE and SW/NE).
_EDGE_DIRS = ((1, 0), (0, 1), (1, 1), (-1, 1))  # (dcol, drow)


def triangulate(times: InclusionTimeField, stride: int = 5) -> FilteredSimplicialComplex:
    """Filtered clique complex of the strided inclusion-time lattice.

    Vertices sit at pixels (i*stride, j*stride) that were ever included; edge
    value = max of its endpoints, triangle value = max of its edges.
    """
    if stride < 1:
        raise ParameterError("stride must be >= 1")
    t = times.times
    h, w = t.shape
    cols = np.arange(0, w, stride)
    rows = np.arange(0, h, stride)
    sub = t[np.ix_(rows, cols)]
    gh, gw = sub.shape

    vid = -np.ones((gh, gw), dtype=np.int64)
    vertices = []
    for gr in range(gh):
        for gc in range(gw):
            val = sub[gr, gc]
            if np.isinf(val):
                continue
            vid[gr, gc] = len(vertices)
            vertices.append(((int(cols[gc]), int(rows[gr])), float(val)))

    edges = []
    adjacency = [set() for _ in vertices]
    for gr in range(gh):
        for gc in range(gw):
            a = vid[gr, gc]
            if a < 0:
                continue
            for dc, dr in _EDGE_DIRS:
                gr2, gc2 = gr + dr, gc + dc
                if not (0 <= gr2 < gh and 0 <= gc2 < gw):
                    continue
                b = vid[gr2, gc2]
                if b < 0:
                    continue
                i, j = (a, b) if a < b else (b, a)
                edges.append(((int(i), int(j)), max(vertices[i][1], vertices[j][1])))
                adjacency[i].add(j)
                adjacency[j].add(i)

    triangles = []
    for (i, j), _ in edges:
        for k in sorted(adjacency[i] & adjacency[j]):
            if k > j:
                val = max(vertices[i][1], vertices[j][1], vertices[k][1])
                triangles.append(((i, j, k), val))

    return FilteredSimplicialComplex(vertices, edges, triangles)
