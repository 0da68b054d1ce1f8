"""Persistence diagrams via boundary-matrix reduction over Z/2.

Cells are ordered by filtration value (descending filtrations are remapped by
negating the sort key), ties broken by dimension then cell index. Columns are
kept as sorted index lists and reduced left to right with the clearing
optimization: 2-cells first, whose pivots identify the positive 1-cells whose
columns need never be reduced. Diagrams keep native filtration coordinates, so
superlevel (descending) points have birth >= death and lifespan is always
|birth - death|.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cubical import DESCENDING, FilteredCubicalComplex
from .errors import FiltrationError, ParameterError
from .levelset import ASCENDING, FilteredSimplicialComplex

INFINITY = float("inf")


@dataclass
class PersistenceDiagram:
    dimension: int
    points: np.ndarray  # (n, 2) [birth, death]; death may be +-inf marker INFINITY
    order: str

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)

    def lifespans(self) -> np.ndarray:
        return np.abs(self.points[:, 1] - self.points[:, 0])

    def finite(self) -> np.ndarray:
        return self.points[np.isfinite(self.points[:, 1])]

    def n_infinite(self) -> int:
        return int(np.isinf(self.points[:, 1]).sum())


@dataclass
class Barcode:
    intervals: list  # [(start, end, dimension), ...]


def to_barcode(diagrams: list[PersistenceDiagram]) -> Barcode:
    intervals = []
    for pd in diagrams:
        for b, d in pd.points:
            intervals.append((float(b), float(d), pd.dimension))
    return Barcode(intervals)


def _simplicial_cells(cx: FilteredSimplicialComplex):
    vvals = np.array([v[1] for v in cx.vertices], dtype=np.float64)
    evals = np.array([e[1] for e in cx.edges], dtype=np.float64)
    edges = np.array([e[0] for e in cx.edges], dtype=np.int64).reshape(-1, 2)
    edge_of = {}
    for i, (a, b) in enumerate(edges):
        edge_of[(int(a), int(b))] = i
    tvals = np.array([t[1] for t in cx.triangles], dtype=np.float64)
    two_cells = np.zeros((len(cx.triangles), 3), dtype=np.int64)
    for i, ((a, b, c), _) in enumerate(cx.triangles):
        try:
            two_cells[i] = (edge_of[(a, b)], edge_of[(a, c)], edge_of[(b, c)])
        except KeyError as missing:
            raise FiltrationError(f"triangle ({a},{b},{c}) has no edge for pair {missing}")
    return vvals, edges, evals, two_cells, tvals


def _cubical_cells(cx: FilteredCubicalComplex):
    return (cx.vertex_values.astype(np.float64), cx.edges,
            cx.edge_values.astype(np.float64), cx.square_edges,
            cx.square_values.astype(np.float64))


def compute_persistence(cx) -> list[PersistenceDiagram]:
    """H0 and H1 diagrams of a filtered simplicial or cubical complex."""
    if isinstance(cx, FilteredCubicalComplex):
        parts, order = _cubical_cells(cx), DESCENDING
    elif isinstance(cx, FilteredSimplicialComplex):
        parts, order = _simplicial_cells(cx), ASCENDING
    else:
        raise TypeError(f"unsupported complex type {type(cx).__name__}")
    h0, h1, _ = _reduce(*parts, order=order)
    return [PersistenceDiagram(0, h0, order), PersistenceDiagram(1, h1, order)]


def h2_essential_births(cx) -> np.ndarray:
    """Birth values of essential 2-cycles (unpaired positive 2-cells). Zero for
    cubical complexes of 2D rasters; nonzero for clique complexes containing
    tetrahedron boundaries."""
    if isinstance(cx, FilteredCubicalComplex):
        parts, order = _cubical_cells(cx), DESCENDING
    else:
        parts, order = _simplicial_cells(cx), ASCENDING
    _, _, h2 = _reduce(*parts, order=order)
    return h2


def _validate_filtration(vvals, edges, evals, two_cells, tvals, ascending: bool):
    sgn = 1.0 if ascending else -1.0
    if len(edges):
        face_max = np.maximum(vvals[edges[:, 0]], vvals[edges[:, 1]]) if ascending \
            else np.minimum(vvals[edges[:, 0]], vvals[edges[:, 1]])
        bad = np.nonzero(sgn * face_max > sgn * evals + 1e-12)[0]
        if len(bad):
            raise FiltrationError(
                f"edge {int(bad[0])} enters before its vertices (value {evals[bad[0]]})")
    if len(two_cells):
        ev = evals[two_cells]
        face_max = ev.max(axis=1) if ascending else ev.min(axis=1)
        bad = np.nonzero(sgn * face_max > sgn * tvals + 1e-12)[0]
        if len(bad):
            raise FiltrationError(
                f"2-cell {int(bad[0])} enters before its edges (value {tvals[bad[0]]})")


def _xor_merge(a: list, b: list) -> list:
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x == y:
            i += 1
            j += 1
        elif x < y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def _reduce(vvals, edges, evals, two_cells, tvals, order: str):
    """Returns (h0_points, h1_points, h2_essential_births) as float arrays."""
    ascending = order == ASCENDING
    _validate_filtration(vvals, edges, evals, two_cells, tvals, ascending)
    nv, ne, ns = len(vvals), len(evals), len(tvals)
    sgn = 1.0 if ascending else -1.0

    key = np.concatenate([sgn * vvals, sgn * evals, sgn * tvals])
    dim = np.concatenate([np.zeros(nv), np.ones(ne), np.full(ns, 2)])
    idx = np.concatenate([np.arange(nv), np.arange(ne), np.arange(ns)])
    ordering = np.lexsort((idx, dim, key))
    pos = np.empty(nv + ne + ns, dtype=np.int64)
    pos[ordering] = np.arange(nv + ne + ns)
    vpos = pos[:nv]
    epos = pos[nv:nv + ne]
    spos = pos[nv + ne:]

    pivot_col: dict[int, list] = {}   # low position -> reduced column
    edge_death: dict[int, float] = {}  # edge index -> killing 2-cell value
    h2_births = []

    for i in np.argsort(spos, kind="stable"):
        col = sorted(int(epos[e]) for e in two_cells[i])
        while col:
            low = col[-1]
            other = pivot_col.get(low)
            if other is None:
                pivot_col[low] = col
                edge_death[low] = tvals[i]
                break
            col = _xor_merge(col, other)
        else:
            h2_births.append(tvals[i])

    cleared = set(pivot_col)
    vertex_death: dict[int, float] = {}  # vertex position -> killing edge value
    h1_points = []

    for i in np.argsort(epos, kind="stable"):
        p = int(epos[i])
        if p in cleared:
            h1_points.append((evals[i], edge_death[p]))
            continue
        a, b = edges[i]
        col = sorted((int(vpos[a]), int(vpos[b])))
        while col:
            low = col[-1]
            other = pivot_col.get(low)
            if other is None:
                pivot_col[low] = col
                vertex_death[low] = evals[i]
                break
            col = _xor_merge(col, other)
        else:
            h1_points.append((evals[i], INFINITY))

    h0_points = []
    for i in range(nv):
        h0_points.append((vvals[i], vertex_death.get(int(vpos[i]), INFINITY)))

    h0 = _sorted_points(h0_points)
    h1 = _sorted_points(h1_points)
    return h0, h1, np.array(sorted(h2_births), dtype=np.float64)


def _sorted_points(points) -> np.ndarray:
    arr = np.array(points, dtype=np.float64).reshape(-1, 2)
    if len(arr):
        arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
    return arr


def cap_infinite(pd: PersistenceDiagram, cap: float) -> PersistenceDiagram:
    """Replace infinite deaths by the filtration horizon and clamp lifespans to
    the cap: ascending deaths cap upward at birth + cap, descending deaths
    floor at max(0, birth - cap)."""
    if cap <= 0:
        raise ParameterError("cap must be positive")
    pts = pd.points.copy()
    inf = np.isinf(pts[:, 1])
    if pd.order == ASCENDING:
        pts[inf, 1] = cap
        pts[:, 1] = np.minimum(pts[:, 1], pts[:, 0] + cap)
    else:
        pts[inf, 1] = np.maximum(pts[inf, 0] - cap, 0.0)
        pts[:, 1] = np.maximum(pts[:, 1], pts[:, 0] - cap)
    return PersistenceDiagram(pd.dimension, pts, pd.order)


def alive_count(pd: PersistenceDiagram, t: float) -> int:
    """Number of classes alive at threshold t (cells with value past t included)."""
    b, d = pd.points[:, 0], pd.points[:, 1]
    if pd.order == ASCENDING:
        return int(((b <= t) & (np.isinf(d) | (d > t))).sum())
    return int(((b >= t) & (np.isinf(d) | (d < t))).sum())


def write_diagram_csv(path, pd: PersistenceDiagram) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["dim", "birth", "death"])
        for b, d in pd.points:
            writer.writerow([pd.dimension, repr(float(b)),
                             "inf" if np.isinf(d) else repr(float(d))])


def read_diagram_csv(path, order: str) -> list[PersistenceDiagram]:
    """Diagrams grouped by dimension, ascending dim order."""
    by_dim: dict[int, list] = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            d = row["death"]
            by_dim.setdefault(int(row["dim"]), []).append(
                (float(row["birth"]), INFINITY if d == "inf" else float(d)))
    return [PersistenceDiagram(dim, np.array(pts), order)
            for dim, pts in sorted(by_dim.items())]
