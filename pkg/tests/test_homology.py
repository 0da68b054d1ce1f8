"""Boundary-matrix reduction tests against independent oracles."""

import math

import numpy as np
import pytest

from segshape.cubical import build_cubical_filtration
from segshape.errors import FiltrationError, ParameterError
from segshape.geo import Raster
from segshape.homology import (INFINITY, PersistenceDiagram, alive_count,
                               cap_infinite, compute_persistence,
                               h2_essential_births, read_diagram_csv,
                               to_barcode, write_diagram_csv)
from segshape.levelset import ASCENDING, FilteredSimplicialComplex, FrontConfig, propagate_front, triangulate
from segshape.cubical import DESCENDING

from oracles import connected_components, h0_elder_rule


def raster(values):
    values = np.asarray(values, dtype=np.float64)
    h, w = values.shape
    return Raster(w, h, (0.0, 0.0), 1.0, values)


def points_set(pd):
    return sorted((b, d if np.isfinite(d) else math.inf) for b, d in pd.points)


def random_simplicial(rng, max_vertices=30) -> FilteredSimplicialComplex:
    """Random filtered flag-ish complex; skips any triangle that would close a
    tetrahedron boundary so essential H2 stays empty (K4 filter)."""
    nv = int(rng.integers(1, max_vertices))
    vertices = [((i, 0), float(rng.integers(0, 8))) for i in range(nv)]
    edges = {}
    for _ in range(int(rng.integers(0, 3 * nv))):
        a, b = sorted(int(x) for x in rng.integers(0, nv, 2))
        if a == b or (a, b) in edges:
            continue
        edges[(a, b)] = max(vertices[a][1], vertices[b][1]) + float(rng.integers(0, 3))
    adjacency = {i: set() for i in range(nv)}
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    triangles = {}
    cliques = sorted((a, b, k) for (a, b) in edges for k in adjacency[a] & adjacency[b] if k > b)
    for (a, b, c) in cliques:
        if rng.random() < 0.6:
            continue
        completes_tetra = any(
            len({(x, y) for x in (a, b, c, d) for y in (a, b, c, d) if x < y} & set(edges)) == 6
            and all(t in triangles for t in
                    [tuple(sorted(s)) for s in ((a, b, d), (a, c, d), (b, c, d))])
            for d in (adjacency[a] & adjacency[b] & adjacency[c]))
        if completes_tetra:
            continue
        val = max(edges[(a, b)], edges[(a, c)], edges[(b, c)]) + float(rng.integers(0, 2))
        triangles[(a, b, c)] = val
    return FilteredSimplicialComplex(
        vertices,
        [((a, b), v) for (a, b), v in sorted(edges.items())],
        [((a, b, c), v) for (a, b, c), v in sorted(triangles.items())])


# ---------------------------------------------------------------------------
# hand examples
# ---------------------------------------------------------------------------

def test_single_vertex():
    cx = FilteredSimplicialComplex([((0, 0), 0.0)], [], [])
    h0, h1 = compute_persistence(cx)
    assert points_set(h0) == [(0.0, math.inf)]
    assert len(h1.points) == 0
    assert h0.order == ASCENDING


def test_four_cycle():
    cx = FilteredSimplicialComplex(
        [((0, 0), 0.0), ((1, 0), 0.0), ((1, 1), 0.0), ((0, 1), 0.0)],
        [((0, 1), 0.0), ((1, 2), 0.0), ((2, 3), 0.0), ((0, 3), 0.0)], [])
    h0, h1 = compute_persistence(cx)
    assert points_set(h1) == [(0.0, math.inf)]
    # one essential component plus three retained zero-lifespan points
    assert points_set(h0) == [(0.0, 0.0)] * 3 + [(0.0, math.inf)]


def test_cubical_1d_valley():
    h0, h1 = compute_persistence(build_cubical_filtration(raster([[90.0, 30.0, 60.0]])))
    assert h0.order == DESCENDING
    # components born at 90 and 60; the younger dies when the 30-valley joins
    # them; the 30-vertex itself is a retained zero-lifespan point
    assert points_set(h0) == [(30.0, 30.0), (60.0, 30.0), (90.0, math.inf)]
    assert len(h1.points) == 0


def test_cubical_ring_hole():
    vals = np.full((3, 3), 80.0)
    vals[1, 1] = 0.0
    h0, h1 = compute_persistence(build_cubical_filtration(raster(vals)))
    nonzero = [(b, d) for b, d in h1.points if b != d]
    assert nonzero == [(80.0, 0.0)]  # loop at eps=80, filled when the center enters


def test_invalid_filtration_rejected():
    cx = FilteredSimplicialComplex(
        [((0, 0), 5.0), ((1, 0), 5.0)], [((0, 1), 1.0)], [])
    with pytest.raises(FiltrationError):
        compute_persistence(cx)


def test_triangle_with_missing_edge_rejected():
    cx = FilteredSimplicialComplex(
        [((0, 0), 0.0), ((1, 0), 0.0), ((0, 1), 0.0)],
        [((0, 1), 0.0), ((1, 2), 0.0)],
        [((0, 1, 2), 0.0)])
    with pytest.raises(FiltrationError):
        compute_persistence(cx)


# ---------------------------------------------------------------------------
# cap_infinite
# ---------------------------------------------------------------------------

def test_cap_levelset_point():
    pd = PersistenceDiagram(0, [(0.0, INFINITY)], ASCENDING)
    assert cap_infinite(pd, 20.0).points.tolist() == [[0.0, 20.0]]


def test_cap_leaves_finite_points_alone():
    pd = PersistenceDiagram(0, [(5.0, 10.0)], ASCENDING)
    assert cap_infinite(pd, 20.0).points.tolist() == [[5.0, 10.0]]


def test_cap_cubical_point_dies_at_zero():
    pd = PersistenceDiagram(0, [(80.0, INFINITY)], DESCENDING)
    capped = cap_infinite(pd, 100.0)
    assert capped.points.tolist() == [[80.0, 0.0]]
    assert capped.lifespans().tolist() == [80.0]


def test_cap_clamps_long_lifespans():
    pd = PersistenceDiagram(0, [(0.0, 30.0)], ASCENDING)
    assert cap_infinite(pd, 20.0).points.tolist() == [[0.0, 20.0]]
    pd = PersistenceDiagram(0, [(90.0, 10.0)], DESCENDING)
    assert cap_infinite(pd, 50.0).points.tolist() == [[90.0, 40.0]]


def test_cap_requires_positive():
    with pytest.raises(ParameterError):
        cap_infinite(PersistenceDiagram(0, [(0.0, 1.0)], ASCENDING), 0.0)


# ---------------------------------------------------------------------------
# oracle properties
# ---------------------------------------------------------------------------

def test_h0_matches_elder_rule_on_random_complexes():
    rng = np.random.default_rng(101)
    for _ in range(60):
        cx = random_simplicial(rng)
        h0, _ = compute_persistence(cx)
        oracle = h0_elder_rule([v[1] for v in cx.vertices],
                               [e[0] for e in cx.edges],
                               [e[1] for e in cx.edges], ascending=True)
        assert points_set(h0) == oracle
        assert h0.n_infinite() == connected_components(
            len(cx.vertices), [e[0] for e in cx.edges])


def test_h0_matches_elder_rule_on_random_rasters():
    rng = np.random.default_rng(102)
    for _ in range(40):
        h, w = rng.integers(1, 16, 2)
        cx = build_cubical_filtration(raster(rng.integers(0, 101, (h, w)).astype(float)))
        h0, _ = compute_persistence(cx)
        oracle = h0_elder_rule(cx.vertex_values.astype(float), cx.edges,
                               cx.edge_values.astype(float), ascending=False)
        assert points_set(h0) == oracle


def test_euler_characteristic_on_random_rasters():
    rng = np.random.default_rng(103)
    for _ in range(15):
        h, w = rng.integers(2, 12, 2)
        cx = build_cubical_filtration(raster(rng.integers(0, 101, (h, w)).astype(float)))
        h0, h1 = compute_persistence(cx)
        assert len(h2_essential_births(cx)) == 0
        for eps in range(0, 101):
            V = int((cx.vertex_values >= eps).sum())
            E = int((cx.edge_values >= eps).sum())
            F = int((cx.square_values >= eps).sum())
            assert alive_count(h0, eps) - alive_count(h1, eps) == V - E + F


def test_euler_characteristic_on_random_complexes():
    rng = np.random.default_rng(104)
    for _ in range(30):
        cx = random_simplicial(rng)
        h0, h1 = compute_persistence(cx)
        h2 = h2_essential_births(cx)
        values = sorted({v for _, v in cx.vertices}
                        | {v for _, v in cx.edges} | {v for _, v in cx.triangles})
        for t in values:
            V = sum(1 for _, v in cx.vertices if v <= t)
            E = sum(1 for _, v in cx.edges if v <= t)
            F = sum(1 for _, v in cx.triangles if v <= t)
            b2 = int((h2 <= t).sum())
            assert alive_count(h0, t) - alive_count(h1, t) + b2 == V - E + F


def test_levelset_triangulation_euler_includes_tetra_boundaries():
    # full squares of the strided lattice carry both diagonals, so the clique
    # complex contains tetrahedron boundaries (one essential 2-cycle each)
    times = propagate_front(raster(np.ones((11, 11))), FrontConfig())
    cx = triangulate(times, 5)
    h0, h1 = compute_persistence(cx)
    h2 = h2_essential_births(cx)
    assert len(h2) == 4
    V, E, F = len(cx.vertices), len(cx.edges), len(cx.triangles)
    assert alive_count(h0, 0.0) - alive_count(h1, 0.0) + len(h2) == V - E + F


def test_levelset_h0_births_all_zero():
    # holds for components thick enough to contain a strided vertex (>= 6 px
    # at stride 5) and for the classes with positive lifespan; every strided
    # vertex also contributes a retained zero-lifespan point at its own time
    rng = np.random.default_rng(105)
    for _ in range(10):
        m = np.zeros((60, 60))
        for _ in range(rng.integers(1, 5)):
            r0, c0 = rng.integers(0, 50, 2)
            m[r0:r0 + rng.integers(6, 20), c0:c0 + rng.integers(6, 20)] = 1
        tf = propagate_front(raster(m), FrontConfig())
        cx = triangulate(tf, 5)
        h0, _ = compute_persistence(cx)
        nonzero = h0.points[h0.lifespans() > 0]
        if len(nonzero):
            assert (nonzero[:, 0] == 0.0).all()
        infinite = h0.points[np.isinf(h0.points[:, 1])]
        assert (infinite[:, 0] == 0.0).all()


def test_levelset_component_missed_by_stride_is_born_late():
    # a mask island with no strided vertex first appears once the front
    # reaches the lattice, so its class is born after t=0; the birth law
    # presumes stride-resolvable components
    m = np.zeros((30, 30))
    m[1:4, 1:4] = 1
    tf = propagate_front(raster(m), FrontConfig())
    h0, _ = compute_persistence(triangulate(tf, 5))
    assert h0.points[:, 0].min() > 0.0


def test_diagram_invariant_under_cell_permutation():
    rng = np.random.default_rng(106)
    for _ in range(20):
        cx = random_simplicial(rng, max_vertices=12)
        h0a, h1a = compute_persistence(cx)
        perm = rng.permutation(len(cx.vertices))
        remap = {int(old): int(new) for new, old in enumerate(perm)}
        vertices = [None] * len(cx.vertices)
        for old, (coords, val) in enumerate(cx.vertices):
            vertices[remap[old]] = (coords, val)
        edges = [((min(remap[a], remap[b]), max(remap[a], remap[b])), v)
                 for (a, b), v in cx.edges]
        triangles = [(tuple(sorted((remap[a], remap[b], remap[c]))), v)
                     for (a, b, c), v in cx.triangles]
        rng.shuffle(edges)
        rng.shuffle(triangles)
        shuffled = FilteredSimplicialComplex(vertices, edges, triangles)
        h0b, h1b = compute_persistence(shuffled)
        assert points_set(h0a) == points_set(h0b)
        assert points_set(h1a) == points_set(h1b)


# ---------------------------------------------------------------------------
# barcode and CSV round trip
# ---------------------------------------------------------------------------

def test_barcode_bijective_with_diagram():
    pd0 = PersistenceDiagram(0, [(0.0, 4.0), (0.0, INFINITY)], ASCENDING)
    pd1 = PersistenceDiagram(1, [(2.0, 3.0)], ASCENDING)
    bc = to_barcode([pd0, pd1])
    assert sorted(bc.intervals) == [(0.0, 4.0, 0), (0.0, math.inf, 0), (2.0, 3.0, 1)]


def test_diagram_csv_roundtrip(tmp_path):
    pd = PersistenceDiagram(1, [(2.0, 3.5), (10.0, INFINITY)], ASCENDING)
    path = tmp_path / "pd.csv"
    write_diagram_csv(path, pd)
    text = path.read_text()
    assert text.splitlines()[0] == "dim,birth,death"
    assert "inf" in text
    back = read_diagram_csv(path, ASCENDING)
    assert len(back) == 1 and back[0].dimension == 1
    assert points_set(back[0]) == points_set(pd)
