"""Config-driven orchestration of the full pipeline over a bundle directory.

Each stage reads the previous stage's files, so stages can be re-run
individually; `run` chains them and writes a manifest of every emitted file
with its content hash. All stages are deterministic, so reruns on the same
inputs are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import gridfile, report
from .cluster import (Clustering, kmedoids, distortion_curve, medoid_images,
                      read_clustering_csv, write_clustering_csv,
                      write_elbow_csv, write_medoids_csv)
from .cubical import DESCENDING, build_cubical_filtration
from .errors import ParameterError, SegshapeError, ValidationError
from .geo import (RACES, CityDemographics, load_city_bundle, mask_from_index,
                  percentage_from_index, tract_index_raster)
from .homology import (PersistenceDiagram, cap_infinite, compute_persistence,
                       read_diagram_csv, write_diagram_csv)
from .levelset import ASCENDING, FrontConfig, propagate_front, triangulate
from .pimage import (GROUPS, FeatureVector, PIConfig, concatenate_features,
                     diagram_image, read_features_csv, read_pi_json,
                     write_features_csv, write_pi_json)
from .segstats import (adjusted_rand_index, cluster_mean_stats, stats_table,
                       write_cluster_means_csv, write_stats_csv, zscore_table)

COMPLEX_KINDS = ("levelset", "cubical")


@dataclass
class PipelineConfig:
    input_dir: str = ""
    output_dir: str = ""
    complex_kind: str = "levelset"
    group: str = "WBAH"
    k: int = 4
    k_max: int = 8
    long_side: int = 500
    velocity: float = 1.0
    dt: float = 0.5
    t_max: float = 20.0
    stride: int = 5
    threshold: float = 50.0
    sigma: float = 0.0       # 0 = kind default (1 levelset / 5 cubical)
    resolution: int = 0      # 0 = kind default (20 levelset / 100 cubical)

    def __post_init__(self):
        if self.complex_kind not in COMPLEX_KINDS:
            raise ParameterError(f"complex_kind must be one of {COMPLEX_KINDS}")
        if self.group not in GROUPS:
            raise ParameterError(f"group must be one of {sorted(GROUPS)}")

    @property
    def cap(self) -> float:
        return self.t_max if self.complex_kind == "levelset" else 100.0

    @property
    def order(self) -> str:
        return ASCENDING if self.complex_kind == "levelset" else DESCENDING

    def front_config(self) -> FrontConfig:
        return FrontConfig(self.velocity, self.dt, self.t_max)

    def pi_config(self) -> PIConfig:
        sigma = self.sigma or (1.0 if self.complex_kind == "levelset" else 5.0)
        resolution = self.resolution or (20 if self.complex_kind == "levelset" else 100)
        return PIConfig(sigma, resolution, (0.0, self.cap), (0.0, self.cap))

    def parameters(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name not in ("input_dir", "output_dir")}

    @classmethod
    def from_json(cls, path, **overrides) -> "PipelineConfig":
        with open(path) as f:
            doc = json.load(f)
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"{path}: unknown config fields {sorted(unknown)}")
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)


def safe_name(city_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9.-]+", "_", city_id)


class Emitter:
    """Tracks written files so a failed run can remove its partial outputs."""

    def __init__(self, root):
        self.root = Path(root)
        self.written: list[Path] = []

    def path(self, *parts) -> Path:
        p = self.root.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        self.written.append(p)
        return p

    def cleanup(self):
        dirs = set()
        for p in self.written:
            p.unlink(missing_ok=True)
            dirs.add(p.parent)
        for d in sorted(dirs, reverse=True):
            if d != self.root and d.is_dir() and not any(d.iterdir()):
                d.rmdir()


def _load_cities(input_dir) -> list[CityDemographics]:
    paths = sorted(Path(input_dir).glob("*.json"))
    if not paths:
        raise ValidationError(f"{input_dir}: no bundle files (*.json) found")
    cities = [load_city_bundle(p) for p in paths]
    ids = [c.city_id for c in cities]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"{input_dir}: duplicate city_ids across bundles")
    if len({safe_name(i) for i in ids}) != len(ids):
        raise ValidationError(f"{input_dir}: city_ids collide after filename sanitization")
    return sorted(cities, key=lambda c: c.city_id)


def _read_cities_csv(path) -> list[str]:
    with open(path, newline="") as f:
        return [row["city_id"] for row in csv.DictReader(f)]


def stage_ingest(cfg: PipelineConfig, em: Emitter) -> list[CityDemographics]:
    """Validate every bundle and write the cities.csv summary."""
    cities = _load_cities(cfg.input_dir)
    with open(em.path("cities.csv"), "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["city_id", "tracts", "total", *RACES])
        for c in cities:
            writer.writerow([c.city_id, c.n, c.population(),
                             *[c.race_total(r) for r in RACES]])
    return cities


def stage_rasterize(cfg: PipelineConfig, em: Emitter,
                    cities: list[CityDemographics] | None = None) -> None:
    """Majority-mask and percentage rasters per city-race pair."""
    cities = cities if cities is not None else _load_cities(cfg.input_dir)
    for city in cities:
        name = safe_name(city.city_id)
        index, shell = tract_index_raster(city, cfg.long_side)
        for race in RACES:
            mask = mask_from_index(city, race, cfg.threshold, index, shell)
            pct = percentage_from_index(city, race, index, shell)
            gridfile.write_grid(em.path("rasters", f"{name}_{race}_mask.grid"), mask)
            gridfile.write_grid(em.path("rasters", f"{name}_{race}_pct.grid"), pct)


def stage_persist(cfg: PipelineConfig, em: Emitter) -> None:
    """Rasters to capped persistence diagrams (plus inclusion-time grids for
    the level-set kind)."""
    out = em.root
    for cid in _read_cities_csv(out / "cities.csv"):
        name = safe_name(cid)
        for race in RACES:
            try:
                if cfg.complex_kind == "levelset":
                    mask, _, _ = gridfile.read_grid(out / "rasters" / f"{name}_{race}_mask.grid")
                    times = propagate_front(mask, cfg.front_config())
                    gridfile.write_grid(em.path("rasters", f"{name}_{race}_times.grid"),
                                        times.raster, dt=times.dt, t_max=times.t_max)
                    cx = triangulate(times, cfg.stride)
                else:
                    pct, _, _ = gridfile.read_grid(out / "rasters" / f"{name}_{race}_pct.grid")
                    cx = build_cubical_filtration(pct)
                diagrams = [cap_infinite(pd, cfg.cap) for pd in compute_persistence(cx)]
            except SegshapeError as e:
                raise type(e)(f"persist failed for pair ({cid}, {race}): {e}") from e
            for pd in diagrams:
                write_diagram_csv(em.path("diagrams", f"{name}_{race}_h{pd.dimension}.csv"), pd)


def stage_pimage(cfg: PipelineConfig, em: Emitter) -> None:
    """Diagrams to persistence images and the per-city feature matrix."""
    out = em.root
    picfg = cfg.pi_config()
    features = []
    for cid in _read_cities_csv(out / "cities.csv"):
        name = safe_name(cid)
        per_city = {}
        for race in RACES:
            for dim in (0, 1):
                path = out / "diagrams" / f"{name}_{race}_h{dim}.csv"
                read = read_diagram_csv(path, cfg.order)
                pd = read[0] if read else PersistenceDiagram(dim, np.zeros((0, 2)), cfg.order)
                pd = cap_infinite(pd, cfg.cap)  # no-op on already-capped files
                pi = diagram_image(pd, picfg, (cid, race, dim, cfg.complex_kind))
                write_pi_json(em.path("pimages", f"{name}_{race}_h{dim}.json"), pi)
                per_city[(race, dim)] = pi
        features.append(concatenate_features(per_city, cfg.group, cid))
    write_features_csv(em.path("features.csv"), features)


def stage_cluster(cfg: PipelineConfig, em: Emitter) -> None:
    """Feature matrix to clustering, medoids, elbow curve, and figures."""
    out = em.root
    ids, X = read_features_csv(out / "features.csv")
    vectors = [FeatureVector(c, cfg.group, row) for c, row in zip(ids, X)]
    if len(vectors) < max(2, cfg.k):
        raise ParameterError(
            f"clustering needs at least max(2, K)={max(2, cfg.k)} cities, found {len(vectors)}")
    clustering = kmedoids(vectors, cfg.k)
    write_clustering_csv(em.path("clustering.csv"), clustering)
    write_medoids_csv(em.path("medoids.csv"), clustering)
    curve = distortion_curve(vectors, min(cfg.k_max, len(vectors)))
    write_elbow_csv(em.path("elbow.csv"), curve)
    report.elbow_figure(curve, em.path("figures", "elbow.svg"))

    pim_dir = out / "pimages"
    if pim_dir.is_dir():
        pis = {}
        for cid in ids:
            name = safe_name(cid)
            for race in GROUPS[cfg.group]:
                for dim in (0, 1):
                    pis[(cid, race, dim)] = read_pi_json(pim_dir / f"{name}_{race}_h{dim}.json")
        panel = medoid_images(clustering, pis, cfg.group)
        report.medoid_pi_figure(panel, cfg.group, em.path("figures", "medoid_pis.svg"))


def stage_stats(cfg: PipelineConfig, em: Emitter,
                cities: list[CityDemographics] | None = None) -> None:
    """Per-city statistics, Z-scores, and per-cluster mean Z-scores."""
    cities = cities if cities is not None else _load_cities(cfg.input_dir)
    ids, values = stats_table(cities)
    write_stats_csv(em.path("stats.csv"), ids, values)
    ztable = zscore_table(ids, values)
    write_stats_csv(em.path("zscores.csv"), ids, ztable.z)
    clustering_path = em.root / "clustering.csv"
    if clustering_path.exists():
        assignment = read_clustering_csv(clustering_path)
        k = max(assignment.values())
        labels = np.array([assignment[c] for c in ids])
        clustering = Clustering(k, ids, labels, [""] * k, 0.0)
        means = cluster_mean_stats(clustering, ztable)
        write_cluster_means_csv(em.path("cluster_means.csv"), means)


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every stage and write manifest.json; returns the manifest."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    em = Emitter(out)
    try:
        cities = stage_ingest(cfg, em)
        if len(cities) < max(2, cfg.k):
            raise ParameterError(
                f"pipeline needs at least max(2, K)={max(2, cfg.k)} bundles, "
                f"found {len(cities)}")
        stage_rasterize(cfg, em, cities)
        stage_persist(cfg, em)
        stage_pimage(cfg, em)
        stage_cluster(cfg, em)
        stage_stats(cfg, em, cities)
    except BaseException:
        em.cleanup()
        raise
    manifest = {
        "parameters": cfg.parameters(),
        "files": {
            str(p.relative_to(out)).replace("\\", "/"): _sha256(p)
            for p in sorted(set(em.written))
        },
    }
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
        f.write("\n")
    return manifest


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def compare_clusterings(paths: list) -> tuple[list[str], np.ndarray]:
    """Pairwise ARI matrix of clustering CSVs; labels are file stems."""
    if len(paths) < 2:
        raise ParameterError("need at least 2 clustering files to compare")
    labels = [Path(p).stem for p in paths]
    assignments = [read_clustering_csv(p) for p in paths]
    base = set(assignments[0])
    for p, a in zip(paths, assignments):
        if set(a) != base:
            raise ValidationError(f"{p}: city set differs from {paths[0]}")
    n = len(paths)
    matrix = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = adjusted_rand_index(assignments[i], assignments[j])
    return labels, matrix


def write_ari_csv(path, labels: list[str], matrix: np.ndarray) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["clustering", *labels])
        for lab, row in zip(labels, matrix):
            writer.writerow([lab, *[repr(float(x)) for x in row]])
