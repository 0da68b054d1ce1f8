"""Persistence images: stable fixed-size vectorizations of persistence diagrams.

A diagram is first moved to birth-lifespan coordinates. Each point then
contributes a normalized Gaussian weighted by a linear ramp in lifespan
(zero weight at zero lifespan, weight one at the configured cap), and each
output pixel integrates the resulting surface in closed form via separable
Gaussian CDF differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import MissingArtifactError, ParameterError
from .homology import PersistenceDiagram

GROUPS = {
    "WBAH": ("white", "black", "asian", "hispanic"),
    "WB": ("white", "black"),
    "B": ("black",),
}


@dataclass(frozen=True)
class PIConfig:
    sigma: float
    resolution: int
    birth_range: tuple[float, float]
    persistence_range: tuple[float, float]

    def __post_init__(self):
        if self.sigma <= 0:
            raise ParameterError("sigma must be positive")
        if self.resolution < 1:
            raise ParameterError("resolution must be >= 1")
        for lo, hi in (self.birth_range, self.persistence_range):
            if not hi > lo:
                raise ParameterError(f"range [{lo}, {hi}] must have hi > lo")


LEVELSET_PI_CONFIG = PIConfig(sigma=1.0, resolution=20,
                              birth_range=(0.0, 20.0), persistence_range=(0.0, 20.0))
CUBICAL_PI_CONFIG = PIConfig(sigma=5.0, resolution=100,
                             birth_range=(0.0, 100.0), persistence_range=(0.0, 100.0))


@dataclass
class PersistenceImage:
    """pixels[row, col]: row = lifespan bin (ascending), col = birth bin
    (ascending); vectorization is row-major."""

    config: PIConfig
    pixels: np.ndarray
    provenance: tuple | None = None  # (city, race, dim, kind)

    def vector(self) -> np.ndarray:
        return self.pixels.ravel().copy()


@dataclass
class FeatureVector:
    city_id: str
    selection: str
    values: np.ndarray


def birth_persistence_transform(pd: PersistenceDiagram) -> np.ndarray:
    """Map diagram points (b, d) to (b, |d - b|). Lifespan is taken absolute
    so both filtration orientations land in the same upper half plane."""
    pts = pd.points
    if np.isinf(pts).any():
        raise ParameterError(
            f"diagram (dim {pd.dimension}) contains uncapped infinite deaths; "
            "apply cap_infinite first")
    return np.stack([pts[:, 0], np.abs(pts[:, 1] - pts[:, 0])], axis=1)


def persistence_image(points: np.ndarray, cfg: PIConfig,
                      provenance: tuple | None = None) -> PersistenceImage:
    """Integrate the ramp-weighted Gaussian surface of birth-lifespan points
    over an N x N grid. Mass outside the grid is truncated, not renormalized."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = cfg.resolution
    img = np.zeros((n, n))
    if len(points):
        weights = points[:, 1] / cfg.persistence_range[1]
        live = weights > 0  # ramp annihilates zero-lifespan points exactly
        if live.any():
            b, p, w = points[live, 0], points[live, 1], weights[live]
            bedges = np.linspace(cfg.birth_range[0], cfg.birth_range[1], n + 1)
            pedges = np.linspace(cfg.persistence_range[0], cfg.persistence_range[1], n + 1)
            cdf_b = ndtr((bedges[None, :] - b[:, None]) / cfg.sigma)
            cdf_p = ndtr((pedges[None, :] - p[:, None]) / cfg.sigma)
            img = np.einsum("u,ur,uc->rc", w, np.diff(cdf_p, axis=1), np.diff(cdf_b, axis=1))
    return PersistenceImage(cfg, img, provenance)


def diagram_image(pd: PersistenceDiagram, cfg: PIConfig,
                  provenance: tuple | None = None) -> PersistenceImage:
    """Convenience: birth-lifespan transform followed by persistence_image."""
    return persistence_image(birth_persistence_transform(pd), cfg, provenance)


def concatenate_features(pis: dict, selection: str, city_id: str = "") -> FeatureVector:
    """Concatenate vectorized PIs keyed by (race, dim) in the fixed order:
    races as in the selection group (W, B, A, H restricted), H0 before H1."""
    if selection not in GROUPS:
        raise ParameterError(f"unknown group {selection!r}; expected one of {sorted(GROUPS)}")
    blocks = []
    shape = None
    for race in GROUPS[selection]:
        for dim in (0, 1):
            pi = pis.get((race, dim))
            if pi is None:
                raise MissingArtifactError(f"missing persistence image for ({race}, H{dim})")
            if shape is None:
                shape = pi.pixels.shape
            elif pi.pixels.shape != shape:
                raise ParameterError(
                    f"persistence image for ({race}, H{dim}) has shape "
                    f"{pi.pixels.shape}, expected {shape}")
            blocks.append(pi.vector())
    return FeatureVector(city_id, selection, np.concatenate(blocks))


def write_pi_json(path, pi: PersistenceImage) -> None:
    city, race, dim, kind = pi.provenance if pi.provenance else ("", "", -1, "")
    doc = {
        "city": city,
        "race": race,
        "dim": dim,
        "kind": kind,
        "resolution": pi.config.resolution,
        "sigma": pi.config.sigma,
        "birth_range": list(pi.config.birth_range),
        "persistence_range": list(pi.config.persistence_range),
        "pixels": [float(x) for x in pi.pixels.ravel()],
    }
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True)
        f.write("\n")


def read_pi_json(path) -> PersistenceImage:
    with open(path) as f:
        doc = json.load(f)
    cfg = PIConfig(doc["sigma"], doc["resolution"],
                   tuple(doc["birth_range"]), tuple(doc["persistence_range"]))
    n = cfg.resolution
    pixels = np.array(doc["pixels"], dtype=np.float64).reshape(n, n)
    return PersistenceImage(cfg, pixels, (doc["city"], doc["race"], doc["dim"], doc["kind"]))


def write_features_csv(path, features: list[FeatureVector]) -> None:
    """One row per city: city_id followed by the feature values (no header)."""
    with open(path, "w") as f:
        for fv in features:
            f.write(fv.city_id + "," + ",".join(repr(float(x)) for x in fv.values) + "\n")


def read_features_csv(path) -> tuple[list[str], np.ndarray]:
    ids, rows = [], []
    with open(path) as f:
        for line in f:
            parts = line.rstrip("\n").split(",")
            ids.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    return ids, np.array(rows, dtype=np.float64)
