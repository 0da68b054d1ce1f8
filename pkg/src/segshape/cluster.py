"""K-medoids clustering of city feature vectors (classic PAM, deterministic).

BUILD greedily seeds the medoids (first one minimizes total distance, each
next maximizes the distortion reduction); SWAP repeatedly applies the best
strictly-improving (medoid, non-medoid) exchange until none exists. All ties
break toward the lowest input index, so identical inputs give identical
clusterings. Distortion is the plain sum of distances to assigned medoids.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import MissingArtifactError, ParameterError, ValidationError
from .pimage import GROUPS, FeatureVector, PersistenceImage


@dataclass
class Clustering:
    k: int
    city_ids: list[str]
    labels: np.ndarray      # values in 1..k, aligned with city_ids
    medoids: list[str]      # cluster c is represented by medoids[c-1]
    distortion: float

    def assignment(self) -> dict[str, int]:
        return {c: int(l) for c, l in zip(self.city_ids, self.labels)}


def pam(dist: np.ndarray, k: int) -> tuple[list[int], np.ndarray, float]:
    """PAM on a precomputed symmetric distance matrix.

    Returns (medoid indices ascending, labels in 1..k, distortion).
    """
    n = len(dist)
    if not 1 <= k <= n:
        raise ParameterError(f"K must be in [1, {n}], got {k}")

    # BUILD
    medoids = [int(np.argmin(dist.sum(axis=0)))]
    nearest = dist[medoids[0]].copy()
    while len(medoids) < k:
        gains = np.maximum(nearest[None, :] - dist, 0.0).sum(axis=1)
        gains[medoids] = -1.0
        c = int(np.argmax(gains))
        medoids.append(c)
        nearest = np.minimum(nearest, dist[c])

    # SWAP
    medoids = sorted(medoids)
    while True:
        med = np.array(medoids)
        dmed = dist[med]                      # (k, n)
        order = np.argsort(dmed, axis=0, kind="stable")
        d1 = dmed[order[0], np.arange(n)]
        which1 = order[0]                     # index into medoids list
        d2 = dmed[order[1], np.arange(n)] if k > 1 else np.full(n, np.inf)
        total = d1.sum()

        best = (0.0, None, None)
        in_medoids = np.zeros(n, dtype=bool)
        in_medoids[medoids] = True
        for mi, m in enumerate(medoids):
            owned = which1 == mi
            for h in range(n):
                if in_medoids[h]:
                    continue
                delta = (np.minimum(dist[h][owned], d2[owned]).sum() - d1[owned].sum()
                         + np.minimum(dist[h][~owned] - d1[~owned], 0.0).sum())
                if delta < best[0] - 1e-12:
                    best = (delta, mi, h)
        if best[1] is None:
            break
        medoids[best[1]] = best[2]
        medoids = sorted(medoids)

    med = np.array(medoids)
    labels = np.argmin(dist[med], axis=0) + 1   # argmin takes the lowest medoid on ties
    # a medoid always belongs to its own cluster, even when another medoid is
    # at distance 0 (duplicate points); distortion is unaffected
    labels[med] = np.arange(k) + 1
    distortion = float(dist[med][labels - 1, np.arange(n)].sum())
    return medoids, labels.astype(np.int64), distortion


def kmedoids(vectors: list[FeatureVector], k: int) -> Clustering:
    """PAM with Euclidean distance on the cities' concatenated PI vectors."""
    ids = [fv.city_id for fv in vectors]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate city_ids in feature vectors")
    if not vectors:
        raise ParameterError("no feature vectors given")
    X = np.stack([np.asarray(fv.values, dtype=np.float64) for fv in vectors])
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    medoid_idx, labels, distortion = pam(dist, k)
    return Clustering(k, ids, labels, [ids[m] for m in medoid_idx], distortion)


def distortion_curve(vectors: list[FeatureVector], k_max: int) -> list[tuple[int, float]]:
    """(K, distortion) for K = 1..k_max; distortion is non-increasing in K."""
    if k_max > len(vectors):
        raise ParameterError(f"k_max = {k_max} exceeds the number of cities {len(vectors)}")
    curve = []
    for k in range(1, k_max + 1):
        curve.append((k, kmedoids(vectors, k).distortion))
    return curve


def medoid_images(clustering: Clustering, pis: dict,
                  selection: str) -> dict[int, dict[tuple[str, int], PersistenceImage]]:
    """For each cluster, the medoid city's persistence images.

    ``pis`` maps (city_id, race, dim) -> PersistenceImage; the result maps
    cluster label -> {(race, dim) -> PersistenceImage} restricted to the group.
    """
    if selection not in GROUPS:
        raise ParameterError(f"unknown group {selection!r}")
    out = {}
    for ci, medoid in enumerate(clustering.medoids, start=1):
        per = {}
        for race in GROUPS[selection]:
            for dim in (0, 1):
                pi = pis.get((medoid, race, dim))
                if pi is None:
                    raise MissingArtifactError(
                        f"missing persistence image for medoid {medoid!r} ({race}, H{dim})")
                per[(race, dim)] = pi
        out[ci] = per
    return out


def write_clustering_csv(path, clustering: Clustering) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["city_id", "cluster"])
        for c, l in zip(clustering.city_ids, clustering.labels):
            writer.writerow([c, int(l)])


def read_clustering_csv(path) -> dict[str, int]:
    out = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            out[row["city_id"]] = int(row["cluster"])
    if not out:
        raise ValidationError(f"{path}: empty clustering file")
    return out


def write_medoids_csv(path, clustering: Clustering) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cluster", "medoid_city_id"])
        for ci, medoid in enumerate(clustering.medoids, start=1):
            writer.writerow([ci, medoid])


def write_elbow_csv(path, curve: list[tuple[int, float]]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["k", "distortion"])
        for k, d in curve:
            writer.writerow([k, repr(float(d))])
