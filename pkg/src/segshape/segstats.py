"""Segregation indices, Z-score tables, cluster mean statistics, and
clustering agreement (Rand / Adjusted Rand).

Indices are reported on the 0-100 scale. Z-scores use the population standard
deviation over all cities; a constant statistic yields Z = 0 everywhere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .cluster import Clustering
from .errors import ParameterError, UndefinedIndexError, ValidationError
from .geo import RACES, CityDemographics

#: column order of the per-city statistics table
STAT_COLUMNS = (
    "total", "W%", "B%", "A%", "H%",
    "W-B IoD", "W-H IoD", "W-A IoD",
    "W-W EI", "B-B EI", "H-H EI", "A-A EI",
)

_RACE_LETTER = {"W": "white", "B": "black", "A": "asian", "H": "hispanic"}


def dissimilarity_index(city: CityDemographics, race_a: str, race_b: str) -> float:
    """Index of Dissimilarity between two groups, 0 (identical distributions)
    to 100 (complete segregation)."""
    pa, pb = city.race_total(race_a), city.race_total(race_b)
    if pa <= 0 or pb <= 0:
        raise UndefinedIndexError(
            f"IoD({race_a}, {race_b}) undefined for {city.city_id!r}: "
            f"citywide populations {pa}, {pb}")
    total = 0.0
    for t in city.tracts:
        total += abs(t.counts[race_a] / pa - t.counts[race_b] / pb)
    return 50.0 * total


def exposure_index(city: CityDemographics, race_a: str, race_b: str) -> float:
    """Average exposure of group a to group b, 0-100. With a == b this is the
    isolation of the group. Zero-population tracts contribute 0."""
    pa = city.race_total(race_a)
    if pa <= 0:
        raise UndefinedIndexError(
            f"EI({race_a}, {race_b}) undefined for {city.city_id!r}: "
            f"citywide {race_a} population is 0")
    total = 0.0
    for t in city.tracts:
        if t.total > 0:
            total += (t.counts[race_a] / pa) * (t.counts[race_b] / t.total)
    return 100.0 * total


def stats_table(cities: list[CityDemographics]) -> tuple[list[str], np.ndarray]:
    """Per-city statistics matrix with columns STAT_COLUMNS."""
    ids = [c.city_id for c in cities]
    rows = []
    for c in cities:
        pop = c.population()
        row = [float(pop)]
        for letter in "WBAH":
            r = _RACE_LETTER[letter]
            row.append(100.0 * c.race_total(r) / pop if pop > 0 else 0.0)
        for other in ("B", "H", "A"):
            row.append(dissimilarity_index(c, "white", _RACE_LETTER[other]))
        for letter in "WBHA":
            r = _RACE_LETTER[letter]
            row.append(exposure_index(c, r, r))
        rows.append(row)
    return ids, np.array(rows, dtype=np.float64)


@dataclass
class ZScoreTable:
    city_ids: list[str]
    columns: tuple[str, ...]
    z: np.ndarray      # (n_cities, n_columns)
    mean: np.ndarray
    std: np.ndarray    # population standard deviation


def zscore_table(city_ids: list[str], values: np.ndarray,
                 columns: tuple[str, ...] = STAT_COLUMNS) -> ZScoreTable:
    """Standardize each column; sigma = 0 columns get Z = 0 everywhere."""
    values = np.asarray(values, dtype=np.float64)
    if len(city_ids) < 2:
        raise ParameterError("Z-scores need at least 2 cities")
    mu = values.mean(axis=0)
    sigma = values.std(axis=0)  # population (divide by n)
    safe = np.where(sigma > 0, sigma, 1.0)
    z = (values - mu) / safe
    z[:, sigma == 0] = 0.0
    return ZScoreTable(list(city_ids), tuple(columns), z, mu, sigma)


def cluster_mean_stats(clustering: Clustering, table: ZScoreTable) -> np.ndarray:
    """Mean member Z-score per (cluster, statistic); rows are clusters 1..K."""
    assignment = clustering.assignment()
    missing = [c for c in table.city_ids if c not in assignment]
    if missing:
        raise ValidationError(f"clustering does not cover cities {missing}")
    out = np.zeros((clustering.k, table.z.shape[1]))
    labels = np.array([assignment[c] for c in table.city_ids])
    for k in range(1, clustering.k + 1):
        members = labels == k
        if not members.any():
            raise ValidationError(f"cluster {k} has no member cities")
        out[k - 1] = table.z[members].mean(axis=0)
    return out


def _check_same_cities(a1: dict[str, int], a2: dict[str, int]):
    if set(a1) != set(a2):
        raise ValidationError("clusterings cover different city sets")
    if len(a1) < 2:
        raise ParameterError("need at least 2 cities to compare clusterings")


def _contingency(a1: dict[str, int], a2: dict[str, int]) -> np.ndarray:
    cities = sorted(a1)
    l1 = sorted({a1[c] for c in cities})
    l2 = sorted({a2[c] for c in cities})
    i1 = {l: i for i, l in enumerate(l1)}
    i2 = {l: i for i, l in enumerate(l2)}
    table = np.zeros((len(l1), len(l2)), dtype=np.int64)
    for c in cities:
        table[i1[a1[c]], i2[a2[c]]] += 1
    return table


def _as_assignment(c) -> dict[str, int]:
    return c.assignment() if isinstance(c, Clustering) else dict(c)


def _comb2(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def rand_index(c1, c2) -> float:
    """Fraction of city pairs on which the two clusterings agree (both
    together or both apart). Computed from the contingency table."""
    a1, a2 = _as_assignment(c1), _as_assignment(c2)
    _check_same_cities(a1, a2)
    table = _contingency(a1, a2)
    n = table.sum()
    pairs = math.comb(int(n), 2)
    same_both = int(_comb2(table).sum())
    same_1 = int(_comb2(table.sum(axis=1)).sum())
    same_2 = int(_comb2(table.sum(axis=0)).sum())
    agreeing = pairs + 2 * same_both - same_1 - same_2
    return agreeing / pairs


def adjusted_rand_index(c1, c2) -> float:
    """Chance-corrected Rand index under the permutation model; a degenerate
    denominator (both clusterings trivial) yields 0."""
    a1, a2 = _as_assignment(c1), _as_assignment(c2)
    _check_same_cities(a1, a2)
    table = _contingency(a1, a2)
    n = table.sum()
    pairs = math.comb(int(n), 2)
    index = int(_comb2(table).sum())
    same_1 = int(_comb2(table.sum(axis=1)).sum())
    same_2 = int(_comb2(table.sum(axis=0)).sum())
    expected = same_1 * same_2 / pairs
    max_index = (same_1 + same_2) / 2
    if max_index == expected:
        return 0.0
    return (index - expected) / (max_index - expected)


def write_stats_csv(path, city_ids: list[str], values: np.ndarray,
                    columns: tuple[str, ...] = STAT_COLUMNS) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["city_id", *columns])
        for cid, row in zip(city_ids, values):
            writer.writerow([cid, *[repr(float(x)) for x in row]])


def read_stats_csv(path) -> tuple[list[str], tuple[str, ...], np.ndarray]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        ids, rows = [], []
        for row in reader:
            ids.append(row[0])
            rows.append([float(x) for x in row[1:]])
    return ids, tuple(header[1:]), np.array(rows, dtype=np.float64)


def write_cluster_means_csv(path, means: np.ndarray,
                            columns: tuple[str, ...] = STAT_COLUMNS) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cluster", *columns])
        for k, row in enumerate(means, start=1):
            writer.writerow([k, *[repr(float(x)) for x in row]])
