"""City demographic bundles and tract rasterization.

A bundle is a JSON file holding one city's census tracts: polygon geometry in
an already-projected planar CRS plus per-race population counts. Rasterization
samples tract membership at pixel centers with the even-odd rule; ties on
shared boundaries go to the tract that appears first in the bundle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BundleError, ParameterError

RACES = ("white", "black", "asian", "hispanic")

# Longest bounding-box side in pixels; keeps level-set and homology cost
# predictable across cities of very different physical extent.
DEFAULT_LONG_SIDE = 500


@dataclass(frozen=True)
class Tract:
    tract_id: str
    total: int
    counts: dict[str, int]
    exterior: list[tuple[float, float]]
    interiors: list[list[tuple[float, float]]]

    def percentage(self, race: str) -> float:
        """Race share of the tract population on the 0-100 scale (0 if empty tract)."""
        if self.total <= 0:
            return 0.0
        return 100.0 * self.counts[race] / self.total


@dataclass(frozen=True)
class CityDemographics:
    city_id: str
    tracts: list[Tract]

    @property
    def n(self) -> int:
        return len(self.tracts)

    def race_total(self, race: str) -> int:
        return sum(t.counts[race] for t in self.tracts)

    def population(self) -> int:
        return sum(t.total for t in self.tracts)

    def bounds(self) -> tuple[float, float, float, float]:
        xs, ys = [], []
        for t in self.tracts:
            for ring in [t.exterior] + t.interiors:
                for x, y in ring:
                    xs.append(x)
                    ys.append(y)
        return min(xs), min(ys), max(xs), max(ys)


@dataclass
class Raster:
    """Row-major grid of values. ``origin`` is the world coordinate of the
    center of pixel (0, 0); pixel (col, row) has center origin + (col, row) * pixel_size."""

    width: int
    height: int
    origin: tuple[float, float]
    pixel_size: float
    values: np.ndarray  # shape (height, width)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.height, self.width):
            raise ValueError(
                f"values shape {self.values.shape} != (height, width) = "
                f"({self.height}, {self.width})"
            )
        if self.width < 1 or self.height < 1 or self.pixel_size <= 0:
            raise ValueError("raster must have positive dimensions and pixel size")

    def pixel_centers_x(self) -> np.ndarray:
        return self.origin[0] + np.arange(self.width) * self.pixel_size

    def pixel_centers_y(self) -> np.ndarray:
        return self.origin[1] + np.arange(self.height) * self.pixel_size

    def like(self, values: np.ndarray) -> "Raster":
        """New raster with the same geometry and different values."""
        return Raster(self.width, self.height, self.origin, self.pixel_size, values)


def _parse_ring(raw, what: str) -> list[tuple[float, float]]:
    if not isinstance(raw, list) or len(raw) < 4:
        raise BundleError(f"{what}: ring must be a list of >= 4 [x, y] points")
    ring = []
    for p in raw:
        if not isinstance(p, list) or len(p) != 2:
            raise BundleError(f"{what}: ring point {p!r} is not an [x, y] pair")
        x, y = float(p[0]), float(p[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise BundleError(f"{what}: non-finite coordinate {p!r}")
        ring.append((x, y))
    if ring[0] != ring[-1]:
        raise BundleError(f"{what}: ring is not closed (first point != last point)")
    return ring


def load_city_bundle(path) -> CityDemographics:
    """Parse and validate one city bundle file."""
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise BundleError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from e

    if not isinstance(raw, dict) or "city_id" not in raw or "tracts" not in raw:
        raise BundleError(f"{path}: bundle must be an object with 'city_id' and 'tracts'")
    city_id = str(raw["city_id"])
    if not isinstance(raw["tracts"], list) or len(raw["tracts"]) == 0:
        raise BundleError(f"{path}: city {city_id!r} has no tracts")

    tracts = []
    for k, t in enumerate(raw["tracts"]):
        where = f"{path}: city {city_id!r} tract #{k}"
        if not isinstance(t, dict):
            raise BundleError(f"{where}: tract entry is not an object")
        for field in ("tract_id", "total", "counts", "polygon"):
            if field not in t:
                raise BundleError(f"{where}: missing field {field!r}")
        tract_id = str(t["tract_id"])
        where = f"{path}: city {city_id!r} tract {tract_id!r}"
        total = t["total"]
        if not isinstance(total, int) or total < 0:
            raise BundleError(f"{where}: field 'total' must be a non-negative integer")
        counts = {}
        for race in RACES:
            c = t["counts"].get(race)
            if not isinstance(c, int) or c < 0:
                raise BundleError(f"{where}: field 'counts.{race}' must be a non-negative integer")
            if c > total:
                raise BundleError(f"{where}: counts.{race} = {c} exceeds total = {total}")
            counts[race] = c
        poly = t["polygon"]
        if not isinstance(poly, dict) or "exterior" not in poly:
            raise BundleError(f"{where}: field 'polygon' must be an object with 'exterior'")
        exterior = _parse_ring(poly["exterior"], f"{where} exterior")
        interiors = [
            _parse_ring(r, f"{where} interior #{i}")
            for i, r in enumerate(poly.get("interiors", []))
        ]
        tracts.append(Tract(tract_id, total, counts, exterior, interiors))

    return CityDemographics(city_id, tracts)


def raster_geometry(city: CityDemographics, long_side: int) -> tuple[int, int, tuple[float, float], float]:
    """Width, height, origin and pixel size for a city raster whose longest
    bounding-box side spans ``long_side`` pixel centers."""
    if long_side < 1:
        raise ParameterError("long_side must be >= 1")
    minx, miny, maxx, maxy = city.bounds()
    lx, ly = maxx - minx, maxy - miny
    longest = max(lx, ly)
    if longest <= 0:
        raise BundleError(f"city {city.city_id!r}: degenerate (zero-extent) geometry")
    px = longest / long_side
    width = max(1, int(math.ceil(lx / px - 1e-9)))
    height = max(1, int(math.ceil(ly / px - 1e-9)))
    return width, height, (minx, miny), px


def _ring_crossings(ring, y):
    """x coordinates where the ring's edges cross the horizontal line at y,
    using half-open vertical spans so vertices are counted once."""
    xs = []
    for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
        if (y1 <= y < y2) or (y2 <= y < y1):
            xs.append(x1 + (y - y1) * (x2 - x1) / (y2 - y1))
    return xs


def tract_index_raster(city: CityDemographics, long_side: int = DEFAULT_LONG_SIDE) -> tuple[np.ndarray, Raster]:
    """Assign each pixel center to a tract (index into city.tracts) or -1.

    Even-odd rule over all rings of a tract (so interior rings punch holes);
    earlier tracts in the bundle win contested pixels. Returns the index grid
    and a zero-valued Raster carrying the grid geometry.
    """
    width, height, origin, px = raster_geometry(city, long_side)
    xs = origin[0] + np.arange(width) * px
    index = np.full((height, width), -1, dtype=np.int32)
    for ti, tract in enumerate(city.tracts):
        rings = [tract.exterior] + tract.interiors
        for row in range(height):
            y = origin[1] + row * px
            crossings = []
            for ring in rings:
                crossings.extend(_ring_crossings(ring, y))
            if not crossings:
                continue
            cr = np.sort(np.asarray(crossings))
            # parity of the number of crossings strictly right of each center
            n_right = len(cr) - np.searchsorted(cr, xs, side="right")
            inside = (n_right % 2 == 1) & (index[row] == -1)
            index[row, inside] = ti
    shell = Raster(width, height, origin, px, np.zeros((height, width)))
    return index, shell


def percentage_from_index(city: CityDemographics, race: str,
                          index: np.ndarray, shell: Raster) -> Raster:
    """Percentage raster from a precomputed tract-index grid."""
    _check_race(race)
    pct = np.array([t.percentage(race) for t in city.tracts] + [0.0])
    return shell.like(pct[index])  # index -1 hits the trailing 0


def mask_from_index(city: CityDemographics, race: str, threshold: float,
                    index: np.ndarray, shell: Raster) -> Raster:
    """Majority mask from a precomputed tract-index grid."""
    _check_race(race)
    if not (0.0 <= threshold <= 100.0):
        raise ParameterError(f"threshold must be in [0, 100], got {threshold}")
    pct = np.array([t.percentage(race) for t in city.tracts] + [-1.0])
    return shell.like((pct[index] >= threshold).astype(np.float64))


def rasterize_percentage(city: CityDemographics, race: str,
                         long_side: int = DEFAULT_LONG_SIDE) -> Raster:
    """Grayscale raster of the race's tract-level percentage (0-100); pixels
    outside every tract and zero-population tracts read 0."""
    index, shell = tract_index_raster(city, long_side)
    return percentage_from_index(city, race, index, shell)


def rasterize_majority_mask(city: CityDemographics, race: str, threshold: float = 50.0,
                            long_side: int = DEFAULT_LONG_SIDE) -> Raster:
    """Binary raster: 1 where the containing tract's race percentage is at
    least ``threshold`` (inclusive), else 0."""
    index, shell = tract_index_raster(city, long_side)
    return mask_from_index(city, race, threshold, index, shell)


def _check_race(race: str):
    if race not in RACES:
        raise ParameterError(f"unknown race {race!r}; expected one of {RACES}")
