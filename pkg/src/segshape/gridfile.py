"""Portable binary grid files.

Layout (little-endian): magic b"SGRD", uint32 version, uint32 width,
uint32 height, float64 origin_x, origin_y, pixel_size, dt, t_max, then
width*height float32 values row-major. Never-included pixels are stored as
+inf. dt/t_max are 0 for rasters that are not inclusion-time fields.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ValidationError
from .geo import Raster

_MAGIC = b"SGRD"
_VERSION = 1
_HEADER = struct.Struct("<4sIII5d")


def write_grid(path, raster: Raster, dt: float = 0.0, t_max: float = 0.0) -> None:
    header = _HEADER.pack(_MAGIC, _VERSION, raster.width, raster.height,
                          raster.origin[0], raster.origin[1], raster.pixel_size,
                          dt, t_max)
    body = raster.values.astype("<f4").tobytes()
    with open(path, "wb") as f:
        f.write(header)
        f.write(body)


def read_grid(path) -> tuple[Raster, float, float]:
    """Returns (raster, dt, t_max)."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise ValidationError(f"{path}: truncated grid file")
    magic, version, width, height, ox, oy, px, dt, t_max = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise ValidationError(f"{path}: not a grid file (bad magic {magic!r})")
    if version != _VERSION:
        raise ValidationError(f"{path}: unsupported grid version {version}")
    expected = _HEADER.size + 4 * width * height
    if len(blob) != expected:
        raise ValidationError(f"{path}: expected {expected} bytes, found {len(blob)}")
    values = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).astype(np.float64)
    raster = Raster(width, height, (ox, oy), px, values.reshape(height, width))
    return raster, dt, t_max
