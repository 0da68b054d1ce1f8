"""Deterministic, self-contained SVG emitters for diagrams, barcodes, and
persistence images. Bars and image cells are <rect class="bar">/<rect
class="cell"> elements so they are countable; axes are <line> elements.
Rendering the same artifact twice yields identical bytes.
"""

from __future__ import annotations

import numpy as np

from .homology import Barcode, PersistenceDiagram, to_barcode
from .pimage import PersistenceImage

_SIZE = 420.0
_MARGIN = 50.0


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _header(width=_SIZE, height=_SIZE) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]


def _axes(width=_SIZE, height=_SIZE) -> list[str]:
    x0, y0 = _MARGIN, height - _MARGIN
    x1, y1 = width - _MARGIN, _MARGIN
    return [
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="black"/>',
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" stroke="black"/>',
    ]


_DIM_COLORS = {0: "#1f77b4", 1: "#d62728", 2: "#2ca02c"}


def svg_diagram(diagrams) -> str:
    """Persistence diagram scatter; infinite deaths sit on the top border."""
    if isinstance(diagrams, PersistenceDiagram):
        diagrams = [diagrams]
    finite_vals = [1.0]
    for pd in diagrams:
        pts = pd.points
        finite_vals.extend(pts[np.isfinite(pts)].ravel().tolist())
    hi = max(finite_vals)
    span = _SIZE - 2 * _MARGIN

    def sx(v):
        return _MARGIN + span * v / hi

    def sy(v):
        return _SIZE - _MARGIN - span * v / hi

    parts = _header() + _axes()
    parts.append(f'<line x1="{_fmt(sx(0))}" y1="{_fmt(sy(0))}" x2="{_fmt(sx(hi))}" '
                 f'y2="{_fmt(sy(hi))}" stroke="#bbbbbb" stroke-dasharray="4 3"/>')
    for pd in diagrams:
        color = _DIM_COLORS.get(pd.dimension, "black")
        for b, d in pd.points:
            dv = hi if np.isinf(d) else d
            parts.append(f'<circle cx="{_fmt(sx(b))}" cy="{_fmt(sy(dv))}" r="3" '
                         f'fill="{color}" fill-opacity="0.7"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_barcode(barcode) -> str:
    """Barcode with one <rect class="bar"> per interval, sorted by dimension
    then birth; infinite ends run to the right border."""
    if isinstance(barcode, PersistenceDiagram):
        barcode = to_barcode([barcode])
    elif isinstance(barcode, list):
        barcode = to_barcode(barcode)
    intervals = sorted(barcode.intervals, key=lambda t: (t[2], t[0], t[1]))
    finite = [1.0] + [v for s, e, _ in intervals for v in (s, e) if np.isfinite(v)]
    hi = max(finite)
    nbars = max(len(intervals), 1)
    height = 2 * _MARGIN + 10.0 * nbars
    span = _SIZE - 2 * _MARGIN

    parts = _header(_SIZE, height)
    x0 = _MARGIN
    parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(height - _MARGIN)}" '
                 f'x2="{_fmt(_SIZE - _MARGIN)}" y2="{_fmt(height - _MARGIN)}" stroke="black"/>')
    for i, (start, end, dim) in enumerate(intervals):
        lo = min(start, end) if np.isfinite(end) else min(start, hi)
        hi_end = max(start, end) if np.isfinite(end) else hi
        x = x0 + span * lo / hi
        w = max(span * (hi_end - lo) / hi, 1.0)
        y = _MARGIN + 10.0 * i
        color = _DIM_COLORS.get(dim, "black")
        parts.append(f'<rect class="bar" x="{_fmt(x)}" y="{_fmt(y)}" '
                     f'width="{_fmt(w)}" height="6" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_pimage(pi: PersistenceImage) -> str:
    """Grayscale cell grid, one <rect class="cell"> per pixel, origin at the
    lower left (birth rightward, lifespan upward)."""
    n = pi.config.resolution
    span = _SIZE - 2 * _MARGIN
    cell = span / n
    peak = float(pi.pixels.max())
    parts = _header() + _axes()
    for r in range(n):
        for c in range(n):
            v = pi.pixels[r, c] / peak if peak > 0 else 0.0
            shade = int(round(255 * (1.0 - v)))
            x = _MARGIN + c * cell
            y = _SIZE - _MARGIN - (r + 1) * cell
            parts.append(f'<rect class="cell" x="{_fmt(x)}" y="{_fmt(y)}" '
                         f'width="{_fmt(cell)}" height="{_fmt(cell)}" '
                         f'fill="rgb({shade},{shade},{shade})"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_svg(artifact) -> str:
    """Dispatch on artifact type: diagram, barcode, or persistence image."""
    if isinstance(artifact, PersistenceImage):
        return svg_pimage(artifact)
    if isinstance(artifact, Barcode):
        return svg_barcode(artifact)
    if isinstance(artifact, PersistenceDiagram) or (
            isinstance(artifact, list) and all(isinstance(a, PersistenceDiagram) for a in artifact)):
        return svg_diagram(artifact)
    raise TypeError(f"cannot render artifact of type {type(artifact).__name__}")
