"""SVG rendering of rasters with optional construction overlays.

The raster becomes one ``<path>`` made of per-row runs, in cell units with the
y axis flipped so that larger ``y`` is drawn higher.  Output depends only on
the inputs: coordinates are printed with a fixed format and elements are
emitted in a fixed order.
"""

from __future__ import annotations

import numpy as np

from .construction import ConstructionParams, interval_A, interval_B
from .grid import BinaryRaster


def _num(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def row_runs(mask_row: np.ndarray):
    """(start, stop) pairs of the True runs in a boolean row (stop exclusive)."""
    padded = np.concatenate(([False], mask_row, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def render_svg(raster: BinaryRaster, params: ConstructionParams | None = None,
               overlay: str = "none") -> str:
    if overlay not in ("none", "disks", "intervals"):
        raise ValueError(f"unknown overlay {overlay!r}")
    g = raster.geometry
    nx, ny = g.nx, g.ny

    def px(x):
        return (x - g.x0) / g.h + 0.5

    def py(y):
        return ny - 0.5 - (y - g.y0) / g.h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{nx}" height="{ny}" viewBox="0 0 {nx} {ny}">',
        f'<rect x="0" y="0" width="{nx}" height="{ny}" fill="white"/>',
    ]
    parts = []
    for j in range(ny - 1, -1, -1):
        row = ny - 1 - j
        for a, b in row_runs(raster.mask[j]):
            parts.append(f"M{a} {row}h{b - a}v1h{a - b}z")
    if parts:
        out.append(f'<path fill="black" stroke="none" d="{"".join(parts)}"/>')

    if params is not None and overlay != "none":
        r = float(params.r)
        stroke = max(nx, ny) / 1500
        if overlay == "disks":
            for n in range(params.N + 1):
                for cx in interval_B(n):
                    out.append(
                        f'<circle cx="{_num(px(float(cx)))}" cy="{_num(py(-r))}" '
                        f'r="{_num(r / g.h)}" fill="none" stroke="#c0392b" '
                        f'stroke-width="{_num(stroke)}"/>')
        else:
            tick = 6 * stroke
            y0 = py(0.0) - 3 * stroke
            spans = [("B", interval_B(n), "#2471a3") for n in range(params.N + 1)]
            spans += [("A", interval_A(n), "#d68910") for n in range(1, params.N + 1)]
            for _, (lo, hi), colour in spans:
                x1, x2 = _num(px(float(lo))), _num(px(float(hi)))
                out.append(
                    f'<path fill="none" stroke="{colour}" stroke-width="{_num(stroke)}" '
                    f'd="M{x1} {_num(y0 + tick)}V{_num(y0)}H{x2}V{_num(y0 + tick)}"/>')
        lx, ly = px(1.5), py(0.0)
        out.append(f'<circle cx="{_num(lx)}" cy="{_num(ly)}" r="{_num(4 * stroke)}" '
                   f'fill="none" stroke="#27ae60" stroke-width="{_num(stroke)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
