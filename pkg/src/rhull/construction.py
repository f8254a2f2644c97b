"""The toothed set and its one-dimensional skeleton.

Intervals on the x-axis: ``B_0 = [0, 1/2]`` followed by alternating gaps
``A_n`` and pieces ``B_n`` whose lengths halve at every step, so the pieces
accumulate at ``x = 3/2``.  Above each ``B_n`` sits a tooth: the bounded
region between the line ``y = 0`` and two radius-``r`` circles tangent to that
line at the endpoints of ``B_n``.  The toothed set is the union of the teeth
plus the accumulation point.

Interval endpoints are exact ``Fraction`` values.  Membership tests avoid
square roots, so they are exact for ``Fraction`` input and for dyadic floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grid import BinaryRaster, GridGeometry

HALF = Fraction(1, 2)
LIMIT_X = Fraction(3, 2)


@dataclass(frozen=True)
class ConstructionParams:
    r: float = 0.5
    N: int = 6
    include_limit_point: bool = True

    def __post_init__(self):
        if not self.r > 0.25:
            raise ValueError(f"r must exceed 1/4 so the carving disks of B_0 overlap, got {self.r}")
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N}")

    def to_dict(self) -> dict:
        return {"r": float(self.r), "N": int(self.N), "include_limit_point": self.include_limit_point}


@dataclass(frozen=True)
class ToothSpec:
    n: int
    left: Fraction
    right: Fraction
    width: Fraction
    bottom: float


def seq_a(n: int) -> Fraction:
    if n < 1:
        raise ValueError(f"a_n is defined for n >= 1, got {n}")
    return Fraction(1, 2 ** n)


def interval_B(n: int) -> tuple[Fraction, Fraction]:
    if n < 0:
        raise ValueError(f"B_n is defined for n >= 0, got {n}")
    if n == 0:
        return (Fraction(0), HALF)
    return (LIMIT_X - Fraction(2, 2 ** n) + Fraction(1, 2 ** (n + 1)), LIMIT_X - Fraction(1, 2 ** n))


def interval_A(n: int) -> tuple[Fraction, Fraction]:
    if n < 1:
        raise ValueError(f"A_n is defined for n >= 1, got {n}")
    left = LIMIT_X - Fraction(2, 2 ** n)
    return (left, left + Fraction(1, 2 ** (n + 1)))


def accumulation_point(params: ConstructionParams | None = None) -> tuple[Fraction, Fraction]:
    """Limit of the right endpoints of ``B_n``: ``(3/2, 0)``."""
    return (LIMIT_X, Fraction(0))


@dataclass(frozen=True)
class IntervalTable:
    A: tuple  # A[n-1] = A_n for n = 1..N
    B: tuple  # B[n] = B_n for n = 0..N

    @classmethod
    def build(cls, N: int) -> "IntervalTable":
        return cls(tuple(interval_A(n) for n in range(1, N + 1)),
                   tuple(interval_B(n) for n in range(N + 1)))

    def to_json(self) -> str:
        def pair(iv):
            return [[iv[0].numerator, iv[0].denominator], [iv[1].numerator, iv[1].denominator]]

        return json.dumps({
            "A": {str(n): pair(iv) for n, iv in enumerate(self.A, start=1)},
            "B": {str(n): pair(iv) for n, iv in enumerate(self.B)},
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "IntervalTable":
        d = json.loads(text)

        def unpair(p):
            return (Fraction(*p[0]), Fraction(*p[1]))

        A = tuple(unpair(d["A"][str(n)]) for n in range(1, len(d["A"]) + 1))
        B = tuple(unpair(d["B"][str(n)]) for n in range(len(d["B"])))
        return cls(A, B)


def tooth(n: int, params: ConstructionParams) -> ToothSpec:
    left, right = interval_B(n)
    width = right - left
    r = float(params.r)
    half = float(width) / 2
    return ToothSpec(n, left, right, width, -r + math.sqrt(r * r - half * half))


def _in_tooth(x, y, left, right, r):
    """Closed tooth over ``[left, right]``; works elementwise on arrays.

    Between ``y = -r`` and the tooth bottom the two open disks cover the whole
    strip, so ``y > -r`` is enough to cut away the unbounded part.
    """
    yr = y + r
    r2 = r * r
    return ((y <= 0) & (yr > 0) & (x >= left) & (x <= right)
            & ((x - left) ** 2 + yr * yr >= r2)
            & ((x - right) ** 2 + yr * yr >= r2))


def _exact(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def tooth_index(p, params: ConstructionParams):
    """Index of the tooth containing ``p``, or None."""
    x, y = _exact(p[0]), _exact(p[1])
    r = _exact(params.r)
    for n in range(params.N + 1):
        left, right = interval_B(n)
        if left <= x <= right:
            return n if _in_tooth(x, y, left, right, r) else None
    return None


def member_T(p, params: ConstructionParams) -> bool:
    if params.include_limit_point and _exact(p[0]) == LIMIT_X and _exact(p[1]) == 0:
        return True
    return tooth_index(p, params) is not None


def member_C1d(p, params: ConstructionParams) -> bool:
    """Points of ``B_0 u B_1 u ... u B_N u {3/2}`` on the x-axis."""
    x, y = _exact(p[0]), _exact(p[1])
    if y != 0:
        return False
    if x == LIMIT_X:
        return True
    return any(lo <= x <= hi for lo, hi in (interval_B(n) for n in range(params.N + 1)))


def max_cell_size(params: ConstructionParams) -> Fraction:
    """Coarsest spacing that still puts 8 cells across the narrowest tooth."""
    return Fraction(1, 2 ** (params.N + 1)) / 8


def set_bbox(params: ConstructionParams) -> tuple[float, float, float, float]:
    """(xmin, xmax, ymin, ymax) of the toothed set."""
    return (0.0, 1.5, tooth(0, params).bottom, 0.0)


def _validate(params: ConstructionParams, geometry: GridGeometry, allow_partial: bool):
    h = Fraction(geometry.h)
    hmax = max_cell_size(params)
    if h > hmax:
        raise ValueError(f"cell size {geometry.h} too coarse for N={params.N}: need h <= {float(hmax)}")
    xmin, xmax, ymin, ymax = geometry.bbox
    sx0, sx1, sy0, sy1 = set_bbox(params)
    if xmax < sx0 or xmin > sx1 or ymax < sy0 or ymin > sy1:
        raise ValueError("geometry does not overlap the set")
    if not allow_partial and (xmin > sx0 or xmax < sx1 or ymin > sy0 or ymax < sy1):
        raise ValueError(
            f"geometry [{xmin}, {xmax}] x [{ymin}, {ymax}] does not cover the set "
            f"[{sx0}, {sx1}] x [{sy0:.6g}, {sy1}]")
    # the narrow teeth are thinner than a cell: they only show up on a row at y = 0
    if Fraction(geometry.y0) / h != round(Fraction(geometry.y0) / h):
        raise ValueError("the line y = 0 must pass through a row of cell centers "
                         "(use GridGeometry.from_bbox to snap the grid)")


def _index_range(lo, hi, origin, h, n):
    a = max(math.ceil((lo - origin) / h - 1e-9), 0)
    b = min(math.floor((hi - origin) / h + 1e-9), n - 1)
    return a, b


def build_raster(params: ConstructionParams, geometry: GridGeometry, *,
                 allow_partial: bool = False) -> BinaryRaster:
    """Rasterize the toothed set by cell-center sampling.

    Each tooth is evaluated only over its own bounding box.  With
    ``include_limit_point`` the cell nearest ``(3/2, 0)`` is set as well.
    ``allow_partial`` accepts a geometry that sees only part of the set.
    """
    _validate(params, geometry, allow_partial)
    g = geometry
    xs, ys = g.xs(), g.ys()
    mask = np.zeros(g.shape, np.bool_)
    r = float(params.r)
    for n in range(params.N + 1):
        t = tooth(n, params)
        i0, i1 = _index_range(float(t.left), float(t.right), g.x0, g.h, g.nx)
        j0, j1 = _index_range(t.bottom, 0.0, g.y0, g.h, g.ny)
        if i0 > i1 or j0 > j1:
            continue
        X, Y = np.meshgrid(xs[i0:i1 + 1], ys[j0:j1 + 1])
        mask[j0:j1 + 1, i0:i1 + 1] |= _in_tooth(X, Y, float(t.left), float(t.right), r)
    if params.include_limit_point:
        i, j = g.nearest_index(1.5, 0.0)
        if g.contains_index(i, j):
            mask[j, i] = True
    return BinaryRaster(g, mask)


def build_c1d_raster(params: ConstructionParams, geometry: GridGeometry, *,
                     allow_partial: bool = False) -> BinaryRaster:
    """Rasterize the one-dimensional set: a single row of cells on ``y = 0``."""
    _validate(params, geometry, allow_partial)
    g = geometry
    mask = np.zeros(g.shape, np.bool_)
    _, j = g.nearest_index(0.0, 0.0)
    if 0 <= j < g.ny:
        xs = g.xs()
        row = np.zeros(g.nx, np.bool_)
        for n in range(params.N + 1):
            lo, hi = interval_B(n)
            row |= (xs >= float(lo)) & (xs <= float(hi))
        row |= xs == 1.5
        mask[j] = row
    return BinaryRaster(g, mask)
