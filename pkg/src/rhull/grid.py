"""Raster representation of planar sets and the exact kernels that act on it.

A raster samples a set at cell centers: cell ``(i, j)`` sits at world point
``(x0 + i*h, y0 + j*h)`` and is foreground iff that point belongs to the set.
Masks are stored as ``(ny, nx)`` boolean arrays, row ``j`` first.

Distances are computed in cell units with integer arithmetic and converted to
world units only at the API boundary.  Everything off the grid is background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import _kernels as K


class InsufficientPadding(ValueError):
    """Foreground comes closer to the grid border than an operation allows."""

    def __init__(self, required: int, available: int, h: float):
        self.required = required
        self.available = available
        super().__init__(
            f"foreground is {available} cells from the grid border but "
            f"{required} cells ({required * h:g} world units) are required"
        )


@dataclass(frozen=True)
class GridGeometry:
    x0: float
    y0: float
    h: float
    nx: int
    ny: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"cell spacing must be positive, got {self.h}")
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid needs at least one cell per axis, got {self.nx}x{self.ny}")

    @classmethod
    def from_bbox(cls, xmin, xmax, ymin, ymax, h) -> "GridGeometry":
        """Smallest grid whose cell centers are integer multiples of ``h``
        and cover ``[xmin, xmax] x [ymin, ymax]``.

        Snapping to multiples of ``h`` puts the axes (and every dyadic point
        coarser than ``h``) exactly on cell centers.
        """
        h = float(h)
        hf = Fraction(h)
        i0 = math.floor(Fraction(xmin) / hf)
        i1 = math.ceil(Fraction(xmax) / hf)
        j0 = math.floor(Fraction(ymin) / hf)
        j1 = math.ceil(Fraction(ymax) / hf)
        if i1 < i0 or j1 < j0:
            raise ValueError("empty bounding box")
        return cls(i0 * h, j0 * h, h, i1 - i0 + 1, j1 - j0 + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        """World extent of the cell centers as (xmin, xmax, ymin, ymax)."""
        return (self.x0, self.x0 + (self.nx - 1) * self.h,
                self.y0, self.y0 + (self.ny - 1) * self.h)

    def xs(self) -> np.ndarray:
        return self.x0 + np.arange(self.nx) * self.h

    def ys(self) -> np.ndarray:
        return self.y0 + np.arange(self.ny) * self.h

    def world(self, i, j):
        return (self.x0 + i * self.h, self.y0 + j * self.h)

    def nearest_index(self, x, y) -> tuple[int, int]:
        """Index of the cell whose center is closest to ``(x, y)`` (may be off-grid)."""
        return (round((x - self.x0) / self.h), round((y - self.y0) / self.h))

    def contains_index(self, i, j) -> bool:
        return 0 <= i < self.nx and 0 <= j < self.ny

    def shifted(self, di: int, dj: int, nx: int, ny: int) -> "GridGeometry":
        """Same lattice, origin moved by ``(di, dj)`` cells."""
        return GridGeometry(self.x0 + di * self.h, self.y0 + dj * self.h, self.h, nx, ny)

    def to_dict(self) -> dict:
        return {"x0": self.x0, "y0": self.y0, "h": self.h, "nx": self.nx, "ny": self.ny}

    @classmethod
    def from_dict(cls, d: dict) -> "GridGeometry":
        return cls(float(d["x0"]), float(d["y0"]), float(d["h"]), int(d["nx"]), int(d["ny"]))


def _frozen(mask: np.ndarray, dtype) -> np.ndarray:
    arr = np.ascontiguousarray(mask, dtype=dtype)
    if arr is mask and arr.flags.writeable:
        arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class BinaryRaster:
    geometry: GridGeometry
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        mask = np.asarray(self.mask)
        if mask.shape != self.geometry.shape:
            raise ValueError(f"mask shape {mask.shape} does not match grid {self.geometry.shape}")
        object.__setattr__(self, "mask", _frozen(mask, np.bool_))

    @classmethod
    def empty(cls, geometry: GridGeometry) -> "BinaryRaster":
        return cls(geometry, np.zeros(geometry.shape, np.bool_))

    def __eq__(self, other):
        if not isinstance(other, BinaryRaster):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.geometry, self.mask.tobytes()))

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    def is_empty(self) -> bool:
        return not self.mask.any()

    def complement(self) -> "BinaryRaster":
        return BinaryRaster(self.geometry, ~self.mask)

    def union(self, other: "BinaryRaster") -> "BinaryRaster":
        _same_geometry(self, other)
        return BinaryRaster(self.geometry, self.mask | other.mask)

    def intersection(self, other: "BinaryRaster") -> "BinaryRaster":
        _same_geometry(self, other)
        return BinaryRaster(self.geometry, self.mask & other.mask)

    def issubset(self, other: "BinaryRaster") -> bool:
        _same_geometry(self, other)
        return not (self.mask & ~other.mask).any()

    def foreground_bounds(self):
        """``(i0, i1, j0, j1)`` inclusive index bounds of the foreground, or None."""
        cols = np.flatnonzero(self.mask.any(axis=0))
        if cols.size == 0:
            return None
        rows = np.flatnonzero(self.mask.any(axis=1))
        return int(cols[0]), int(cols[-1]), int(rows[0]), int(rows[-1])

    def window(self, i0: int, i1: int, j0: int, j1: int) -> "BinaryRaster":
        """Re-sample onto the index box ``[i0, i1] x [j0, j1]`` of the same lattice.

        The box may extend past the grid; new cells are background.
        """
        g = self.geometry
        out = np.zeros((j1 - j0 + 1, i1 - i0 + 1), np.bool_)
        si0, si1 = max(i0, 0), min(i1, g.nx - 1)
        sj0, sj1 = max(j0, 0), min(j1, g.ny - 1)
        if si0 <= si1 and sj0 <= sj1:
            out[sj0 - j0:sj1 - j0 + 1, si0 - i0:si1 - i0 + 1] = \
                self.mask[sj0:sj1 + 1, si0:si1 + 1]
        return BinaryRaster(g.shifted(i0, j0, i1 - i0 + 1, j1 - j0 + 1), out)

    def paste_into(self, geometry: GridGeometry) -> "BinaryRaster":
        """Re-sample onto another geometry of the same lattice (cropping or padding)."""
        di = round((geometry.x0 - self.geometry.x0) / self.geometry.h)
        dj = round((geometry.y0 - self.geometry.y0) / self.geometry.h)
        return self.window(di, di + geometry.nx - 1, dj, dj + geometry.ny - 1).with_geometry(geometry)

    def with_geometry(self, geometry: GridGeometry) -> "BinaryRaster":
        return BinaryRaster(geometry, self.mask)


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Exact squared distances to the nearest foreground cell center.

    ``d2_cells`` holds integers in cell units; ``NO_FOREGROUND`` marks every
    cell when the source raster was empty.
    """

    geometry: GridGeometry
    d2_cells: np.ndarray = field(repr=False)

    NO_FOREGROUND = -1

    def __post_init__(self):
        object.__setattr__(self, "d2_cells", _frozen(self.d2_cells, np.int64))

    @property
    def empty_source(self) -> bool:
        return bool(self.d2_cells.size) and self.d2_cells.flat[0] == self.NO_FOREGROUND

    @property
    def d2(self) -> np.ndarray:
        """Squared distances in world units squared (``inf`` when no foreground)."""
        out = self.d2_cells.astype(np.float64) * (self.geometry.h ** 2)
        out[self.d2_cells == self.NO_FOREGROUND] = np.inf
        return out

    def distance(self) -> np.ndarray:
        return np.sqrt(self.d2)


@dataclass(frozen=True, eq=False)
class LabelField:
    geometry: GridGeometry
    label: np.ndarray = field(repr=False)
    count: int

    def __post_init__(self):
        object.__setattr__(self, "label", _frozen(self.label, np.int32))

    def sizes(self) -> np.ndarray:
        """Cell count of each component, indexed by label - 1."""
        return np.bincount(self.label.ravel(), minlength=self.count + 1)[1:]


def _same_geometry(a: BinaryRaster, b: BinaryRaster):
    if a.geometry != b.geometry:
        raise ValueError(f"geometry mismatch: {a.geometry} vs {b.geometry}")


def squared_cells(length, h) -> int:
    """floor((length / h)^2) computed exactly.

    For an integer squared distance ``d2`` in cell units,
    ``d2 <= squared_cells(L, h)`` iff ``sqrt(d2) * h <= L``.
    """
    q = Fraction(length) / Fraction(h)
    return math.floor(q * q)


def _runs(raster: BinaryRaster, invert: bool = False):
    return K.column_runs(raster.mask, invert)


def rasterize(predicate: Callable, geometry: GridGeometry, *, vectorized: bool = True,
              rows_per_chunk: int = 256) -> BinaryRaster:
    """Sample ``predicate`` at every cell center.

    With ``vectorized`` the predicate receives coordinate arrays ``(x, y)`` and
    must return a boolean array of the same shape; otherwise it is called once
    per point.
    """
    xs = geometry.xs()
    ys = geometry.ys()
    mask = np.zeros(geometry.shape, np.bool_)
    if not vectorized:
        for j, y in enumerate(ys):
            mask[j] = [bool(predicate(float(x), float(y))) for x in xs]
        return BinaryRaster(geometry, mask)
    for j0 in range(0, geometry.ny, rows_per_chunk):
        j1 = min(j0 + rows_per_chunk, geometry.ny)
        X, Y = np.meshgrid(xs, ys[j0:j1])
        mask[j0:j1] = np.asarray(predicate(X, Y), dtype=np.bool_)
    return BinaryRaster(geometry, mask)


def edt(raster: BinaryRaster) -> DistanceField:
    """Exact squared Euclidean distance transform.

    Two separable passes: vertical gaps per column, then the lower envelope of
    parabolas per row.  Linear in the number of cells.
    """
    g = raster.geometry
    d2 = K.edt_sq(*_runs(raster), g.ny, g.nx)
    return DistanceField(g, d2)


def _check_radius(rho):
    if rho < 0:
        raise ValueError(f"radius must be non-negative, got {rho}")


def dilate(raster: BinaryRaster, rho) -> BinaryRaster:
    """Cells within closed distance ``rho`` of the foreground."""
    _check_radius(rho)
    g = raster.geometry
    r2 = squared_cells(rho, g.h)
    if r2 == 0:
        return raster
    return BinaryRaster(g, K.dilate_sq(*_runs(raster), g.ny, g.nx, r2))


def erode(raster: BinaryRaster, rho) -> BinaryRaster:
    """complement(dilate(complement(raster), rho))."""
    _check_radius(rho)
    g = raster.geometry
    r2 = squared_cells(rho, g.h)
    if r2 == 0:
        return raster
    # dilate the background straight from the inverted runs
    return BinaryRaster(g, ~K.dilate_sq(*_runs(raster, invert=True), g.ny, g.nx, r2))


def connected_components(raster: BinaryRaster) -> LabelField:
    """8-connected foreground components, numbered in row-major first-visit order."""
    labels, count = K.label8(raster.mask)
    return LabelField(raster.geometry, labels, int(count))


def directed_hausdorff_sq(a: BinaryRaster, b: BinaryRaster) -> int:
    """max over foreground of ``a`` of the squared cell distance to ``b``.

    -1 if ``a`` is empty, ``HAUSDORFF_INF_SQ`` if only ``b`` is.
    """
    _same_geometry(a, b)
    return int(K.directed_max_sq(a.mask, *_runs(b)))


HAUSDORFF_INF_SQ = int(K.INF)


def hausdorff(a: BinaryRaster, b: BinaryRaster) -> float:
    """Hausdorff distance between two rasters in world units.

    ``inf`` when exactly one of them is empty, 0 when both are.
    """
    _same_geometry(a, b)
    ea, eb = a.is_empty(), b.is_empty()
    if ea and eb:
        return 0.0
    if ea or eb:
        return math.inf
    d2 = max(directed_hausdorff_sq(a, b), directed_hausdorff_sq(b, a))
    return math.sqrt(d2) * a.geometry.h


def restrict_to_ball(raster: BinaryRaster, center, rho, open: bool = True) -> BinaryRaster:
    """Keep foreground whose center is within ``rho`` of ``center``."""
    if not rho > 0:
        raise ValueError(f"ball radius must be positive, got {rho}")
    g = raster.geometry
    dx2 = (g.xs() - center[0]) ** 2
    dy2 = (g.ys() - center[1]) ** 2
    r2 = float(rho) ** 2
    mask = raster.mask.copy()
    for j in np.flatnonzero(mask.any(axis=1)):
        d2 = dy2[j] + dx2
        mask[j] &= (d2 < r2) if open else (d2 <= r2)
    return BinaryRaster(g, mask)


def border_margin(raster: BinaryRaster):
    """Smallest number of background cells between the foreground and the border.

    ``None`` for an empty raster.  A margin of ``m`` means no foreground in the
    outermost ``m`` rows and columns.
    """
    b = raster.foreground_bounds()
    if b is None:
        return None
    i0, i1, j0, j1 = b
    g = raster.geometry
    return min(i0, g.nx - 1 - i1, j0, g.ny - 1 - j1)


def check_padding(raster: BinaryRaster, rho) -> int:
    """Raise ``InsufficientPadding`` unless every foreground cell is more than
    ``rho`` from the off-grid region.  Returns the available margin in cells.
    """
    g = raster.geometry
    need = math.isqrt(squared_cells(rho, g.h)) + 1
    have = border_margin(raster)
    if have is None:
        return min(g.nx, g.ny)
    if have < need:
        raise InsufficientPadding(need, have, g.h)
    return have
