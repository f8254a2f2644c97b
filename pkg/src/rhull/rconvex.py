"""r-convex hulls of rasters and the probes built on them.

The r-convex hull of ``S`` is what is left of the plane after removing every
open ball of radius ``r`` that misses ``S``.  On a grid, with closed balls,
this is the morphological closing of ``S`` by a radius-``r`` disk.  Two routes
compute it here and are expected to agree cell for cell:

* ``rconvex_hull_closing``: ``erode(dilate(S, r), r)`` with the interval-reach
  dilation kernel;
* ``rconvex_hull_sweep``: collect the centers of all radius-``r`` balls that
  miss ``S``, sweep a ball over them and keep what is never covered.  Both
  thresholds come from the exact parabola-envelope distance transform.

Both routes work on a private window that extends the input lattice by more
than ``r`` around the foreground, so the result is the same as on an
unbounded grid; it is then cropped back to the input geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .grid import (
    BinaryRaster,
    check_padding,
    connected_components,
    dilate,
    erode,
    hausdorff,
    restrict_to_ball,
    squared_cells,
)


@dataclass(frozen=True)
class RConvexityVerdict:
    r: float
    hausdorff_defect: float
    tolerance: float
    is_r_convex: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ReachEstimate:
    probe_distances: tuple
    first_multivalued: Optional[float]
    witness: Optional[tuple]
    # "components" or "separation": which test flagged the witness
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["probe_distances"] = list(self.probe_distances)
        d["witness"] = None if self.witness is None else list(self.witness)
        return d


@dataclass(frozen=True)
class ConnectivityProfile:
    center: tuple
    radii: tuple
    counts: tuple

    def to_dict(self) -> dict:
        return {"center": list(self.center), "radii": list(self.radii), "counts": list(self.counts)}


def _check_r(r):
    if not r > 0:
        raise ValueError(f"hull radius must be positive, got {r}")


def _padded(S: BinaryRaster, r):
    """Window of ``S`` with more than ``r`` of empty margin on every side."""
    bounds = S.foreground_bounds()
    if bounds is None:
        return None
    m = math.isqrt(squared_cells(r, S.geometry.h)) + 2
    i0, i1, j0, j1 = bounds
    return S.window(i0 - m, i1 + m, j0 - m, j1 + m)


def rconvex_hull_closing(S: BinaryRaster, r, *, strict_padding: bool = False) -> BinaryRaster:
    """Grid r-convex hull as the closing ``erode(dilate(S, r), r)``.

    With ``strict_padding`` an input whose foreground is within ``r`` of the
    border is rejected (``InsufficientPadding``) instead of being padded.
    """
    _check_r(r)
    if strict_padding:
        check_padding(S, r)
    W = _padded(S, r)
    if W is None:
        return S
    return erode(dilate(W, r), r).paste_into(S.geometry)


def rconvex_hull_sweep(S: BinaryRaster, r, *, strict_padding: bool = False) -> BinaryRaster:
    """Grid r-convex hull as the complement of the union of all missing balls."""
    _check_r(r)
    if strict_padding:
        check_padding(S, r)
    W = _padded(S, r)
    if W is None:
        return S
    g = W.geometry
    r2 = squared_cells(r, g.h)
    # centers of closed radius-r balls that miss S
    free = K.edt_threshold(*K.column_runs(W.mask, False), g.ny, g.nx, r2, True)
    swept = K.edt_threshold(*K.column_runs(free, False), g.ny, g.nx, r2, False)
    del free
    return BinaryRaster(g, ~swept).paste_into(S.geometry)


def default_tolerance(S: BinaryRaster) -> float:
    return 2 * S.geometry.h


def is_r_convex(S: BinaryRaster, r, tol=None) -> RConvexityVerdict:
    if S.is_empty():
        raise ValueError("r-convexity of an empty raster is undefined")
    tol = default_tolerance(S) if tol is None else float(tol)
    if tol < 0:
        raise ValueError(f"tolerance must be non-negative, got {tol}")
    hull = rconvex_hull_closing(S, r)
    defect = hausdorff(S, hull)
    return RConvexityVerdict(float(r), defect, tol, defect <= tol)


def interior_cells(S: BinaryRaster) -> np.ndarray:
    """Foreground cells whose 8 neighbours are all foreground."""
    m = S.mask
    inner = np.zeros_like(m)
    if m.shape[0] < 3 or m.shape[1] < 3:
        return inner
    core = m[1:-1, 1:-1].copy()
    for dj in (-1, 0, 1):
        for di in (-1, 0, 1):
            core &= m[1 + dj:m.shape[0] - 1 + dj, 1 + di:m.shape[1] - 1 + di]
    inner[1:-1, 1:-1] = core
    return inner


def regularity_check(S: BinaryRaster, tol=None) -> np.ndarray:
    """Foreground cells farther than ``tol`` from every interior cell.

    Returns an ``(k, 2)`` array of ``(i, j)`` indices in row-major order; empty
    means the raster equals the closure of its interior up to ``tol``.
    """
    tol = default_tolerance(S) if tol is None else float(tol)
    g = S.geometry
    inner = interior_cells(S)
    t2 = squared_cells(tol, g.h)
    far = K.edt_threshold(*K.column_runs(inner, False), g.ny, g.nx, t2, True)
    jj, ii = np.nonzero(S.mask & far)
    return np.stack([ii, jj], axis=1)


def reach_probe(S: BinaryRaster, distances: Sequence[float]) -> ReachEstimate:
    """One-sided detector for non-unique nearest points at given distances.

    For each probe distance ``d`` the background cells whose distance to ``S``
    lies in ``[d - h, d + h]`` are examined; the foreground cells within ``h``
    of their minimum distance must lie in a single component and form a
    single cluster, where cells cluster if they are within ``4h`` of each
    other or joined through foreground no farther than ``dmin + 3h``.  The first distance where that fails is reported.  A hit
    bounds the reach from above; silence certifies nothing.
    """
    if S.is_empty():
        raise ValueError("reach of an empty raster is undefined")
    g = S.geometry
    distances = tuple(float(d) for d in distances)
    if any(b < a for a, b in zip(distances, distances[1:])):
        raise ValueError("probe distances must be ascending")
    if any(d <= 2 * g.h for d in distances):
        raise ValueError("probe distances must exceed 2h")
    d2 = K.edt_sq(*K.column_runs(S.mask, False), g.ny, g.nx)
    labels, _ = K.label8(S.mask)
    for d in distances:
        c = d / g.h
        lo2 = max(c - 1.0, 0.0) ** 2
        hi2 = (c + 1.0) ** 2
        j, i, res = K.scan_band(S.mask, labels, d2, lo2, hi2, 16, 3.0)
        if res:
            return ReachEstimate(distances, d, g.world(int(i), int(j)),
                                 "components" if res == 2 else "separation")
    return ReachEstimate(distances, None, None, None)


def _ball_window(S: BinaryRaster, p, rho) -> BinaryRaster:
    g = S.geometry
    k = math.ceil(rho / g.h) + 1
    ci, cj = g.nearest_index(p[0], p[1])
    # the window may hang off the grid (or miss it entirely); outside is background
    return S.window(ci - k, ci + k, cj - k, cj + k)


def local_connectivity_probe(S: BinaryRaster, p, radii: Sequence[float]) -> ConnectivityProfile:
    """Component counts of ``S`` inside open balls of decreasing radius about ``p``."""
    radii = tuple(float(x) for x in radii)
    if any(b > a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be descending")
    if any(x <= 2 * S.geometry.h for x in radii):
        raise ValueError("radii must exceed 2h")
    counts = []
    for rho in radii:
        local = restrict_to_ball(_ball_window(S, p, rho), p, rho, open=True)
        counts.append(connected_components(local).count)
    return ConnectivityProfile((float(p[0]), float(p[1])), radii, tuple(counts))
