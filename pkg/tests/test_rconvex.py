import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import disk_mask, random_blob, random_mask, raster
from oracles import brute_hull
from rhull.grid import (GridGeometry, InsufficientPadding, directed_hausdorff_sq,
                        rasterize, squared_cells)
from rhull.rconvex import (interior_cells, is_r_convex, local_connectivity_probe,
                           rconvex_hull_closing, rconvex_hull_sweep, reach_probe,
                           regularity_check)

masks = arrays(np.bool_, st.tuples(st.integers(1, 12), st.integers(1, 12)))


# hulls against the definition ---------------------------------------------------

def test_hulls_match_brute_force(rng):
    for k in range(40):
        n = int(rng.integers(4, 22))
        m = random_mask(rng, n, density=rng.uniform(0.02, 0.25))
        rho = float(rng.uniform(0.8, 7))
        want = brute_hull(m, squared_cells(rho, 1.0))
        assert np.array_equal(rconvex_hull_closing(raster(m), rho).mask, want)
        assert np.array_equal(rconvex_hull_sweep(raster(m), rho).mask, want)


@given(masks, st.floats(0.5, 6))
@settings(max_examples=120, deadline=None)
def test_hulls_match_brute_force_any_shape(m, rho):
    want = brute_hull(m, squared_cells(rho, 1.0))
    assert np.array_equal(rconvex_hull_closing(raster(m), rho).mask, want)
    assert np.array_equal(rconvex_hull_sweep(raster(m), rho).mask, want)


def test_hull_ignores_the_grid_border():
    # two blocks on the bottom row with a 2-cell gap; balls centered below the
    # grid carve the bottom gap row exactly like balls above carve the top one
    m = np.zeros((8, 16), bool)
    m[0:6, 1:7] = m[0:6, 9:15] = True
    out = rconvex_hull_closing(raster(m), 10.0)
    # a radius-10 ball dips 0.11 cells into a 3-cell chord
    assert out.mask[1:5, 7:9].all()
    assert not out.mask[[0, 5], 7:9].any()
    assert np.array_equal(out.mask, brute_hull(m, 100))


def test_strict_padding_rejects():
    m = np.zeros((6, 6), bool)
    m[0, 0] = True
    for f in (rconvex_hull_closing, rconvex_hull_sweep):
        with pytest.raises(InsufficientPadding):
            f(raster(m), 2.0, strict_padding=True)


def test_hull_empty_and_bad_radius():
    e = raster(np.zeros((5, 5)))
    assert rconvex_hull_closing(e, 2.0).is_empty()
    assert rconvex_hull_sweep(e, 2.0).is_empty()
    with pytest.raises(ValueError):
        rconvex_hull_closing(e, 0)


def test_single_cell_is_fixed():
    m = np.zeros((7, 7), bool)
    m[3, 3] = True
    assert rconvex_hull_closing(raster(m), 10.0) == raster(m)


def test_finite_point_sets_are_fixed():
    # open balls squeeze between isolated points, however close
    m = np.zeros((5, 21), bool)
    m[2, 3] = m[2, 5] = m[2, 18] = True
    assert rconvex_hull_closing(raster(m), 10.0) == raster(m)


def test_narrow_gap_fills():
    m = np.zeros((20, 30), bool)
    m[5:15, 4:13] = m[5:15, 15:26] = True
    out = rconvex_hull_closing(raster(m), 10.0)
    assert out.mask[6:14, 13:15].all()
    assert not out.mask[[5, 14], 13:15].any()
    assert np.array_equal(out.mask, brute_hull(m, 100))


def test_disk_is_a_fixed_point():
    for rad in (4, 9.5, 15):
        m = disk_mask(41, rad)
        for r in (rad, 2 * rad, 100.0):
            assert rconvex_hull_closing(raster(m), r).mask.tolist() == m.tolist()


def test_square_fixed_at_any_radius():
    m = np.zeros((30, 30), bool)
    m[5:25, 8:20] = True
    for r in (1.5, 6.0, 40.0):
        assert rconvex_hull_closing(raster(m), r) == raster(m)


# hull laws ----------------------------------------------------------------------

@given(masks, st.floats(0.5, 6))
@settings(max_examples=80, deadline=None)
def test_hull_extensive_and_idempotent(m, rho):
    S = raster(m)
    H = rconvex_hull_closing(S, rho)
    assert S.issubset(H)
    assert rconvex_hull_closing(H, rho) == H


@given(masks, st.floats(0.5, 6))
@settings(max_examples=60, deadline=None)
def test_hull_monotone_in_set(m, rho):
    S = raster(m)
    T = S.union(raster(np.random.default_rng(m.size).random(m.shape) < 0.2))
    assert rconvex_hull_closing(S, rho).issubset(rconvex_hull_closing(T, rho))


def test_hull_radius_law_on_smooth_shapes(rng):
    """Larger radius gives a larger hull, up to one diagonal step on the lattice."""
    for _ in range(30):
        S = raster(random_blob(rng, 48))
        small = rconvex_hull_closing(S, 3.0)
        big = rconvex_hull_closing(S, 12.0)
        assert directed_hausdorff_sq(small, big) <= 2


def test_hull_scale_consistency():
    # the same shape at h and h/2 gives hulls within a cell of each other
    def shape(x, y):
        return ((x - 0.3) ** 2 + y ** 2 <= 0.04) | ((x + 0.3) ** 2 + y ** 2 <= 0.04)

    coarse = rasterize(shape, GridGeometry.from_bbox(-1, 1, -0.5, 0.5, 2 ** -6))
    fine = rasterize(shape, GridGeometry.from_bbox(-1, 1, -0.5, 0.5, 2 ** -7))
    a = rconvex_hull_closing(coarse, 0.5).count * coarse.geometry.h ** 2
    b = rconvex_hull_closing(fine, 0.5).count * fine.geometry.h ** 2
    # two disks of radius 0.2 bridged by a lens-waisted neck
    assert abs(a - b) / b < 0.05
    assert b > 2 * math.pi * 0.04


# r-convexity verdict ------------------------------------------------------------

def test_disk_is_r_convex():
    S = raster(disk_mask(41, 12), h=0.05)
    v = is_r_convex(S, 1.0)
    assert v.is_r_convex and v.hausdorff_defect == 0.0
    assert v.tolerance == pytest.approx(0.1)


def test_two_disks_with_gap_are_not():
    m = disk_mask(60, 10, cx=15, cy=30) | disk_mask(60, 10, cx=44, cy=30)  # 9h gap edge to edge
    S = raster(m)
    v = is_r_convex(S, 20.0)
    assert not v.is_r_convex
    assert v.hausdorff_defect > 2.0


def test_is_r_convex_rejects_empty():
    with pytest.raises(ValueError):
        is_r_convex(raster(np.zeros((3, 3))), 1.0)
    with pytest.raises(ValueError):
        is_r_convex(raster(np.ones((3, 3))), 1.0, tol=-1)


# regularity -------------------------------------------------------------------

def test_interior_cells():
    m = np.zeros((5, 5), bool)
    m[1:4, 1:4] = True
    inner = interior_cells(raster(m))
    assert inner.sum() == 1 and inner[2, 2]


def test_regularity_square_passes():
    m = np.zeros((20, 20), bool)
    m[4:16, 3:17] = True
    assert len(regularity_check(raster(m))) == 0


def test_regularity_flags_whiskers():
    m = np.zeros((20, 30), bool)
    m[4:16, 3:12] = True
    m[10, 12:25] = True  # a one-cell-thick whisker
    m[2, 27] = True      # an isolated cell
    bad = regularity_check(raster(m))
    got = {tuple(p) for p in bad.tolist()}
    assert (27, 2) in got
    # whisker cells more than 2 cells from the block's interior
    assert {(i, 10) for i in range(15, 25)} <= got
    assert (12, 10) not in got
    assert all(m[j, i] for i, j in got)


# reach ----------------------------------------------------------------------------

def test_reach_silent_on_disk():
    S = raster(disk_mask(61, 12))
    est = reach_probe(S, [3, 5, 8, 12, 16])
    assert est.first_multivalued is None and est.witness is None


def test_reach_silent_inside_a_large_hole():
    # probes inside a big carved disk see a shallow digital staircase whose
    # near-nearest cells are more than 4 cells apart; it is still one arc
    yy, xx = np.mgrid[0:260, 0:420]
    S = raster((xx - 210) ** 2 + (yy - 320) ** 2 > 300 ** 2)
    est = reach_probe(S, [5, 10, 20, 32, 40])
    assert est.first_multivalued is None


def test_reach_two_cells():
    m = np.zeros((21, 31), bool)
    m[10, 10] = m[10, 20] = True
    # the band at d spans [d - h, d + h], so d = 4 already sees the midpoint at 5
    est = reach_probe(raster(m), [3.0, 4.0, 5.0, 6.0])
    assert est.first_multivalued == 4.0
    assert est.witness == (15.0, 10.0)
    assert est.reason == "components"


def test_reach_concave_arc_uses_separation():
    # a single connected C-shape: the mouth's center sees two far-apart arcs
    yy, xx = np.mgrid[0:81, 0:81]
    rr = np.hypot(xx - 40, yy - 40)
    m = (np.abs(rr - 25) <= 1.5) & (xx < 58)
    est = reach_probe(raster(m), [4.0, 10.0, 20.0, 26.0])
    assert est.first_multivalued == 20.0 or est.first_multivalued == 26.0
    assert est.reason == "separation"


def test_reach_validation():
    S = raster(disk_mask(11, 3))
    with pytest.raises(ValueError):
        reach_probe(S, [4, 3])
    with pytest.raises(ValueError):
        reach_probe(S, [2.0])
    with pytest.raises(ValueError):
        reach_probe(raster(np.zeros((4, 4))), [3])


# local connectivity -------------------------------------------------------------

def test_connectivity_disk_and_two_cells():
    S = raster(disk_mask(41, 10))
    prof = local_connectivity_probe(S, (20.0, 20.0), [15, 8, 3])
    assert prof.counts == (1, 1, 1)
    m = np.zeros((11, 21), bool)
    m[5, 5] = m[5, 15] = True
    prof = local_connectivity_probe(raster(m), (10.0, 5.0), [8, 6, 4])
    assert prof.counts == (2, 2, 0)


def test_connectivity_off_grid_center():
    S = raster(disk_mask(11, 3))
    assert local_connectivity_probe(S, (500.0, 500.0), [5]).counts == (0,)


def test_connectivity_validation():
    S = raster(disk_mask(11, 3))
    with pytest.raises(ValueError):
        local_connectivity_probe(S, (5, 5), [3, 4])
    with pytest.raises(ValueError):
        local_connectivity_probe(S, (5, 5), [1.5])
