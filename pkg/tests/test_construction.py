import math
from fractions import Fraction

import numpy as np
import pytest

from rhull.construction import (ConstructionParams, IntervalTable, accumulation_point,
                                build_c1d_raster, build_raster, interval_A, interval_B,
                                max_cell_size, member_C1d, member_T, seq_a, set_bbox,
                                tooth, tooth_index)
from rhull.grid import GridGeometry, connected_components, edt

P = ConstructionParams()
F = Fraction


# intervals ------------------------------------------------------------------------

def test_sequence_values():
    assert [seq_a(n) for n in (1, 2, 3)] == [F(1, 2), F(1, 4), F(1, 8)]
    with pytest.raises(ValueError):
        seq_a(0)


def test_first_intervals():
    assert interval_B(0) == (F(0), F(1, 2))
    assert interval_A(1) == (F(1, 2), F(3, 4))
    assert interval_B(1) == (F(3, 4), F(1))
    assert interval_A(2) == (F(1), F(9, 8))
    assert interval_B(2) == (F(9, 8), F(5, 4))
    with pytest.raises(ValueError):
        interval_A(0)
    with pytest.raises(ValueError):
        interval_B(-1)


def test_closed_form_matches_partial_sums():
    # lay the pieces end to end: B_0, then A_n (length a_n / 2) and B_n (length a_n / 2)
    x = F(1, 2)
    for n in range(1, 40):
        a = seq_a(n) / 2
        assert interval_A(n) == (x, x + a)
        assert interval_B(n) == (x + a, x + 2 * a)
        x += 2 * a
    assert F(3, 2) - x == F(1, 2 ** 39)


def test_intervals_tile_and_accumulate():
    ivs = [interval_B(0)]
    for n in range(1, 30):
        ivs += [interval_A(n), interval_B(n)]
    for (a0, a1), (b0, b1) in zip(ivs, ivs[1:]):
        assert a1 == b0 and a0 < a1
    total = sum(hi - lo for lo, hi in ivs)
    assert total == ivs[-1][1]
    assert accumulation_point() == (F(3, 2), F(0))
    assert F(3, 2) - ivs[-1][1] == F(1, 2 ** 29)


def test_interval_table_json_round_trip():
    t = IntervalTable.build(9)
    back = IntervalTable.from_json(t.to_json())
    assert back == t
    assert len(back.A) == 9 and len(back.B) == 10


# teeth ----------------------------------------------------------------------------

def test_tooth_bottoms():
    assert tooth(0, P).bottom == pytest.approx(-0.5 + math.sqrt(3) / 4)
    assert tooth(3, P).bottom == pytest.approx(-0.000977, abs=1e-6)
    assert tooth(3, P).width == F(1, 16)
    # shallower and shallower
    bottoms = [tooth(n, P).bottom for n in range(8)]
    assert all(a < b < 0 for a, b in zip(bottoms, bottoms[1:]))


def test_params_validation():
    with pytest.raises(ValueError):
        ConstructionParams(r=0.25)
    with pytest.raises(ValueError):
        ConstructionParams(N=-1)
    with pytest.raises(ValueError):
        ConstructionParams(N=2.5)


def test_member_T_examples():
    assert member_T((0.25, -0.01), P)
    assert not member_T((0.25, 0.01), P)
    assert member_T((0.0, 0.0), P)          # cusp corner
    assert not member_T((0.6, 0.0), P)      # above A_1
    assert member_T((0.875, 0.0), P)
    assert member_T((1.5, 0.0), P)
    assert not member_T((1.5, 0.0), ConstructionParams(include_limit_point=False))
    assert not member_T((0.25, tooth(0, P).bottom - 1e-9), P)
    assert tooth_index((F(9, 8), F(0)), P) == 2
    # beyond N the gap intervals hold nothing
    assert not member_T((float(interval_B(7)[0]), 0.0), P)


def test_member_C1d_examples():
    assert member_C1d((0.8, 0.0), P)
    assert member_C1d((1.5, 0.0), P)
    assert not member_C1d((0.6, 0.0), P)
    assert not member_C1d((0.8, 0.1), P)
    assert member_C1d((F(1, 2), F(0)), P)


def test_teeth_are_symmetric():
    for n in range(5):
        lo, hi = interval_B(n)
        mid = (lo + hi) / 2
        for dx in (F(1, 7) * (hi - lo) / 2, (hi - lo) / 3):
            for y in (F(-1, 1000), F(-1, 100000), F(0)):
                assert member_T((mid - dx, y), P) == member_T((mid + dx, y), P)


# rasters ----------------------------------------------------------------------------

def _grid(params, h, pad=0.05):
    x0, x1, y0, y1 = set_bbox(params)
    return GridGeometry.from_bbox(x0 - pad, x1 + pad, y0 - pad, y1 + pad, h)


def test_tooth_zero_area():
    p = ConstructionParams(N=0, include_limit_point=False)
    # the closed top edge sits on a row of centers, which biases the count by
    # about half a row; at 2^-12 that is well under the tolerance
    g = _grid(p, 2.0 ** -12)
    S = build_raster(p, g)
    x = np.linspace(0, 0.25, 200001)
    area = 2 * np.trapezoid(0.5 - np.sqrt(0.25 - x * x), x)
    assert abs(S.count * g.h ** 2 - area) / area < 0.02


def test_t6_components(T6):
    assert connected_components(T6).count == 8
    p = ConstructionParams(include_limit_point=False)
    assert connected_components(build_raster(p, T6.geometry)).count == 7


def test_build_rejects_bad_geometry():
    with pytest.raises(ValueError, match="too coarse"):
        build_raster(P, _grid(P, 2.0 ** -9))
    with pytest.raises(ValueError, match="cover"):
        build_raster(P, GridGeometry.from_bbox(1.0, 1.6, -0.01, 0.01, 2.0 ** -12))
    off = GridGeometry(-0.1, -0.2 + 2.0 ** -13, 2.0 ** -12, 8000, 900)
    with pytest.raises(ValueError, match="y = 0"):
        build_raster(P, off)
    with pytest.raises(ValueError, match="overlap"):
        build_raster(P, GridGeometry.from_bbox(3, 4, 3, 4, 2.0 ** -12), allow_partial=True)


def test_partial_build_matches_full(T6):
    g = GridGeometry.from_bbox(1.2, 1.6, -0.02, 0.01, T6.geometry.h)
    part = build_raster(P, g, allow_partial=True)
    assert part == T6.paste_into(g)


def test_raster_matches_membership(T6):
    g = T6.geometry
    rng = np.random.default_rng(7)
    for _ in range(3000):
        i = int(rng.integers(0, g.nx))
        j = int(rng.integers(g.ny - 300, g.ny))  # the interesting band near y = 0
        x, y = g.world(i, j)
        assert T6.mask[j, i] == member_T((x, y), P)


def test_raster_containment(T6):
    g = T6.geometry
    i0, i1, j0, j1 = T6.foreground_bounds()
    xmin, ymin = g.world(i0, j0)
    xmax, ymax = g.world(i1, j1)
    assert (xmin, xmax, ymax) == (0.0, 1.5, 0.0)
    assert ymin >= tooth(0, P).bottom


def test_distance_law_above_the_axis():
    """Above B_n the distance to the set is the height; above A_n it is the
    distance to the nearer tooth corner."""
    p = ConstructionParams(N=3, include_limit_point=False)
    g = _grid(p, 2.0 ** -10, pad=0.2)
    S = build_raster(p, g)
    d = edt(S).distance()
    corners = [c for n in range(p.N + 1) for c in interval_B(n)]
    cx = np.array([float(c) for c in corners])
    rng = np.random.default_rng(3)
    for _ in range(500):
        x = float(rng.uniform(0, float(interval_B(p.N)[1])))
        y = float(rng.uniform(0, 0.15))
        i, j = g.nearest_index(x, y)
        x, y = g.world(i, j)
        if any(lo <= x <= hi for lo, hi in (interval_B(n) for n in range(p.N + 1))):
            want = y
        else:
            want = float(np.min(np.hypot(cx - x, y)))
        assert abs(d[j, i] - want) <= 2 * g.h


def test_c1d_raster():
    p = ConstructionParams(N=4)
    g = _grid(p, max_cell_size(p))
    C = build_c1d_raster(p, g)
    rows = np.flatnonzero(C.mask.any(axis=1))
    assert len(rows) == 1 and g.world(0, rows[0])[1] == 0.0
    xs = g.xs()
    for i in np.flatnonzero(C.mask[rows[0]]):
        assert member_C1d((F(xs[i]), F(0)), p)
    # each B_n is a solid run; the limit cell is isolated
    assert connected_components(C).count == p.N + 2
