import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rhull.construction import ConstructionParams, build_raster  # noqa: E402
from rhull.grid import BinaryRaster, GridGeometry  # noqa: E402

DEFAULT_BBOX = (-0.6, 2.1, -0.7, 0.1)


def raster(mask, h=1.0, x0=0.0, y0=0.0):
    mask = np.asarray(mask, dtype=bool)
    ny, nx = mask.shape
    return BinaryRaster(GridGeometry(x0, y0, h, nx, ny), mask)


def random_mask(rng, ny, nx=None, density=None):
    nx = ny if nx is None else nx
    p = rng.uniform(0.02, 0.5) if density is None else density
    return rng.random((ny, nx)) < p


def random_blob(rng, n):
    """Union-of-gaussians level set: smooth, mostly simply connected shapes."""
    yy, xx = np.mgrid[0:n, 0:n]
    f = np.zeros((n, n))
    for _ in range(rng.integers(2, 7)):
        cx, cy = rng.uniform(0.25 * n, 0.75 * n, 2)
        s = rng.uniform(2, n / 8)
        f += np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))
    return f > rng.uniform(0.3, 0.7)


def disk_mask(n, radius, cx=None, cy=None):
    cx = (n - 1) / 2 if cx is None else cx
    cy = (n - 1) / 2 if cy is None else cy
    yy, xx = np.mgrid[0:n, 0:n]
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def T6():
    """The toothed set with N=6, r=1/2 at h=2^-12 on the canonical bbox."""
    g = GridGeometry.from_bbox(*DEFAULT_BBOX, 2.0 ** -12)
    return build_raster(ConstructionParams(0.5, 6, True), g)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.summary_line(n))
