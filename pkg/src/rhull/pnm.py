"""Binary PGM (P5) export with a JSON geometry sidecar.

Foreground is written as 255 and background as 0, top row first (the row of
largest ``y``).  The sidecar lives next to the image with a ``.json`` suffix
and carries the grid geometry plus any extra metadata the caller supplies.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import BinaryRaster, GridGeometry


class RasterFormatError(ValueError):
    pass


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_pgm(path, raster: BinaryRaster, meta: dict | None = None) -> Path:
    path = Path(path)
    g = raster.geometry
    header = f"P5\n{g.nx} {g.ny}\n255\n".encode("ascii")
    body = np.where(raster.mask[::-1], 255, 0).astype(np.uint8).tobytes()
    path.write_bytes(header + body)
    side = {"geometry": g.to_dict()}
    if meta:
        side.update(meta)
    sidecar_path(path).write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return path


def _header(data: bytes):
    """Parse the three header tokens, skipping comments; return (tokens, offset)."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise RasterFormatError("truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path) -> tuple[BinaryRaster, dict]:
    path = Path(path)
    data = path.read_bytes()
    tokens, offset = _header(data)
    if tokens[0] != b"P5":
        raise RasterFormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        nx, ny, maxval = (int(t) for t in tokens[1:4])
    except ValueError as e:
        raise RasterFormatError(f"{path}: bad PGM header") from e
    if maxval != 255:
        raise RasterFormatError(f"{path}: expected maxval 255, got {maxval}")
    pixels = np.frombuffer(data, np.uint8, count=nx * ny, offset=offset) \
        if len(data) - offset >= nx * ny else None
    if pixels is None:
        raise RasterFormatError(f"{path}: raster data truncated")
    side_file = sidecar_path(path)
    if not side_file.exists():
        raise RasterFormatError(f"{path}: missing geometry sidecar {side_file.name}")
    side = json.loads(side_file.read_text())
    geometry = GridGeometry.from_dict(side["geometry"])
    if (geometry.nx, geometry.ny) != (nx, ny):
        raise RasterFormatError(
            f"{path}: image is {nx}x{ny} but sidecar says {geometry.nx}x{geometry.ny}")
    mask = pixels.reshape(ny, nx)[::-1] >= 128
    return BinaryRaster(geometry, mask), side
