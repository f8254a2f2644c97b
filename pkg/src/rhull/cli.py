"""Command-line front end.

    rhull build  --r 0.5 --N 6 --h 2^-12 --out T6.pgm
    rhull check  --in T6.pgm --checks rconvex,regularity --tol 2h
    rhull hull   --in T6.pgm --r 0.5 --algo both --out hull.pgm
    rhull render --in T6.pgm --out T6.svg --overlay disks

Exit codes: 0 every verdict matched its expectation, 1 some check failed,
2 usage or I/O error.  Reports follow the ``report_v1`` schema and go to
``--report`` (stdout when omitted).
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .construction import (
    ConstructionParams,
    build_c1d_raster,
    build_raster,
)
from .grid import GridGeometry, InsufficientPadding, connected_components, hausdorff
from .pnm import RasterFormatError, read_pgm, write_pgm
from .rconvex import (
    is_r_convex,
    local_connectivity_probe,
    rconvex_hull_closing,
    rconvex_hull_sweep,
    reach_probe,
    regularity_check,
)
from .render import render_svg
from .report import ProbeReport, quantity

DEFAULT_BBOX = (-0.6, 2.1, -0.7, 0.1)
CHECKS = ("rconvex", "regularity", "connectivity", "reach")


class UsageError(Exception):
    pass


_POW = re.compile(r"^\s*(?:([0-9.eE+-/]+)\s*\*\s*)?(\d+)\s*\^\s*([+-]?\d+)\s*$")


def parse_number(text: str) -> Fraction:
    """Exact value of ``0.5``, ``1/4``, ``2^-12`` or ``3*2^-10``."""
    m = _POW.match(text)
    try:
        if m:
            coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            return coef * Fraction(int(m.group(2))) ** int(m.group(3))
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"cannot parse number {text!r}") from e


def parse_length(text: str, h: float | None = None) -> float:
    """Like ``parse_number`` but also accepts multiples of the cell size (``2h``)."""
    t = text.strip()
    if t.endswith("h"):
        if h is None:
            raise UsageError(f"{text!r} is in units of h but no cell size is known")
        coef = parse_number(t[:-1]) if t[:-1] else Fraction(1)
        return float(coef * Fraction(h))
    return float(parse_number(t))


def parse_list(text: str, h=None) -> list[float]:
    return [parse_length(p, h) for p in text.split(",") if p.strip()]


def parse_bbox(text: str) -> tuple:
    vals = parse_list(text)
    if len(vals) != 4:
        raise UsageError("--bbox needs xmin,xmax,ymin,ymax")
    return tuple(vals)


def _params_dict(geometry: GridGeometry, r=None, N=None) -> dict:
    return {"r": None if r is None else float(r), "N": N, "h": geometry.h,
            "bbox": list(geometry.bbox)}


def _emit(report: ProbeReport, args) -> int:
    text = report.to_json(timing=not args.no_timing)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def _params_from_side(side: dict, args, need_r=True):
    c = side.get("construction", {})
    r = args.r if getattr(args, "r", None) is not None else c.get("r")
    N = getattr(args, "N", None)
    N = N if N is not None else c.get("N")
    if need_r and r is None:
        raise UsageError("--r is required (input carries no construction parameters)")
    return r, N, c


def cmd_build(args) -> int:
    h = float(parse_number(args.h))
    bbox = parse_bbox(args.bbox) if args.bbox else DEFAULT_BBOX
    r = float(parse_number(args.r))
    try:
        params = ConstructionParams(r, int(args.N), args.include_limit)
        geometry = GridGeometry.from_bbox(*bbox, h)
    except ValueError as e:
        raise UsageError(str(e)) from e
    report = ProbeReport("build", _params_dict(geometry, r, params.N))
    builder = build_raster if args.set == "T" else build_c1d_raster
    with report.stage("rasterize"):
        try:
            raster = builder(params, geometry, allow_partial=args.partial)
        except ValueError as e:
            raise UsageError(str(e)) from e
    with report.stage("label"):
        labels = connected_components(raster)
    with report.stage("write"):
        write_pgm(args.out, raster, {"construction": {**params.to_dict(), "set": args.set}})
    report.add("teeth", "info", [quantity("teeth", params.N + 1, "count", 0)])
    report.add("components", "info", [
        quantity("components", labels.count, "count", 0),
        quantity("foreground_cells", raster.count, "cells", 0),
    ])
    return _emit(report, args)


def _expectations(items) -> dict:
    out = {}
    for item in items or ():
        name, _, value = item.partition("=")
        if name not in CHECKS or value not in ("pass", "fail"):
            raise UsageError(f"bad --expect {item!r}: use NAME=pass|fail with NAME in {CHECKS}")
        out[name] = value
    return out


def default_probe_distances(h: float) -> list[float]:
    return [2.0 ** -k for k in range(12, 1, -1) if 2.0 ** -k > 2 * h]


def cmd_check(args) -> int:
    raster, side = _load(args.input)
    g = raster.geometry
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    for c in checks:
        if c not in CHECKS:
            raise UsageError(f"unknown check {c!r}; choose from {', '.join(CHECKS)}")
    expect = _expectations(args.expect)
    r, N, _ = _params_from_side(side, args, need_r="rconvex" in checks)
    tol = parse_length(args.tol, g.h)
    report = ProbeReport("check", _params_dict(g, r, N))
    for name in checks:
        with report.stage(name):
            if raster.is_empty() and name in ("rconvex", "reach"):
                report.add(name, "fail", [quantity("foreground_cells", 0, "cells", 0)],
                           expect.get(name, "pass"), {"error": "empty raster"})
                continue
            _CHECKERS[name](raster, args, report, float(r) if r is not None else None,
                            tol, expect.get(name, "pass"))
    return _emit(report, args)


def _check_rconvex(raster, args, report, r, tol, expected):
    v = is_r_convex(raster, r, tol)
    report.add("rconvex", "pass" if v.is_r_convex else "fail", [
        quantity("r", v.r, "world", None),
        quantity("hausdorff_defect", v.hausdorff_defect, "world", v.tolerance),
    ], expected)


def _check_regularity(raster, args, report, r, tol, expected):
    bad = regularity_check(raster, tol)
    n = raster.count
    report.add("regularity", "pass" if len(bad) == 0 else "fail", [
        quantity("interior_distance_limit", tol, "world", None),
        quantity("violating_cells", int(len(bad)), "cells", 0),
        quantity("violating_fraction", len(bad) / n if n else 0.0, "fraction", 0),
    ], expected)


def _check_connectivity(raster, args, report, r, tol, expected):
    g = raster.geometry
    center = parse_list(args.center)
    radii = parse_list(args.radii, g.h)
    prof = local_connectivity_probe(raster, center, radii)
    values = [quantity(f"components_within_{rho:g}", c, "count", 0)
              for rho, c in zip(prof.radii, prof.counts)]
    if args.expect_counts:
        want = [int(x) for x in args.expect_counts.split(",")]
        ok = list(prof.counts) == want
    else:
        # not connected at any probed scale
        ok = all(c >= 2 for c in prof.counts)
    report.add("connectivity", "pass" if ok else "fail", values, expected, prof.to_dict())


def _check_reach(raster, args, report, r, tol, expected):
    g = raster.geometry
    dists = parse_list(args.distances, g.h) if args.distances else default_probe_distances(g.h)
    est = reach_probe(raster, dists)
    report.add("reach", "pass" if est.first_multivalued is not None else "fail", [
        quantity("first_multivalued", est.first_multivalued, "world", g.h),
    ], expected, est.to_dict())


_CHECKERS = {
    "rconvex": _check_rconvex,
    "regularity": _check_regularity,
    "connectivity": _check_connectivity,
    "reach": _check_reach,
}


def _load(path):
    try:
        return read_pgm(path)
    except (OSError, RasterFormatError, KeyError, ValueError) as e:
        raise UsageError(f"cannot read {path}: {e}") from e


def cmd_hull(args) -> int:
    raster, side = _load(args.input)
    g = raster.geometry
    r, N, c = _params_from_side(side, args)
    r = float(r)
    tol = parse_length(args.tol, g.h)
    report = ProbeReport("hull", _params_dict(g, r, N))
    algos = ("closing", "sweep") if args.algo == "both" else (args.algo,)
    hulls = {}
    for algo in algos:
        fn = rconvex_hull_closing if algo == "closing" else rconvex_hull_sweep
        with report.stage(algo):
            hulls[algo] = fn(raster, r, strict_padding=args.strict_padding)
    hull = hulls[algos[0]]
    if len(hulls) == 2:
        agree = int(np.count_nonzero(hulls["closing"].mask == hulls["sweep"].mask))
        total = g.nx * g.ny
        report.add("agreement", "pass" if agree == total else "fail", [
            quantity("agreeing_cells", agree, "cells", 0),
            quantity("total_cells", total, "cells", 0),
        ], expected="pass")
    with report.stage("defect"):
        defect = hausdorff(raster, hull)
    report.add("defect", "info", [
        quantity("hausdorff_defect", defect, "world", tol),
        quantity("added_cells", hull.count - raster.count, "cells", 0),
    ])
    with report.stage("write"):
        meta = {"hull": {"r": r, "algo": algos[0]}}
        if c:
            meta["construction"] = c
        write_pgm(args.out, hull, meta)
    return _emit(report, args)


def cmd_render(args) -> int:
    raster, side = _load(args.input)
    params = None
    if args.overlay != "none":
        r, N, c = _params_from_side(side, args)
        if N is None:
            raise UsageError("--N is required for overlays (input carries no construction parameters)")
        try:
            params = ConstructionParams(float(r), int(N), bool(c.get("include_limit_point", True)))
        except ValueError as e:
            raise UsageError(str(e)) from e
    svg = render_svg(raster, params, args.overlay)
    try:
        Path(args.out).write_text(svg)
    except OSError as e:
        raise UsageError(f"cannot write {args.out}: {e}") from e
    return 0


def _r_arg(text):
    return float(parse_number(text))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rhull", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--report", help="write the JSON report here instead of stdout")
        p.add_argument("--no-timing", action="store_true",
                       help="omit per-stage timings so reports are byte-reproducible")

    b = sub.add_parser("build", help="rasterize the toothed set (or its 1-D skeleton)")
    b.add_argument("--set", choices=("T", "C"), default="T",
                   help="T: teeth; C: the one-cell-thick union of the B_n intervals")
    b.add_argument("--r", default="1/2", help="carving disk radius, > 1/4 (default 1/2)")
    b.add_argument("--N", type=int, default=6, help="last tooth index (default 6)")
    b.add_argument("--h", default="2^-12", help="cell size, e.g. 2^-12 (default)")
    b.add_argument("--bbox", help="xmin,xmax,ymin,ymax (default -0.6,2.1,-0.7,0.1)")
    b.add_argument("--include-limit", dest="include_limit", action="store_true", default=True)
    b.add_argument("--no-include-limit", dest="include_limit", action="store_false")
    b.add_argument("--partial", action="store_true",
                   help="allow a bbox that sees only part of the set")
    b.add_argument("--out", required=True, help="output PGM; geometry goes to the .json sidecar")
    common(b)
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="run r-convexity, regularity, connectivity and reach probes")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--r", type=_r_arg, help="hull radius (default: from the sidecar)")
    c.add_argument("--tol", default="2h", help="set-equality tolerance, e.g. 2h (default)")
    c.add_argument("--checks", default="rconvex", help=f"comma list from {','.join(CHECKS)}")
    c.add_argument("--center", default="3/2,0", help="connectivity probe center x,y")
    c.add_argument("--radii", default="1/4,1/8,1/16", help="descending probe radii")
    c.add_argument("--expect-counts", help="exact component counts expected per radius")
    c.add_argument("--distances", help="ascending reach probe distances (default 2^-k > 2h)")
    c.add_argument("--expect", action="append", metavar="NAME=pass|fail",
                   help="expected verdict of a check (default pass)")
    common(c)
    c.set_defaults(func=cmd_check)

    hp = sub.add_parser("hull", help="compute the grid r-convex hull")
    hp.add_argument("--in", dest="input", required=True)
    hp.add_argument("--r", type=_r_arg, help="hull radius (default: from the sidecar)")
    hp.add_argument("--algo", choices=("closing", "sweep", "both"), default="closing")
    hp.add_argument("--tol", default="2h")
    hp.add_argument("--strict-padding", action="store_true",
                    help="reject inputs whose foreground is within r of the border")
    hp.add_argument("--out", required=True)
    common(hp)
    hp.set_defaults(func=cmd_hull)

    rp = sub.add_parser("render", help="write an SVG figure")
    rp.add_argument("--in", dest="input", required=True)
    rp.add_argument("--out", required=True)
    rp.add_argument("--overlay", choices=("none", "disks", "intervals"), default="none")
    rp.add_argument("--r", type=_r_arg)
    rp.add_argument("--N", type=int)
    rp.set_defaults(func=cmd_render)
    return ap


# options whose values may start with "-" (argparse would read them as flags)
_SIGNED = ("--bbox", "--center", "--r", "--tol", "--radii", "--distances")


def _glue_signed(argv):
    out = []
    it = iter(argv)
    for a in it:
        if a in _SIGNED:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_signed(argv))
    try:
        return args.func(args)
    except (UsageError, InsufficientPadding) as e:
        print(f"rhull {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
