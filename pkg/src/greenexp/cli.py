"""
Command-line front end.

    greenexp expand   --preset anisotropic-linear --y 0,0 --l 1
    greenexp green    --preset identity --y 0.3,0 --grid 257
    greenexp robin    --preset diag-quadratic --l 2 --grid 129
    greenexp verify   --suite disk-identity
    greenexp selftest

Exit status: 0 success (all criteria pass), 1 a failed check, 2 bad usage or
config. Every command writes its files plus ``manifest.json`` under --out.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, load_spec, parse_point
from .parametrix import PRESETS
from .transform import NotSPDError

SCHEMA_VERSION = 1


class _Writer:
    """Collects output files for the manifest."""

    def __init__(self, out):
        self.out = out
        self.files = []
        os.makedirs(out, exist_ok=True)

    def path(self, name):
        self.files.append(name)
        return os.path.join(self.out, name)

    def text(self, name, text):
        with open(self.path(name), "w", encoding="utf-8") as fh:
            fh.write(text)

    def json(self, name, obj):
        self.text(name, json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")

    def manifest(self, cfg: RunConfig, status):
        entries = []
        for name in sorted(set(self.files)):
            with open(os.path.join(self.out, name), "rb") as fh:
                data = fh.read()
            entries.append({"file": name, "bytes": len(data),
                            "sha256": hashlib.sha256(data).hexdigest()})
        settings = {"command": cfg.command, "spec": cfg.spec_path, "preset": cfg.preset,
                    "dimension": cfg.dimension, "y": cfg.y_text(), "l": cfg.l,
                    "grid": cfg.grid, "backend": cfg.backend, "tol": cfg.tol,
                    "suite": cfg.suite}
        with open(os.path.join(self.out, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump({"schema_version": SCHEMA_VERSION, "settings": settings,
                       "exit_status": status, "files": entries}, fh, indent=2, sort_keys=True)
            fh.write("\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--spec", metavar="PATH", help="coefficient config file")
    src.add_argument("--preset", choices=PRESETS, help="built-in coefficient field")
    common.add_argument("--dim", type=int, default=2, help="dimension for presets (default 2)")
    common.add_argument("--y", metavar="CSV", help="base point, e.g. 0.3,0")
    common.add_argument("--l", type=int, default=None, help="expansion order (>= 0)")
    common.add_argument("--grid", type=int, default=None, help="nodes per axis (>= 33)")
    common.add_argument("--out", default="greenexp-out", metavar="DIR", help="output directory")
    common.add_argument("--backend", choices=("exact", "float"), default=None,
                        help="scalar backend (default: exact when possible)")
    common.add_argument("--tol", type=float, default=None, help="solver relative tolerance")

    parser = argparse.ArgumentParser(
        prog="greenexp",
        description="Singular expansion of Green's functions of -div(K grad) and numeric checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("expand", parents=[common], help="symbolic expansion at a base point")
    sub.add_parser("green", parents=[common], help="numeric Green's function on a grid")
    sub.add_parser("robin", parents=[common], help="Robin function on a 9x9 lattice")
    p = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    p.add_argument("--suite", default="all", help="all, symbolic, numeric, disk-identity, quick")
    sub.add_parser("selftest", parents=[common], help="fast subset of the acceptance suite")
    return parser


def _config_from_args(parser, args):
    cfg = RunConfig(command=args.command, spec_path=args.spec, preset=args.preset,
                    out=args.out, suite=getattr(args, "suite", "all"), dimension=args.dim)
    spec, settings = None, {}
    if args.command in ("expand", "green", "robin"):
        if args.spec is None and args.preset is None:
            parser.error("one of --spec or --preset is required")
        spec, settings = load_spec(args.spec, args.preset, args.dim)
    for key in ("y", "l", "grid", "backend", "tol"):
        if key in settings:
            setattr(cfg, key, settings[key])
    if args.y is not None:
        cfg.y = parse_point(args.y)
    for key in ("l", "grid", "backend", "tol"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate(spec, need_y=args.command in ("expand", "green"))
    if args.command == "robin" and cfg.l < 1:
        raise ConfigError("robin needs --l >= 1")
    return cfg, spec


def cmd_expand(cfg, spec, w: _Writer):
    from .parametrix import build_expansion
    res = build_expansion(spec, cfg.y, cfg.l, cfg.backend)
    listing = res.listing()
    print(listing)
    w.text("expansion.txt", listing + "\n")
    w.text("expansion.json", res.to_json() + "\n")
    return 0


def cmd_green(cfg, spec, w: _Writer):
    from .numeric import Grid, GridField, green_reconstruct, images_disk_oracle, regular_part
    grid = Grid.for_domain(spec.domain, cfg.grid)
    G, rep, problem = green_reconstruct(spec, cfg.y, cfg.l, grid, tol=cfg.tol,
                                        backend=cfg.backend)
    # regular part H^l = G - singular expansion + polynomial part
    Hvals = G.values.copy()
    with np.errstate(all="ignore"):
        Hvals[grid.inside] -= problem.expansion.evaluate(grid.unknown_points, "expansion")
    H = regular_part(problem, GridField(grid, Hvals, dict(G.meta)))
    report = {"schema_version": SCHEMA_VERSION, "kind": "green", "y": cfg.y_text(),
              "l": cfg.l, "grid": list(grid.shape), "h": grid.h,
              "solve": {"iterations": rep.iterations, "residual": rep.residual,
                        "converged": rep.converged, "warnings": rep.warnings}}
    if spec.name == "identity" and spec.domain.kind == "disk":
        pts = grid.unknown_points
        y = np.array([float(v) for v in cfg.y])
        m = np.linalg.norm(pts - y, axis=1) > 4 * grid.h
        exact = images_disk_oracle(y, pts[m])
        rel = np.abs(G.values[grid.inside][m] - exact) / np.abs(exact)
        report["images_oracle_max_relative_error"] = float(rel.max())
    G.to_csv(w.path("green.csv"))
    G.to_npz(w.path("green.npz"))
    H.to_csv(w.path("regular.csv"))
    w.json("report.json", report)
    print(f"G_K(., y) on {grid.shape[0]}x{grid.shape[1]} nodes, solver iterations "
          f"{rep.iterations}, residual {rep.residual:.2e}")
    if "images_oracle_max_relative_error" in report:
        print(f"max relative error vs images oracle: "
              f"{report['images_oracle_max_relative_error']:.2e}")
    return 0 if rep.converged else 1


def cmd_robin(cfg, spec, w: _Writer):
    from .numeric import Grid, robin_scan
    grid = Grid.for_domain(spec.domain, cfg.grid)
    lo, hi = np.asarray(spec.domain.lo), np.asarray(spec.domain.hi)
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    frac = 0.7 if spec.domain.kind == "disk" else 0.8
    xs = np.linspace(mid[0] - frac * half[0], mid[0] + frac * half[0], 9)
    ys = np.linspace(mid[1] - frac * half[1], mid[1] + frac * half[1], 9)
    keep = None
    if spec.domain.kind == "disk":
        keep = lambda p: np.linalg.norm(p) <= frac + 1e-12
    table = robin_scan(spec, cfg.l, xs, ys, grid, keep=keep, tol=cfg.tol, backend=cfg.backend)
    rows = table.to_rows()
    with open(w.path("robin.csv"), "w", encoding="utf-8") as fh:
        fh.write("y1,y2,R\n")
        for a, b, v in rows:
            fh.write(f"{a!r},{b!r},{v!r}\n")
    d2x, d2y = table.second_differences()
    d2 = np.concatenate([d2x.ravel(), d2y.ravel()])
    d2 = d2[np.isfinite(d2)]
    report = {"schema_version": SCHEMA_VERSION, "kind": "robin", "l": cfg.l,
              "grid": list(grid.shape), "points": len(rows),
              "max_abs_second_difference": float(np.abs(d2).max()) if d2.size else None,
              "converged": all(r.converged for r in table.reports)}
    w.json("report.json", report)
    print(f"R_K on {len(rows)} lattice points; max |second difference| "
          f"{report['max_abs_second_difference']}")
    return 0 if report["converged"] else 1


def cmd_verify(cfg, w: _Writer, suite=None):
    from .acceptance import SUITES, format_table, run_suite
    name = suite or cfg.suite
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    results = run_suite(name, echo=print)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    w.json("verify.json", {"schema_version": SCHEMA_VERSION, "suite": name,
                           "results": [r.to_dict() for r in results]})
    w.text("verify.txt", format_table(results, timed=False) + "\n")
    return 0 if passed == len(results) else 1


def run(cfg: RunConfig, spec=None):
    """Dispatch a validated config; returns the exit status."""
    w = _Writer(cfg.out)
    if cfg.command == "expand":
        status = cmd_expand(cfg, spec, w)
    elif cfg.command == "green":
        status = cmd_green(cfg, spec, w)
    elif cfg.command == "robin":
        status = cmd_robin(cfg, spec, w)
    elif cfg.command == "verify":
        status = cmd_verify(cfg, w)
    else:
        status = cmd_verify(cfg, w, suite="quick")
    w.manifest(cfg, status)
    return status


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, spec = _config_from_args(parser, args)
    except (ConfigError, NotSPDError, KeyError) as exc:
        parser.print_usage(sys.stderr)
        print(f"greenexp: error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg, spec)
    except (ConfigError, NotSPDError) as exc:
        print(f"greenexp: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"greenexp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
