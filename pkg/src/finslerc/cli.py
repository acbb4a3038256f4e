"""Command-line entry point.

``finslerc report`` loads a metric, samples or reads evaluation points,
runs the requested checks and writes a machine-readable JSON report or a
human-readable summary.  Exit status: 0 when no invariant violation or
engine bug was detected, 1 otherwise, 2 on configuration or metric errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from .errors import ConfigError, FinslercError
from .report import ALL_CHECKS, RunConfig, emit_report, run

_RANDOM_RE = re.compile(r"^random:seed=(\d+),count=(\d+)$")


def _build_parser():
    p = argparse.ArgumentParser(prog="finslerc",
                                description="Finsler metric curvature reports")
    sub = p.add_subparsers(dest="command", required=True)
    rep = sub.add_parser("report", help="evaluate a metric on sample points")
    rep.add_argument("--metric", required=True,
                     help="path to a metric JSON file")
    rep.add_argument("--points", default="random:seed=0,count=5",
                     help="points JSON path or 'random:seed=S,count=C'")
    rep.add_argument("--checks", default="all",
                     help=f"comma-separated subset of {','.join(ALL_CHECKS)} or 'all'")
    rep.add_argument("--tol", type=float, default=1e-7,
                     help="classification tolerance (default 1e-7)")
    rep.add_argument("--format", dest="fmt", choices=("json", "text"),
                     default="json")
    rep.add_argument("--out", default="-",
                     help="output path ('-' for standard output)")
    rep.add_argument("--box", type=float, default=0.5,
                     help="half-width of the x sampling box")
    return p


def _load_points(arg):
    m = _RANDOM_RE.match(arg)
    if m:
        return None, int(m.group(1)), int(m.group(2))
    try:
        with open(arg, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read points file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed points JSON: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("points", [])
    try:
        pts = [(np.asarray(p["x"], float), np.asarray(p["y"], float))
               for p in data]
    except (KeyError, TypeError) as exc:
        raise ConfigError("points must be objects with 'x' and 'y' arrays") from exc
    if not pts:
        raise ConfigError("empty point list")
    return pts, 0, len(pts)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        with open(args.metric, "r", encoding="utf-8") as fh:
            metric_obj = json.load(fh)
    except OSError as exc:
        print(f"finslerc: cannot read metric file: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"finslerc: malformed metric JSON: {exc}", file=sys.stderr)
        return 2

    try:
        points, seed, count = _load_points(args.points)
        checks = tuple(ALL_CHECKS) if args.checks == "all" else \
            tuple(c.strip() for c in args.checks.split(",") if c.strip())
        cfg = RunConfig(metric=metric_obj, points=points, seed=seed,
                        count=count, box=args.box, checks=checks,
                        tol=args.tol, fmt=args.fmt)
        exit_code, report = run(cfg)
        payload = emit_report(report, args.fmt)
    except FinslercError as exc:
        print(f"finslerc: {exc}", file=sys.stderr)
        return 2

    if args.out == "-":
        sys.stdout.buffer.write(payload)
    else:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
