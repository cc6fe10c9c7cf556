"""Command line: ``hsroute benchmark|route|baseline|plot-data``.

Exit codes: 0 when the goal was reached, 2 when it was not, 1 on error.
Any manifest key can be overridden with ``--key value``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import fileio, pipeline
from .errors import RouteNotFound, RoutingError
from .fileio import MANIFEST_KEYS
from .hybrid_search import HSConfig
from .smoothing import SmoothingConfig

EXIT_OK, EXIT_ERROR, EXIT_NOT_REACHED = 0, 1, 2

log = logging.getLogger("hsroute")


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_overrides(extra) -> dict:
    """``--key value`` pairs into a dict; dashes in keys become underscores."""
    out = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or i + 1 >= len(extra):
            raise SystemExit(f"expected --key value pairs, got {extra[i:]}")
        key = tok[2:].replace("-", "_")
        if key not in MANIFEST_KEYS:
            raise SystemExit(f"unknown option --{tok[2:]}")
        out[key] = _value(extra[i + 1])
        i += 2
    return out


def _parser():
    p = argparse.ArgumentParser(prog="hsroute", description="Time-optimal routing through currents.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="verb", required=True)
    b = sub.add_parser("benchmark", help="run a synthetic benchmark and print a results table")
    b.add_argument("name", choices=sorted(pipeline.BENCHMARKS))
    b.add_argument("--out", help="directory for the route CSV and summary JSON")
    r = sub.add_parser("route", help="plan a route from a manifest")
    r.add_argument("--manifest", required=True)
    bl = sub.add_parser("baseline", help="minimum-distance route metrics for a manifest")
    bl.add_argument("--manifest", required=True)
    pd = sub.add_parser("plot-data", help="field samples and route polyline for plotting")
    pd.add_argument("--record", required=True, help="summary JSON written by 'route'")
    pd.add_argument("--bbox", type=float, nargs=4, metavar=("X1MIN", "X1MAX", "X2MIN", "X2MAX"))
    pd.add_argument("--resolution", type=float)
    pd.add_argument("--out", help="output prefix (default: next to the record)")
    return p


def _report(summary: dict):
    print(json.dumps(summary, sort_keys=True, indent=2))


def write_record(result, manifest_dict, route_csv: Path, summary_json: Path):
    summary = pipeline.summary_dict(result)
    summary["manifest"] = manifest_dict
    summary["route_csv"] = route_csv.name if route_csv.parent == summary_json.parent else str(route_csv)
    fileio.write_route_csv(result.rows, route_csv)
    fileio.write_json(summary, summary_json)
    return summary


def cmd_benchmark(args, overrides):
    hs_kw = {k: v for k, v in overrides.items() if k in HSConfig.__dataclass_fields__}
    sm_kw = {k: v for k, v in overrides.items() if k in SmoothingConfig.__dataclass_fields__}
    rest = set(overrides) - set(hs_kw) - set(sm_kw)
    if rest:
        raise SystemExit(f"options not valid for benchmark: {sorted(rest)}")
    report = pipeline.run_benchmark(args.name, HSConfig.synthetic(**hs_kw), SmoothingConfig(**sm_kw))
    print(report.table())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _, start, goal = pipeline.BENCHMARKS[args.name]
        manifest = {"space": "euclidean", "field": args.name, "start": list(start), "goal": list(goal),
                    **hs_kw, **sm_kw}
        write_record(report.result, manifest, out / f"{args.name}_route.csv", out / f"{args.name}_summary.json")
    return EXIT_OK if report.result.reached else EXIT_NOT_REACHED


def cmd_route(args, overrides):
    m = fileio.load_manifest(args.manifest, overrides)
    field = m.load_field()
    try:
        result = pipeline.plan(m.start, m.goal, field, m.space_obj, m.hs, m.smoothing, m.vessel)
    except RouteNotFound as exc:
        log.error("%s", exc)
        return EXIT_NOT_REACHED
    route_csv = m.output("route_csv") or Path(args.manifest).with_suffix(".route.csv")
    summary_json = m.output("summary_json") or Path(args.manifest).with_suffix(".summary.json")
    _report(write_record(result, m.to_dict(), route_csv, summary_json))
    return EXIT_OK if result.reached else EXIT_NOT_REACHED


def cmd_baseline(args, overrides):
    m = fileio.load_manifest(args.manifest, overrides)
    field = m.load_field()
    met = pipeline.baseline(m.start, m.goal, m.hs.V, field, m.space_obj, m.baseline_points, m.vessel)
    _report({"travel_time": met.travel_time, "path_length": met.path_length, "fuel_kg": met.fuel_kg})
    return EXIT_OK


def cmd_plot_data(args, overrides):
    if overrides:
        raise SystemExit("plot-data takes no manifest overrides")
    rec_path = Path(args.record)
    rec = fileio.read_json(rec_path)
    try:
        mdoc, csv_name = rec["manifest"], rec["route_csv"]
    except KeyError as exc:
        raise fileio.ParseError(f"{rec_path}: record lacks {exc}") from None
    m = fileio.manifest_from_dict(mdoc, rec_path.parent)
    field = m.load_field()
    rows = fileio.read_route_csv(rec_path.parent / csv_name)
    if args.bbox:
        bbox = args.bbox
    else:
        lo, hi = rows[:, 1:3].min(axis=0), rows[:, 1:3].max(axis=0)
        pad = 0.1 * float(np.max(hi - lo)) + 1e-9
        bbox = (lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad)
        if hasattr(field, "bounds"):
            g = field.bounds
            bbox = (max(bbox[0], g[0]), min(bbox[1], g[1]), max(bbox[2], g[2]), min(bbox[3], g[3]))
    res = args.resolution or max(bbox[1] - bbox[0], bbox[3] - bbox[2]) / 50.0
    prefix = args.out or str(rec_path.with_suffix(""))
    fpath, rpath = fileio.emit_plot_data(rows, field, bbox, res, prefix)
    print(fpath)
    print(rpath)
    return EXIT_OK


COMMANDS = {"benchmark": cmd_benchmark, "route": cmd_route, "baseline": cmd_baseline,
            "plot-data": cmd_plot_data}


def main(argv=None) -> int:
    args, extra = _parser().parse_known_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        overrides = parse_overrides(extra)
        return COMMANDS[args.verb](args, overrides)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(f"hsroute: {exc.code}", file=sys.stderr)
            return EXIT_ERROR
        raise
    except (RoutingError, ValueError, OSError) as exc:
        print(f"hsroute: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
