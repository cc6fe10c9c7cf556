"""End-to-end planning: baseline, Hybrid Search, FMA smoothing and metrics."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import RoutingError
from .geometry import EUCLIDEAN, Space
from .hybrid_search import HSConfig, Route, hybrid_search
from .route_analysis import (LandOnBaseline, PathMetrics, VesselSpec, heading_over_water,
                             min_distance_route, path_travel_time)
from .smoothing import DiscreteRoute, SmoothingConfig, from_hs_route, smooth
from .vector_field import circular, four_vortices_field

log = logging.getLogger(__name__)

LAND_PROBES = 8

BENCHMARKS = {
    "circular": (circular, (3.0, 2.0), (-7.0, 2.0)),
    "four_vortices": (four_vortices_field, (0.0, 0.0), (6.0, 2.0)),
}


@dataclass
class PlanResult:
    route: Route
    hs_metrics: PathMetrics
    metrics: PathMetrics
    rows: np.ndarray  # (t, x1, x2, alpha) of the route of record
    method: str  # "fma" or "hs"
    smoothing_status: str
    actions: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    smoothed_metrics: Optional[PathMetrics] = None
    # resampled HS route fed to smoothing and what came out, kept even when rejected
    smoothing_input: Optional[DiscreteRoute] = None
    smoothing_output: Optional[DiscreteRoute] = None

    @property
    def reached(self) -> bool:
        return self.route.reached


def crosses_land(points, field, probes: int = LAND_PROBES) -> bool:
    """True if any probe along the polyline (ends included) is land or off the field."""
    P = np.asarray(points, dtype=np.float64)
    s = np.linspace(0.0, 1.0, probes, endpoint=False)
    a, d = P[:-1], P[1:] - P[:-1]
    x = (a[:, None, :] + s[None, :, None] * d[:, None, :]).reshape(-1, 2)
    x = np.vstack([x, P[-1:]])
    _, _, land = field.sample_many(x[:, 0], x[:, 1])
    return bool(np.any(land))


def _rows_for_points(points, h, V, field, space, t0=0.0):
    P = np.asarray(points, dtype=np.float64)
    n = P.shape[0]
    alpha = np.empty(n)
    for k in range(n - 1):
        alpha[k] = heading_over_water(P[k], P[k + 1], V, field, space)
    alpha[-1] = alpha[-2]
    t = t0 + h * np.arange(n)
    return np.column_stack([t, P, alpha])


def plan(start, goal, field, space: Space = EUCLIDEAN, hs: Optional[HSConfig] = None,
         smoothing: Optional[SmoothingConfig] = None, vessel: Optional[VesselSpec] = None) -> PlanResult:
    """Hybrid Search followed by FMA smoothing.

    The smoothed route becomes the route of record only when smoothing
    succeeds, stays on water and does not lengthen the measured travel time;
    otherwise the piecewise HS route is kept and ``smoothing_status`` says why.
    """
    hs = hs or HSConfig()
    smoothing = smoothing or SmoothingConfig()
    V = hs.V
    route = hybrid_search(start, goal, hs, field, space)
    hs_rows = route.states()
    if route.reached:
        hs_rows = _close_to_goal(hs_rows, goal, V, field, space)
    hs_metrics = _metrics(hs_rows[:, 1:3], V, field, space, vessel)
    keep_hs = PlanResult(route, hs_metrics, hs_metrics, hs_rows, "hs", "skipped")
    if smoothing.iterations == 0 or hs_rows.shape[0] < 2 or not route.reached:
        return keep_hs
    dr = from_hs_route(route, space, goal=goal)
    keep_hs.smoothing_input = dr
    try:
        res = smooth(dr, smoothing, V, field)
    except RoutingError as exc:
        log.warning("smoothing failed, keeping the HS route: %s", exc)
        keep_hs.smoothing_status = f"error: {exc}"
        return keep_hs
    keep_hs.actions = res.actions
    keep_hs.smoothing_output = res.route
    pts = res.route.points
    if not np.all(np.isfinite(pts)):
        keep_hs.smoothing_status = "non-finite"
        return keep_hs
    if crosses_land(pts, field):
        log.warning("smoothed route crosses land, keeping the HS route")
        keep_hs.smoothing_status = "land"
        return keep_hs
    try:
        sm = _metrics(pts, V, field, space, vessel)
    except RoutingError as exc:
        keep_hs.smoothing_status = f"error: {exc}"
        return keep_hs
    keep_hs.smoothed_metrics = sm
    if sm.travel_time > hs_metrics.travel_time:
        log.warning("smoothing lengthened the route (%.6g > %.6g), keeping the HS route",
                    sm.travel_time, hs_metrics.travel_time)
        keep_hs.smoothing_status = "worse"
        return keep_hs
    rows = _rows_for_points(pts, res.route.h, V, field, space, float(hs_rows[0, 0]))
    return PlanResult(route, hs_metrics, sm, rows, "fma", "ok", res.actions, sm, dr, res.route)


def _close_to_goal(rows, goal, V, field, space):
    """Append the final hop from inside the goal radius to the goal itself."""
    last = rows[-1]
    g = np.asarray(goal, dtype=np.float64)
    if np.array_equal(last[1:3], g):
        return rows
    hop = path_travel_time(np.vstack([last[1:3], g]), V, field, space).travel_time
    alpha = heading_over_water(last[1:3], g, V, field, space)
    return np.vstack([rows, [last[0] + hop, g[0], g[1], alpha]])


def _metrics(points, V, field, space, vessel):
    return path_travel_time(points, V, field, space, vessel)


def baseline(start, goal, V, field, space: Space = EUCLIDEAN, n: int = 200,
             vessel: Optional[VesselSpec] = None) -> PathMetrics:
    path = min_distance_route(space, start, goal, n)
    with warnings.catch_warnings():
        warnings.simplefilter("always", LandOnBaseline)
        return path_travel_time(path, V, field, space, vessel)


@dataclass
class BenchmarkReport:
    name: str
    baseline: PathMetrics
    result: PlanResult

    def rows(self):
        out = [("Min. dist.", self.baseline.travel_time, self.baseline.path_length)]
        out.append(("HS (piecewise)", self.result.hs_metrics.travel_time,
                    self.result.hs_metrics.path_length))
        out.append(("HS", self.result.metrics.travel_time, self.result.metrics.path_length))
        return out

    def table(self) -> str:
        lines = [f"{self.name}", f"{'Method':<16}{'Travel time':>12}{'Distance':>12}"]
        for method, t, d in self.rows():
            lines.append(f"{method:<16}{t:>12.2f}{d:>12.2f}")
        lines.append(f"smoothing: {self.result.smoothing_status}, "
                     f"reached: {str(self.result.reached).lower()}")
        return "\n".join(lines)


def run_benchmark(name: str, hs: Optional[HSConfig] = None,
                  smoothing: Optional[SmoothingConfig] = None) -> BenchmarkReport:
    try:
        make, start, goal = BENCHMARKS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None
    f = make()
    hs = hs or HSConfig.synthetic()
    base = baseline(start, goal, hs.V, f)
    return BenchmarkReport(name, base, plan(start, goal, f, EUCLIDEAN, hs, smoothing))


def summary_dict(result: PlanResult) -> dict:
    m = result.metrics
    out = {
        "travel_time": m.travel_time,
        "path_length": m.path_length,
        "fuel_kg": m.fuel_kg,
        "reached": result.reached,
        "leg_boundaries": [int(i) for i in result.route.leg_boundaries()],
        "action_trace_length": int(len(result.actions)),
        "method": result.method,
        "smoothing_status": result.smoothing_status,
        "hs_travel_time": result.hs_metrics.travel_time,
        "rows": int(result.rows.shape[0]),
    }
    if result.smoothed_metrics is not None:
        out["smoothed_travel_time"] = result.smoothed_metrics.travel_time
    if len(result.actions):
        out["action_initial"] = float(result.actions[0])
        out["action_final"] = float(result.actions[-1])
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in out.items()}
