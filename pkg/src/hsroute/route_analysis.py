"""Route metrics: travel time along a fixed path, baselines and fuel."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CurrentExceedsSpeed, NonPositiveSpeed
from .geometry import EUCLIDEAN, Space, geodesic_path, polyline_length
from .kernels import geo

PATH_RTOL = 1e-6  # per segment; keeps re-parameterization drift near 1e-10
MAX_BISECTIONS = 24


class LandOnBaseline(UserWarning):
    """Part of a fixed path crosses land; those pieces were left out of the time."""


@dataclass(frozen=True)
class VesselSpec:
    displacement: float  # tonnes
    length: float  # metres
    sfoc: float = 185.0  # g/kWh

    def __post_init__(self):
        if not (self.displacement > 0 and self.length > 0 and self.sfoc > 0):
            raise ValueError("displacement, length and sfoc must be positive")


@dataclass(frozen=True)
class PathMetrics:
    travel_time: float
    path_length: float
    fuel_kg: Optional[float] = None


def fuel_rate(v_water: float, vessel: VesselSpec) -> float:
    """Harvald power law times SFOC, in kg/h. ``v_water`` in m/s."""
    if not v_water > 0:
        raise NonPositiveSpeed(f"speed over water must be positive, got {v_water}")
    c = 3.7 * (math.sqrt(vessel.length) + 75.0 / v_water)
    power_kw = vessel.displacement ** (2.0 / 3.0) * v_water ** 3 / c
    return vessel.sfoc * power_kw / 1000.0


def min_distance_route(space: Space, a, b, n: int = 200) -> np.ndarray:
    return geodesic_path(space, a, b, n)


def _segment_times(p0, p1, V, field, space: Space):
    """Midpoint-current time for each segment, plus a land flag.

    On the sphere segments are measured in metres against currents in m/s.
    """
    mid = 0.5 * (p0 + p1)
    d = p1 - p0
    if space.is_sphere:
        sphere, radius, K = space.kernel_args()
        length = geo.distance_np(True, radius, p0[:, 0], p0[:, 1], p1[:, 0], p1[:, 1]) * 1000.0
        e = d[:, 0] * np.cos(np.radians(mid[:, 1]))
        n = d[:, 1]
        norm = np.hypot(e, n)
    else:
        length = np.hypot(d[:, 0], d[:, 1])
        e, n = d[:, 0], d[:, 1]
        norm = length
    safe = np.where(norm > 0, norm, 1.0)
    u1, u2 = e / safe, n / safe
    w1, w2, land = field.sample_many(mid[:, 0], mid[:, 1])
    along = w1 * u1 + w2 * u2
    c1, c2 = w1 - along * u1, w2 - along * u2
    disc = V * V - (c1 * c1 + c2 * c2)
    bad = ~land & (length > 0) & (disc <= 0.0)
    if np.any(bad):
        i = int(np.nonzero(bad)[0][0])
        raise CurrentExceedsSpeed(f"cross current exceeds V near {tuple(mid[i])}", where=tuple(mid[i]))
    g = along + np.sqrt(np.maximum(disc, 0.0))
    bad = ~land & (length > 0) & (g <= 0.0)
    if np.any(bad):
        i = int(np.nonzero(bad)[0][0])
        raise CurrentExceedsSpeed(f"opposing current stronger than V near {tuple(mid[i])}",
                                  where=tuple(mid[i]))
    t = np.where(land | (length == 0), 0.0, length / np.where(g > 0, g, 1.0))
    return t, land


def segment_travel_times(path, V: float, field, space: Space = EUCLIDEAN, rtol: float = PATH_RTOL):
    """Travel time of each segment of ``path`` at constant speed over water ``V``.

    Each segment is bisected until its time changes by less than ``rtol``
    relative on two successive refinements (one alone can agree by chance);
    the converged pair is then Richardson extrapolated, since the midpoint
    rule's error is quadratic in the step.
    """
    P = np.asarray(path, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] < 2:
        raise ValueError("path needs at least two points")
    if not V > 0:
        raise NonPositiveSpeed("V must be positive")
    nseg = P.shape[0] - 1
    out = np.zeros(nseg)
    owner = np.arange(nseg)
    a, b = P[:-1].copy(), P[1:].copy()
    coarse, land = _segment_times(a, b, V, field, space)
    any_land = bool(np.any(land))
    agreed = np.zeros(nseg, dtype=bool)  # the parent already passed the test
    for _ in range(MAX_BISECTIONS):
        m = 0.5 * (a + b)
        t1, l1 = _segment_times(a, m, V, field, space)
        t2, l2 = _segment_times(m, b, V, field, space)
        any_land |= bool(np.any(l1 | l2))
        fine = t1 + t2
        ok = np.abs(fine - coarse) <= rtol * np.abs(fine)
        done = ok & agreed
        np.add.at(out, owner[done], fine[done] + (fine[done] - coarse[done]) / 3.0)
        keep = ~done
        if not np.any(keep):
            break
        owner = np.concatenate([owner[keep], owner[keep]])
        a, b = np.concatenate([a[keep], m[keep]]), np.concatenate([m[keep], b[keep]])
        coarse = np.concatenate([t1[keep], t2[keep]])
        agreed = np.concatenate([ok[keep], ok[keep]])
    else:
        np.add.at(out, owner, coarse)
    if any_land:
        warnings.warn("path crosses land; land pieces excluded from travel time", LandOnBaseline)
    return out


def path_travel_time(path, V: float, field, space: Space = EUCLIDEAN,
                     vessel: Optional[VesselSpec] = None) -> PathMetrics:
    """Time to follow ``path`` with the heading re-solved against the current on every piece."""
    t = float(np.sum(segment_travel_times(path, V, field, space)))
    length = polyline_length(space, np.asarray(path, dtype=np.float64))
    fuel = None
    if vessel is not None:
        fuel = fuel_rate(V, vessel) * _hours(t)
    return PathMetrics(t, length, fuel)


def _hours(t: float) -> float:
    # time is seconds wherever speeds are m/s
    return t / 3600.0


def route_points(route) -> np.ndarray:
    """Polyline of an HS Route, a DiscreteRoute or a plain point array."""
    if hasattr(route, "legs"):
        return route.states()[:, 1:3]
    if hasattr(route, "points"):
        return np.asarray(route.points, dtype=np.float64)
    return np.asarray(route, dtype=np.float64)


def route_metrics(route, V: float, field, space: Space = EUCLIDEAN,
                  vessel: Optional[VesselSpec] = None) -> PathMetrics:
    return path_travel_time(route_points(route), V, field, space, vessel)


def heading_over_water(p0, p1, V: float, field, space: Space = EUCLIDEAN) -> float:
    """Heading that keeps the vessel on the segment p0 -> p1 (midpoint current)."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    mid = 0.5 * (p0 + p1)
    d = p1 - p0
    e = d[0] * math.cos(math.radians(mid[1])) if space.is_sphere else d[0]
    n = d[1]
    norm = math.hypot(e, n)
    if norm == 0:
        return 0.0
    u1, u2 = e / norm, n / norm
    w = field.sample(mid)
    along = w.w1 * u1 + w.w2 * u2
    c1, c2 = w.w1 - along * u1, w.w2 - along * u2
    g = along + math.sqrt(max(V * V - (c1 * c1 + c2 * c2), 0.0))
    return math.atan2(g * u2 - w.w2, g * u1 - w.w1)
