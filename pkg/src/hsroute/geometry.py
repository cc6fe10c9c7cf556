"""Navigation spaces: the Euclidean plane and the sphere in (lon, lat) degrees."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import AntipodalPoints, CoincidentPoints
from .kernels import geo

EARTH_RADIUS_KM = 6367.449


@dataclass(frozen=True)
class SphereParams:
    """Sphere of ``radius`` km measured in units of ``kappa`` radians (degrees by default)."""

    radius: float = EARTH_RADIUS_KM
    kappa: float = math.pi / 180.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def K(self) -> float:
        """Kilometres per angular unit."""
        return self.kappa * self.radius

    @property
    def K_m(self) -> float:
        """Metres per angular unit, the scale used by the dynamics (speeds in m/s)."""
        return self.K * 1000.0


@dataclass(frozen=True)
class Euclidean:
    is_sphere = False

    def kernel_args(self):
        """(sphere, radius_km, K_m) as consumed by the kernels."""
        return False, 1.0, 1.0


@dataclass(frozen=True)
class Spherical:
    params: SphereParams = SphereParams()
    is_sphere = True

    def kernel_args(self):
        return True, self.params.radius, self.params.K_m


Space = Union[Euclidean, Spherical]
Point = Sequence[float]

EUCLIDEAN = Euclidean()
SPHERE = Spherical()


def normalize_point(space: Space, p: Point) -> tuple:
    """Longitude into (-180, 180] and latitude checked, on the sphere; identity on the plane."""
    x1, x2 = float(p[0]), float(p[1])
    if space.is_sphere:
        if not -90.0 <= x2 <= 90.0:
            raise ValueError(f"latitude {x2} outside [-90, 90]")
        x1 = x1 - 360.0 * math.ceil((x1 - 180.0) / 360.0)
    return x1, x2


def distance(space: Space, a: Point, b: Point) -> float:
    """Straight-line distance, or great-circle distance in km on the sphere."""
    sphere, radius, _ = space.kernel_args()
    return float(geo.distance(sphere, radius, float(a[0]), float(a[1]), float(b[0]), float(b[1])))


def bearing(space: Space, a: Point, b: Point) -> float:
    """Initial heading from a to b, radians counterclockwise from east, in (-pi, pi]."""
    if float(a[0]) == float(b[0]) and float(a[1]) == float(b[1]):
        raise CoincidentPoints(a)
    sphere = space.is_sphere
    return float(geo.bearing(sphere, float(a[0]), float(a[1]), float(b[0]), float(b[1])))


def wrap_angle(a):
    return geo.wrap_angle_np(a) if isinstance(a, np.ndarray) else float(geo.wrap_angle(float(a)))


def _unit(p):
    lon, lat = np.radians(p[0]), np.radians(p[1])
    return np.array([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)])


def geodesic_path(space: Space, a: Point, b: Point, n: int) -> np.ndarray:
    """``n`` points from a to b along the chord or great circle, endpoints exact."""
    if n < 2:
        raise ValueError("n must be >= 2")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    s = np.linspace(0.0, 1.0, n)
    if not space.is_sphere:
        out = a[None, :] + s[:, None] * (b - a)[None, :]
    else:
        ua, ub = _unit(a), _unit(b)
        cosw = float(np.clip(ua @ ub, -1.0, 1.0))
        omega = math.acos(cosw)
        if math.pi - omega < 1e-12:
            raise AntipodalPoints((tuple(a), tuple(b)))
        if omega < 1e-15:
            out = np.repeat(a[None, :], n, axis=0)
        else:
            so = math.sin(omega)
            u = (np.sin((1.0 - s) * omega)[:, None] * ua + np.sin(s * omega)[:, None] * ub) / so
            lat = np.degrees(np.arcsin(np.clip(u[:, 2], -1.0, 1.0)))
            lon = np.degrees(np.arctan2(u[:, 1], u[:, 0]))
            # keep longitudes continuous with the start point
            lon = a[0] + geo.wrap_angle_np(np.radians(lon - a[0])) * 180.0 / math.pi
            out = np.stack([lon, lat], axis=1)
    out[0] = a
    out[-1] = b
    return out


def polyline_length(space: Space, pts) -> float:
    pts = np.asarray(pts, dtype=np.float64)
    sphere, radius, _ = space.kernel_args()
    d = geo.distance_np(sphere, radius, pts[:-1, 0], pts[:-1, 1], pts[1:, 0], pts[1:, 1])
    return float(np.sum(d))
