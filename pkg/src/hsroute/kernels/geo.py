"""Distance and bearing kernels. ``sphere`` selects haversine/great-circle
formulas on (lon, lat) degrees; otherwise plain Euclidean."""
import math

import numpy as np

from .._jit import njit

TWO_PI = 2.0 * math.pi
DEG = math.pi / 180.0


@njit
def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return a - TWO_PI * math.ceil((a - math.pi) / TWO_PI)


@njit
def distance(sphere, radius, ax1, ax2, bx1, bx2):
    if not sphere:
        return math.hypot(bx1 - ax1, bx2 - ax2)
    p1 = ax2 * DEG
    p2 = bx2 * DEG
    sdp = math.sin(0.5 * (p2 - p1))
    sdl = math.sin(0.5 * (bx1 - ax1) * DEG)
    h = sdp * sdp + math.cos(p1) * math.cos(p2) * sdl * sdl
    if h > 1.0:
        h = 1.0
    return 2.0 * radius * math.asin(math.sqrt(h))


@njit
def bearing(sphere, ax1, ax2, bx1, bx2):
    """Heading from a to b, counterclockwise from east, in (-pi, pi]."""
    if not sphere:
        return math.atan2(bx2 - ax2, bx1 - ax1)
    l1 = ax1 * DEG
    p1 = ax2 * DEG
    l2 = bx1 * DEG
    p2 = bx2 * DEG
    ci = math.cos(l1) * math.cos(p1)
    si = math.sin(l1) * math.cos(p1)
    cj = math.cos(l2) * math.cos(p2)
    sj = math.sin(l2) * math.cos(p2)
    num = -cj * si + ci * sj
    den = -(ci * cj + si * sj) * math.sin(p1) + (ci * ci + si * si) * math.sin(p2)
    # north-referenced clockwise azimuth -> east-referenced counterclockwise
    return wrap_angle(0.5 * math.pi - math.atan2(num, den))


def wrap_angle_np(a):
    a = np.asarray(a, dtype=np.float64)
    return a - TWO_PI * np.ceil((a - math.pi) / TWO_PI)


def distance_np(sphere, radius, ax1, ax2, bx1, bx2):
    if not sphere:
        return np.hypot(bx1 - ax1, bx2 - ax2)
    p1 = ax2 * DEG
    p2 = bx2 * DEG
    sdp = np.sin(0.5 * (p2 - p1))
    sdl = np.sin(0.5 * (bx1 - ax1) * DEG)
    h = np.minimum(sdp * sdp + np.cos(p1) * np.cos(p2) * sdl * sdl, 1.0)
    return 2.0 * radius * np.arcsin(np.sqrt(h))


def bearing_np(sphere, ax1, ax2, bx1, bx2):
    if not sphere:
        return np.arctan2(bx2 - ax2, bx1 - ax1)
    l1 = ax1 * DEG
    p1 = ax2 * DEG
    l2 = bx1 * DEG
    p2 = bx2 * DEG
    ci = np.cos(l1) * np.cos(p1)
    si = np.sin(l1) * np.cos(p1)
    cj = np.cos(l2) * np.cos(p2)
    sj = np.sin(l2) * np.cos(p2)
    num = -cj * si + ci * sj
    den = -(ci * cj + si * sj) * np.sin(p1) + (ci * ci + si * si) * np.sin(p2)
    return wrap_angle_np(0.5 * math.pi - np.arctan2(num, den))
