"""Zermelo right-hand sides, RK4, and fan evolution with stopping rules.

State rows are ``(t, x1, x2, alpha)``. On the sphere x1/x2 are degrees,
``K`` is metres per degree, speeds are m/s and time is seconds; alpha is
always radians, east-referenced counterclockwise.
"""
import math

import numpy as np

from .._jit import njit
from .fields import OK, eval_field, eval_field_np, eval_land, eval_land_np
from .geo import DEG, bearing, bearing_np, distance, distance_np, wrap_angle, wrap_angle_np

POLE = 4
POLE_COS_MIN = 1e-6

ACTIVE = 0
REACHED = 1
DEVIATED = 2
HIT_LAND = 3

# rule 2 comparison slack, keeps the boundary inclusive under rounding
ANGLE_SLACK = 1e-12


@njit
def rhs(sphere, K, x1, x2, alpha, V, kind, params, gx1, gx2, gu, gv, gmask):
    w1, w2, j11, j12, j21, j22, code = eval_field(kind, params, gx1, gx2, gu, gv, gmask, x1, x2)
    if code != OK and code != 3:
        return 0.0, 0.0, 0.0, code
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    if not sphere:
        dal = sa * sa * j21 + sa * ca * (j11 - j22) - ca * ca * j12
        return V * ca + w1, V * sa + w2, dal, OK
    cp = math.cos(x2 * DEG)
    if cp < POLE_COS_MIN:
        return 0.0, 0.0, 0.0, POLE
    sec = 1.0 / cp
    grad = ca * (sec * j11 * sa - j12 * ca) + sa * (sec * j21 * sa - j22 * ca)
    curv = ca * math.tan(x2 * DEG) * (V + w1 * ca + w2 * sa)
    # curvature term carries kappa: heading is radians, K is per degree
    dal = (grad - DEG * curv) / K
    return (V * ca + w1) / (K * cp), (V * sa + w2) / K, dal, OK


@njit
def rk4(sphere, K, x1, x2, alpha, V, dt, kind, params, gx1, gx2, gu, gv, gmask):
    k1x, k1y, k1a, c = rhs(sphere, K, x1, x2, alpha, V, kind, params, gx1, gx2, gu, gv, gmask)
    if c != OK:
        return x1, x2, alpha, c
    h = 0.5 * dt
    k2x, k2y, k2a, c = rhs(sphere, K, x1 + h * k1x, x2 + h * k1y, alpha + h * k1a, V,
                           kind, params, gx1, gx2, gu, gv, gmask)
    if c != OK:
        return x1, x2, alpha, c
    k3x, k3y, k3a, c = rhs(sphere, K, x1 + h * k2x, x2 + h * k2y, alpha + h * k2a, V,
                           kind, params, gx1, gx2, gu, gv, gmask)
    if c != OK:
        return x1, x2, alpha, c
    k4x, k4y, k4a, c = rhs(sphere, K, x1 + dt * k3x, x2 + dt * k3y, alpha + dt * k3a, V,
                           kind, params, gx1, gx2, gu, gv, gmask)
    if c != OK:
        return x1, x2, alpha, c
    s = dt / 6.0
    nx = x1 + s * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    ny = x2 + s * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    na = alpha + s * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    return nx, ny, wrap_angle(na), OK


@njit
def integrate(sphere, K, t0, x1, x2, alpha, V, dt, nsteps, kind, params, gx1, gx2, gu, gv, gmask):
    """``nsteps`` RK4 steps; returns (rows, code, failing_step)."""
    out = np.empty((nsteps, 4))
    for k in range(nsteps):
        x1, x2, alpha, c = rk4(sphere, K, x1, x2, alpha, V, dt, kind, params, gx1, gx2, gu, gv, gmask)
        if c != OK:
            return out[:k], c, k
        out[k, 0] = t0 + (k + 1) * dt
        out[k, 1] = x1
        out[k, 2] = x2
        out[k, 3] = alpha
    return out, OK, -1


@njit(nogil=True)
def evolve_one(sphere, radius, K, t0, x0, y0, a0, gx, gy, V, dt, nsub, d, half_gd, max_checks,
               kind, params, gx1, gx2, gu, gv, gmask):
    """Evolve one shot until a stopping rule fires.

    Rule 1 (goal radius) and rule 3 (land, truncating before the first land
    state) are tested on every RK4 state; rule 2 (heading deviation) at each
    checkpoint. Returns (rows, status, checkpoint_index).
    """
    cap = 256
    buf = np.empty((cap, 4))
    buf[0, 0] = t0
    buf[0, 1] = x0
    buf[0, 2] = y0
    buf[0, 3] = a0
    n = 1
    if distance(sphere, radius, x0, y0, gx, gy) <= d:
        return buf[:1].copy(), REACHED, 0
    x = x0
    y = y0
    a = a0
    status = ACTIVE
    c = 0
    while c < max_checks:
        for s in range(nsub):
            nx, ny, na, code = rk4(sphere, K, x, y, a, V, dt, kind, params, gx1, gx2, gu, gv, gmask)
            if code != OK:
                status = HIT_LAND
                break
            reached = distance(sphere, radius, nx, ny, gx, gy) <= d
            if not reached and eval_land(kind, gx1, gx2, gmask, nx, ny):
                status = HIT_LAND
                break
            if n == cap:
                cap *= 2
                nb = np.empty((cap, 4))
                nb[:n] = buf[:n]
                buf = nb
            buf[n, 0] = t0 + n * dt
            buf[n, 1] = nx
            buf[n, 2] = ny
            buf[n, 3] = na
            n += 1
            x = nx
            y = ny
            a = na
            if reached:
                status = REACHED
                break
        c += 1
        if status != ACTIVE:
            break
        lam = bearing(sphere, x, y, gx, gy)
        if abs(wrap_angle(a - lam)) > half_gd + ANGLE_SLACK:
            status = DEVIATED
            break
    if status == ACTIVE:
        status = DEVIATED
    return buf[:n].copy(), status, c


# ------------------------------------------------------------ vectorized

def rhs_np(sphere, K, x1, x2, alpha, V, kind, params, gx1, gx2, gu, gv, gmask):
    w1, w2, j11, j12, j21, j22, code = eval_field_np(kind, params, gx1, gx2, gu, gv, gmask, x1, x2)
    code = np.where(code == 3, OK, code)
    ca = np.cos(alpha)
    sa = np.sin(alpha)
    if not sphere:
        dal = sa * sa * j21 + sa * ca * (j11 - j22) - ca * ca * j12
        dx, dy = V * ca + w1, V * sa + w2
    else:
        cp = np.cos(x2 * DEG)
        code = np.where((code == OK) & (cp < POLE_COS_MIN), POLE, code)
        cps = np.where(cp < POLE_COS_MIN, 1.0, cp)
        sec = 1.0 / cps
        grad = ca * (sec * j11 * sa - j12 * ca) + sa * (sec * j21 * sa - j22 * ca)
        curv = ca * np.tan(x2 * DEG) * (V + w1 * ca + w2 * sa)
        dal = (grad - DEG * curv) / K
        dx, dy = (V * ca + w1) / (K * cps), (V * sa + w2) / K
    bad = code != OK
    return np.where(bad, 0.0, dx), np.where(bad, 0.0, dy), np.where(bad, 0.0, dal), code


def rk4_np(sphere, K, x1, x2, alpha, V, dt, kind, params, gx1, gx2, gu, gv, gmask):
    f = (kind, params, gx1, gx2, gu, gv, gmask)
    k1x, k1y, k1a, c1 = rhs_np(sphere, K, x1, x2, alpha, V, *f)
    h = 0.5 * dt
    k2x, k2y, k2a, c2 = rhs_np(sphere, K, x1 + h * k1x, x2 + h * k1y, alpha + h * k1a, V, *f)
    k3x, k3y, k3a, c3 = rhs_np(sphere, K, x1 + h * k2x, x2 + h * k2y, alpha + h * k2a, V, *f)
    k4x, k4y, k4a, c4 = rhs_np(sphere, K, x1 + dt * k3x, x2 + dt * k3y, alpha + dt * k3a, V, *f)
    code = np.where(c1 != OK, c1, np.where(c2 != OK, c2, np.where(c3 != OK, c3, c4)))
    s = dt / 6.0
    nx = x1 + s * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    ny = x2 + s * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    na = wrap_angle_np(alpha + s * (k1a + 2.0 * k2a + 2.0 * k3a + k4a))
    return nx, ny, na, code


def evolve_fan_np(sphere, radius, K, t0, x0, y0, headings, gx, gy, V, dt, nsub, d, half_gd,
                  max_checks, kind, params, gx1, gx2, gu, gv, gmask):
    """Lockstep vectorized evolution of a whole fan; same rules as ``evolve_one``."""
    f = (kind, params, gx1, gx2, gu, gv, gmask)
    headings = np.asarray(headings, dtype=np.float64)
    N = headings.shape[0]
    x = np.full(N, float(x0))
    y = np.full(N, float(y0))
    a = headings.copy()
    status = np.full(N, ACTIVE, dtype=np.int64)
    checks = np.zeros(N, dtype=np.int64)
    lengths = np.ones(N, dtype=np.int64)
    hist = [np.stack([np.full(N, float(t0)), x, y, a], axis=1)]
    if distance(sphere, radius, x0, y0, gx, gy) <= d:
        status[:] = REACHED
    n = 0
    c = 0
    while c < max_checks and np.any(status == ACTIVE):
        for _ in range(nsub):
            idx = np.nonzero(status == ACTIVE)[0]
            if idx.size == 0:
                break
            n += 1
            nx, ny, na, code = rk4_np(sphere, K, x[idx], y[idx], a[idx], V, dt, *f)
            bad = code != OK
            reached = ~bad & (distance_np(sphere, radius, nx, ny, gx, gy) <= d)
            land = ~bad & ~reached & eval_land_np(kind, gx1, gx2, gmask, nx, ny)
            keep = ~bad & ~land
            row = np.full((N, 4), np.nan)
            ki = idx[keep]
            row[ki, 0] = t0 + n * dt
            row[ki, 1] = nx[keep]
            row[ki, 2] = ny[keep]
            row[ki, 3] = na[keep]
            hist.append(row)
            x[ki] = nx[keep]
            y[ki] = ny[keep]
            a[ki] = na[keep]
            lengths[ki] += 1
            stopped = idx[bad | land]
            status[stopped] = HIT_LAND
            checks[stopped] = c + 1
            status[idx[reached]] = REACHED
            checks[idx[reached]] = c + 1
        c += 1
        idx = np.nonzero(status == ACTIVE)[0]
        if idx.size:
            lam = bearing_np(sphere, x[idx], y[idx], gx, gy)
            dev = np.abs(wrap_angle_np(a[idx] - lam)) > half_gd + ANGLE_SLACK
            status[idx[dev]] = DEVIATED
            checks[idx] = c
    status[status == ACTIVE] = DEVIATED
    h = np.stack(hist, axis=0)
    rows = [np.ascontiguousarray(h[: lengths[k], k, :]) for k in range(N)]
    return rows, status, checks
