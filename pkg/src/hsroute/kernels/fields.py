"""Current-field kernels.

A field is packed as ``(kind, params, gx1, gx2, gu, gv, gmask)`` so the same
tuple feeds the scalar numba kernels and the vectorized numpy ones.

kind 0, affine:  w = (p0, p1) + [[p2, p3], [p4, p5]] @ x
kind 1, vortices: w = sum_k p[3k] * R(x; p[3k+1], p[3k+2]),
                  R(x; a, b) = [-(x2-b), x1-a] / (3 r^2 + 1)
kind 2, grid:    bilinear over (gx1, gx2) with land-renormalized weights
"""
import numpy as np

from .._jit import njit

KIND_AFFINE = 0
KIND_VORTEX = 1
KIND_GRID = 2

OK = 0
OUT_OF_DOMAIN = 1
ALL_LAND = 2
ONE_SIDED = 3


# ---------------------------------------------------------------- scalar

@njit
def _locate(axis, x):
    n = axis.shape[0]
    if not (x >= axis[0] and x <= axis[n - 1]):
        return -1
    i = np.searchsorted(axis, x, side="right") - 1
    if i >= n - 1:
        i = n - 2
    return i


@njit
def grid_interp(gx1, gx2, gu, gv, gmask, x1, x2):
    i = _locate(gx1, x1)
    j = _locate(gx2, x2)
    if i < 0 or j < 0:
        return 0.0, 0.0, OUT_OF_DOMAIN
    tx = (x1 - gx1[i]) / (gx1[i + 1] - gx1[i])
    ty = (x2 - gx2[j]) / (gx2[j + 1] - gx2[j])
    w00 = (1.0 - tx) * (1.0 - ty)
    w10 = tx * (1.0 - ty)
    w01 = (1.0 - tx) * ty
    w11 = tx * ty
    if gmask[j, i]:
        w00 = 0.0
    if gmask[j, i + 1]:
        w10 = 0.0
    if gmask[j + 1, i]:
        w01 = 0.0
    if gmask[j + 1, i + 1]:
        w11 = 0.0
    tot = w00 + w10 + w01 + w11
    if tot <= 0.0:
        return 0.0, 0.0, ALL_LAND
    u = 0.0
    v = 0.0
    if w00 > 0.0:
        u += w00 * gu[j, i]
        v += w00 * gv[j, i]
    if w10 > 0.0:
        u += w10 * gu[j, i + 1]
        v += w10 * gv[j, i + 1]
    if w01 > 0.0:
        u += w01 * gu[j + 1, i]
        v += w01 * gv[j + 1, i]
    if w11 > 0.0:
        u += w11 * gu[j + 1, i + 1]
        v += w11 * gv[j + 1, i + 1]
    return u / tot, v / tot, OK


@njit
def _grid_diff(gx1, gx2, gu, gv, gmask, x1, x2, e1, e2, h, lo, hi):
    # derivative of (u, v) along (e1, e2) with step h; the stencil is clamped to
    # [lo, hi] along that axis, and a land-blocked side falls back to one-sided
    x = x1 * e1 + x2 * e2
    a = max(x - h, lo)
    b = min(x + h, hi)
    up, vp, cp = grid_interp(gx1, gx2, gu, gv, gmask, x1 + e1 * (b - x), x2 + e2 * (b - x))
    um, vm, cm = grid_interp(gx1, gx2, gu, gv, gmask, x1 + e1 * (a - x), x2 + e2 * (a - x))
    flag = OK
    if a != x - h or b != x + h:
        flag = ONE_SIDED
    if cp == OK and cm == OK and b > a:
        return (up - um) / (b - a), (vp - vm) / (b - a), flag
    u0, v0, c0 = grid_interp(gx1, gx2, gu, gv, gmask, x1, x2)
    if c0 != OK:
        return 0.0, 0.0, c0
    if cp == OK and b > x:
        return (up - u0) / (b - x), (vp - v0) / (b - x), ONE_SIDED
    if cm == OK and x > a:
        return (u0 - um) / (x - a), (v0 - vm) / (x - a), ONE_SIDED
    return 0.0, 0.0, ONE_SIDED


@njit
def eval_velocity(kind, params, gx1, gx2, gu, gv, gmask, x1, x2):
    """Current at (x1, x2) as (w1, w2, code)."""
    if kind == KIND_AFFINE:
        return (params[0] + params[2] * x1 + params[3] * x2,
                params[1] + params[4] * x1 + params[5] * x2, OK)
    if kind == KIND_VORTEX:
        w1 = 0.0
        w2 = 0.0
        for k in range(params.shape[0] // 3):
            s = params[3 * k]
            dx = x1 - params[3 * k + 1]
            dy = x2 - params[3 * k + 2]
            den = 3.0 * (dx * dx + dy * dy) + 1.0
            w1 -= s * dy / den
            w2 += s * dx / den
        return w1, w2, OK
    return grid_interp(gx1, gx2, gu, gv, gmask, x1, x2)


@njit
def eval_field(kind, params, gx1, gx2, gu, gv, gmask, x1, x2):
    """Current and Jacobian: (w1, w2, w11, w12, w21, w22, code), wij = dwi/dxj."""
    if kind == KIND_AFFINE:
        return (params[0] + params[2] * x1 + params[3] * x2,
                params[1] + params[4] * x1 + params[5] * x2,
                params[2], params[3], params[4], params[5], OK)
    if kind == KIND_VORTEX:
        w1 = 0.0
        w2 = 0.0
        j11 = 0.0
        j12 = 0.0
        j21 = 0.0
        j22 = 0.0
        for k in range(params.shape[0] // 3):
            s = params[3 * k]
            dx = x1 - params[3 * k + 1]
            dy = x2 - params[3 * k + 2]
            den = 3.0 * (dx * dx + dy * dy) + 1.0
            den2 = den * den
            w1 -= s * dy / den
            w2 += s * dx / den
            j11 += s * 6.0 * dx * dy / den2
            j12 += s * (-1.0 / den + 6.0 * dy * dy / den2)
            j21 += s * (1.0 / den - 6.0 * dx * dx / den2)
            j22 -= s * 6.0 * dx * dy / den2
        return w1, w2, j11, j12, j21, j22, OK
    w1, w2, code = grid_interp(gx1, gx2, gu, gv, gmask, x1, x2)
    if code != OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, code
    i = _locate(gx1, x1)
    j = _locate(gx2, x2)
    h1 = gx1[i + 1] - gx1[i]
    h2 = gx2[j + 1] - gx2[j]
    j11, j21, c1 = _grid_diff(gx1, gx2, gu, gv, gmask, x1, x2, 1.0, 0.0, h1, gx1[0], gx1[-1])
    j12, j22, c2 = _grid_diff(gx1, gx2, gu, gv, gmask, x1, x2, 0.0, 1.0, h2, gx2[0], gx2[-1])
    flag = OK
    if c1 != OK or c2 != OK:
        flag = ONE_SIDED
    return w1, w2, j11, j12, j21, j22, flag


@njit
def eval_land(kind, gx1, gx2, gmask, x1, x2):
    """Land test: nearest grid node masked, or outside the grid."""
    if kind != KIND_GRID:
        return False
    i = _locate(gx1, x1)
    j = _locate(gx2, x2)
    if i < 0 or j < 0:
        return True
    if x1 - gx1[i] > gx1[i + 1] - x1:
        i += 1
    if x2 - gx2[j] > gx2[j + 1] - x2:
        j += 1
    return gmask[j, i] != 0


# ------------------------------------------------------------ vectorized

def _locate_np(axis, x):
    i = np.searchsorted(axis, x, side="right") - 1
    i = np.minimum(i, axis.shape[0] - 2)
    bad = ~((x >= axis[0]) & (x <= axis[-1]))
    return np.where(bad, 0, i), bad


def grid_interp_np(gx1, gx2, gu, gv, gmask, x1, x2):
    i, bad1 = _locate_np(gx1, x1)
    j, bad2 = _locate_np(gx2, x2)
    tx = (x1 - gx1[i]) / (gx1[i + 1] - gx1[i])
    ty = (x2 - gx2[j]) / (gx2[j + 1] - gx2[j])
    w00 = np.where(gmask[j, i] != 0, 0.0, (1.0 - tx) * (1.0 - ty))
    w10 = np.where(gmask[j, i + 1] != 0, 0.0, tx * (1.0 - ty))
    w01 = np.where(gmask[j + 1, i] != 0, 0.0, (1.0 - tx) * ty)
    w11 = np.where(gmask[j + 1, i + 1] != 0, 0.0, tx * ty)
    tot = w00 + w10 + w01 + w11
    # same summation order as the scalar kernel, land terms skipped
    u = np.zeros_like(tx)
    v = np.zeros_like(tx)
    for w, jj, ii in ((w00, j, i), (w10, j, i + 1), (w01, j + 1, i), (w11, j + 1, i + 1)):
        pos = w > 0.0
        u = np.where(pos, u + w * gu[jj, ii], u)
        v = np.where(pos, v + w * gv[jj, ii], v)
    code = np.full(tx.shape, OK, dtype=np.int64)
    code[tot <= 0.0] = ALL_LAND
    code[bad1 | bad2] = OUT_OF_DOMAIN
    ok = code == OK
    safe = np.where(ok, tot, 1.0)
    return np.where(ok, u / safe, 0.0), np.where(ok, v / safe, 0.0), code


def _grid_diff_np(gx1, gx2, gu, gv, gmask, x1, x2, e1, e2, h, lo, hi):
    x = x1 * e1 + x2 * e2
    a = np.maximum(x - h, lo)
    b = np.minimum(x + h, hi)
    up, vp, cp = grid_interp_np(gx1, gx2, gu, gv, gmask, x1 + e1 * (b - x), x2 + e2 * (b - x))
    um, vm, cm = grid_interp_np(gx1, gx2, gu, gv, gmask, x1 + e1 * (a - x), x2 + e2 * (a - x))
    u0, v0, c0 = grid_interp_np(gx1, gx2, gu, gv, gmask, x1, x2)
    clamped = (a != x - h) | (b != x + h)
    central = (cp == OK) & (cm == OK) & (b > a)
    fwd = ~central & (c0 == OK) & (cp == OK) & (b > x)
    bwd = ~central & ~fwd & (c0 == OK) & (cm == OK) & (x > a)
    with np.errstate(divide="ignore", invalid="ignore"):
        du = np.where(central, (up - um) / (b - a),
                      np.where(fwd, (up - u0) / (b - x), np.where(bwd, (u0 - um) / (x - a), 0.0)))
        dv = np.where(central, (vp - vm) / (b - a),
                      np.where(fwd, (vp - v0) / (b - x), np.where(bwd, (v0 - vm) / (x - a), 0.0)))
    return du, dv, clamped | ~central


def eval_velocity_np(kind, params, gx1, gx2, gu, gv, gmask, x1, x2):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if kind == KIND_AFFINE:
        return (params[0] + params[2] * x1 + params[3] * x2,
                params[1] + params[4] * x1 + params[5] * x2,
                np.zeros(x1.shape, dtype=np.int64))
    if kind == KIND_VORTEX:
        w1 = np.zeros_like(x1)
        w2 = np.zeros_like(x1)
        for k in range(params.shape[0] // 3):
            s = params[3 * k]
            dx = x1 - params[3 * k + 1]
            dy = x2 - params[3 * k + 2]
            den = 3.0 * (dx * dx + dy * dy) + 1.0
            w1 = w1 - s * dy / den
            w2 = w2 + s * dx / den
        return w1, w2, np.zeros(x1.shape, dtype=np.int64)
    return grid_interp_np(gx1, gx2, gu, gv, gmask, x1, x2)


def eval_field_np(kind, params, gx1, gx2, gu, gv, gmask, x1, x2):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    z = np.zeros_like(x1)
    if kind == KIND_AFFINE:
        w1, w2, code = eval_velocity_np(kind, params, gx1, gx2, gu, gv, gmask, x1, x2)
        return w1, w2, z + params[2], z + params[3], z + params[4], z + params[5], code
    if kind == KIND_VORTEX:
        w1, w2, j11, j12, j21, j22 = z.copy(), z.copy(), z.copy(), z.copy(), z.copy(), z.copy()
        for k in range(params.shape[0] // 3):
            s = params[3 * k]
            dx = x1 - params[3 * k + 1]
            dy = x2 - params[3 * k + 2]
            den = 3.0 * (dx * dx + dy * dy) + 1.0
            den2 = den * den
            w1 = w1 - s * dy / den
            w2 = w2 + s * dx / den
            j11 = j11 + s * 6.0 * dx * dy / den2
            j12 = j12 + s * (-1.0 / den + 6.0 * dy * dy / den2)
            j21 = j21 + s * (1.0 / den - 6.0 * dx * dx / den2)
            j22 = j22 - s * 6.0 * dx * dy / den2
        return w1, w2, j11, j12, j21, j22, np.zeros(x1.shape, dtype=np.int64)
    w1, w2, code = grid_interp_np(gx1, gx2, gu, gv, gmask, x1, x2)
    i, _ = _locate_np(gx1, x1)
    j, _ = _locate_np(gx2, x2)
    h1 = gx1[i + 1] - gx1[i]
    h2 = gx2[j + 1] - gx2[j]
    j11, j21, f1 = _grid_diff_np(gx1, gx2, gu, gv, gmask, x1, x2, 1.0, 0.0, h1, gx1[0], gx1[-1])
    j12, j22, f2 = _grid_diff_np(gx1, gx2, gu, gv, gmask, x1, x2, 0.0, 1.0, h2, gx2[0], gx2[-1])
    ok = code == OK
    code = np.where(ok & (f1 | f2), ONE_SIDED, code)
    return (w1, w2, np.where(ok, j11, 0.0), np.where(ok, j12, 0.0),
            np.where(ok, j21, 0.0), np.where(ok, j22, 0.0), code)


def eval_land_np(kind, gx1, gx2, gmask, x1, x2):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if kind != KIND_GRID:
        return np.zeros(x1.shape, dtype=bool)
    i, bad1 = _locate_np(gx1, x1)
    j, bad2 = _locate_np(gx2, x2)
    i = np.where(x1 - gx1[i] > gx1[i + 1] - x1, i + 1, i)
    j = np.where(x2 - gx2[j] > gx2[j + 1] - x2, j + 1, j)
    return bad1 | bad2 | (gmask[j, i] != 0)
