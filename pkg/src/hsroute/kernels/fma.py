"""Newton-Jacobi kernels for the squared time-rate discrete Lagrangian.

Route points live in (possibly scaled) plane coordinates; the current is
sampled at ``(q1 / sc1, q2 / sc2)``. All derivatives are central finite
differences with step ``fd_step * max(1, |q_k|)``.
"""
import math

import numpy as np

from .._jit import njit
from .fields import OK, eval_velocity, eval_velocity_np

SINGULAR = 5
SINGULAR_HESSIAN = 6
DET_MIN = 1e-12


@njit
def lhat(q1, q2, v1, v2, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask):
    """Time rate for velocity (v1, v2) at q, as (value, code)."""
    w1, w2, code = eval_velocity(kind, params, gx1, gx2, gu, gv, gmask, q1 / sc1, q2 / sc2)
    if code != OK:
        return 0.0, code
    den = V * V - (w1 * w1 + w2 * w2)
    if den < margin:
        return 0.0, SINGULAR
    x2 = v1 * v1 + v2 * v2
    vw = v1 * w1 + v2 * w2
    root = math.sqrt(vw * vw + den * x2)
    if vw >= 0.0:
        if x2 == 0.0:
            return 0.0, OK
        return x2 / (root + vw), OK
    return (root - vw) / den, OK


@njit
def ld(a1, a2, b1, b2, h, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask):
    v1 = (b1 - a1) / h
    v2 = (b2 - a2) / h
    la, ca = lhat(a1, a2, v1, v2, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask)
    if ca != OK:
        return 0.0, ca
    lb, cb = lhat(b1, b2, v1, v2, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask)
    if cb != OK:
        return 0.0, cb
    return 0.5 * h * (la * la + lb * lb), OK


@njit
def _local(P, k, y1, y2, h, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask):
    # Ld(q_{k-1}, y) + Ld(y, q_{k+1})
    a, ca = ld(P[k - 1, 0], P[k - 1, 1], y1, y2, h, V, margin, sc1, sc2,
               kind, params, gx1, gx2, gu, gv, gmask)
    if ca != OK:
        return 0.0, ca
    b, cb = ld(y1, y2, P[k + 1, 0], P[k + 1, 1], h, V, margin, sc1, sc2,
               kind, params, gx1, gx2, gu, gv, gmask)
    if cb != OK:
        return 0.0, cb
    return a + b, OK


@njit
def action(P, h, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask):
    tot = 0.0
    for k in range(P.shape[0] - 1):
        v, c = ld(P[k, 0], P[k, 1], P[k + 1, 0], P[k + 1, 1], h, V, margin, sc1, sc2,
                  kind, params, gx1, gx2, gu, gv, gmask)
        if c != OK:
            return 0.0, c
        tot += v
    return tot, OK


@njit
def newton_point(P, k, h, V, margin, fd_step, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask):
    """Residual F, Hessian DF and Newton step at interior point k.

    Returns (f1, f2, h11, h12, h22, d1, d2, code).
    """
    q1 = P[k, 0]
    q2 = P[k, 1]
    e = fd_step * max(1.0, math.hypot(q1, q2))
    f = (kind, params, gx1, gx2, gu, gv, gmask)
    s00, c = _local(P, k, q1, q2, h, V, margin, sc1, sc2, *f)
    if c != OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, c
    sp1, c1 = _local(P, k, q1 + e, q2, h, V, margin, sc1, sc2, *f)
    sm1, c2 = _local(P, k, q1 - e, q2, h, V, margin, sc1, sc2, *f)
    sp2, c3 = _local(P, k, q1, q2 + e, h, V, margin, sc1, sc2, *f)
    sm2, c4 = _local(P, k, q1, q2 - e, h, V, margin, sc1, sc2, *f)
    spp1, c5 = _local(P, k, q1 + 2.0 * e, q2, h, V, margin, sc1, sc2, *f)
    smm1, c6 = _local(P, k, q1 - 2.0 * e, q2, h, V, margin, sc1, sc2, *f)
    spp2, c7 = _local(P, k, q1, q2 + 2.0 * e, h, V, margin, sc1, sc2, *f)
    smm2, c8 = _local(P, k, q1, q2 - 2.0 * e, h, V, margin, sc1, sc2, *f)
    spp, c9 = _local(P, k, q1 + e, q2 + e, h, V, margin, sc1, sc2, *f)
    spm, c10 = _local(P, k, q1 + e, q2 - e, h, V, margin, sc1, sc2, *f)
    smp, c11 = _local(P, k, q1 - e, q2 + e, h, V, margin, sc1, sc2, *f)
    smm, c12 = _local(P, k, q1 - e, q2 - e, h, V, margin, sc1, sc2, *f)
    for cc in (c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12):
        if cc != OK:
            return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, cc
    f1 = (sp1 - sm1) / (2.0 * e)
    f2 = (sp2 - sm2) / (2.0 * e)
    e4 = 4.0 * e * e
    h11 = (spp1 - 2.0 * s00 + smm1) / e4
    h22 = (spp2 - 2.0 * s00 + smm2) / e4
    h12 = (spp - spm - smp + smm) / e4
    det = h11 * h22 - h12 * h12
    if abs(det) < DET_MIN:
        return f1, f2, h11, h12, h22, 0.0, 0.0, SINGULAR_HESSIAN
    d1 = -(h22 * f1 - h12 * f2) / det
    d2 = -(-h12 * f1 + h11 * f2) / det
    return f1, f2, h11, h12, h22, d1, d2, OK


@njit
def sweep(P, out, h, V, margin, fd_step, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask):
    """One Jacobi sweep from snapshot P into out. Returns (code, k, max_disp)."""
    n = P.shape[0]
    out[0, 0] = P[0, 0]
    out[0, 1] = P[0, 1]
    out[n - 1, 0] = P[n - 1, 0]
    out[n - 1, 1] = P[n - 1, 1]
    big = 0.0
    for k in range(1, n - 1):
        r = newton_point(P, k, h, V, margin, fd_step, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask)
        if r[7] != OK:
            return r[7], k, big
        out[k, 0] = P[k, 0] + r[5]
        out[k, 1] = P[k, 1] + r[6]
        disp = math.hypot(r[5], r[6])
        if disp > big:
            big = disp
    return OK, -1, big


@njit
def smooth_loop(P0, h, V, margin, fd_step, sc1, sc2, iterations, tol,
                kind, params, gx1, gx2, gu, gv, gmask):
    """Repeated sweeps; returns (P, actions, code, iteration, k)."""
    P = P0.copy()
    Q = P0.copy()
    actions = np.empty(iterations + 1)
    a, c = action(P, h, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask)
    if c != OK:
        return P, actions[:0], c, 0, -1
    actions[0] = a
    for it in range(iterations):
        c, k, big = sweep(P, Q, h, V, margin, fd_step, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask)
        if c != OK:
            return P, actions[: it + 1], c, it, k
        a, c = action(Q, h, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask)
        if c != OK:
            return P, actions[: it + 1], c, it, -1
        P, Q = Q, P
        actions[it + 1] = a
        if big < tol:
            return P, actions[: it + 2], OK, it + 1, -1
    return P, actions, OK, iterations, -1


# ------------------------------------------------------------ vectorized

def lhat_np(q1, q2, v1, v2, V, margin, sc1, sc2, kind, params, gx1, gx2, gu, gv, gmask):
    w1, w2, code = eval_velocity_np(kind, params, gx1, gx2, gu, gv, gmask, q1 / sc1, q2 / sc2)
    den = V * V - (w1 * w1 + w2 * w2)
    code = np.where((code == OK) & (den < margin), SINGULAR, code)
    x2 = v1 * v1 + v2 * v2
    vw = v1 * w1 + v2 * w2
    root = np.sqrt(np.maximum(vw * vw + den * x2, 0.0))
    pos = vw >= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x2 == 0.0, 0.0, x2 / (root + vw))
        b = (root - vw) / den
    val = np.where(pos, a, b)
    return np.where(code == OK, val, 0.0), code


def ld_np(a1, a2, b1, b2, h, V, margin, sc1, sc2, *f):
    v1 = (b1 - a1) / h
    v2 = (b2 - a2) / h
    la, ca = lhat_np(a1, a2, v1, v2, V, margin, sc1, sc2, *f)
    lb, cb = lhat_np(b1, b2, v1, v2, V, margin, sc1, sc2, *f)
    code = np.where(ca != OK, ca, cb)
    return 0.5 * h * (la * la + lb * lb), code


def action_np(P, h, V, margin, sc1, sc2, *f):
    v, c = ld_np(P[:-1, 0], P[:-1, 1], P[1:, 0], P[1:, 1], h, V, margin, sc1, sc2, *f)
    bad = np.nonzero(c != OK)[0]
    if bad.size:
        return 0.0, int(c[bad[0]])
    tot = 0.0
    for x in v:  # sequential sum, matches the scalar kernel
        tot += x
    return tot, OK


def newton_np(P, h, V, margin, fd_step, sc1, sc2, *f):
    """Vectorized ``newton_point`` over all interior points."""
    pa = P[:-2]
    pb = P[2:]
    q1 = P[1:-1, 0]
    q2 = P[1:-1, 1]
    e = fd_step * np.maximum(1.0, np.hypot(q1, q2))
    codes = []

    def local(y1, y2):
        a, ca = ld_np(pa[:, 0], pa[:, 1], y1, y2, h, V, margin, sc1, sc2, *f)
        b, cb = ld_np(y1, y2, pb[:, 0], pb[:, 1], h, V, margin, sc1, sc2, *f)
        codes.append(np.where(ca != OK, ca, cb))
        return a + b

    s00 = local(q1, q2)
    sp1 = local(q1 + e, q2)
    sm1 = local(q1 - e, q2)
    sp2 = local(q1, q2 + e)
    sm2 = local(q1, q2 - e)
    spp1 = local(q1 + 2.0 * e, q2)
    smm1 = local(q1 - 2.0 * e, q2)
    spp2 = local(q1, q2 + 2.0 * e)
    smm2 = local(q1, q2 - 2.0 * e)
    spp = local(q1 + e, q2 + e)
    spm = local(q1 + e, q2 - e)
    smp = local(q1 - e, q2 + e)
    smm = local(q1 - e, q2 - e)
    code = np.full(q1.shape, OK, dtype=np.int64)
    for c in codes:
        code = np.where(code != OK, code, c)
    f1 = (sp1 - sm1) / (2.0 * e)
    f2 = (sp2 - sm2) / (2.0 * e)
    e4 = 4.0 * e * e
    h11 = (spp1 - 2.0 * s00 + smm1) / e4
    h22 = (spp2 - 2.0 * s00 + smm2) / e4
    h12 = (spp - spm - smp + smm) / e4
    det = h11 * h22 - h12 * h12
    code = np.where((code == OK) & (np.abs(det) < DET_MIN), SINGULAR_HESSIAN, code)
    sdet = np.where(code == OK, det, 1.0)
    d1 = -(h22 * f1 - h12 * f2) / sdet
    d2 = -(-h12 * f1 + h11 * f2) / sdet
    return f1, f2, h11, h12, h22, d1, d2, code


def smooth_loop_np(P0, h, V, margin, fd_step, sc1, sc2, iterations, tol, *f):
    P = np.array(P0, dtype=np.float64, copy=True)
    actions = [0.0]
    a, c = action_np(P, h, V, margin, sc1, sc2, *f)
    if c != OK:
        return P, np.empty(0), c, 0, -1
    actions[0] = a
    for it in range(iterations):
        r = newton_np(P, h, V, margin, fd_step, sc1, sc2, *f)
        code = r[7]
        bad = np.nonzero(code != OK)[0]
        if bad.size:
            return P, np.array(actions), int(code[bad[0]]), it, int(bad[0]) + 1
        Q = P.copy()
        Q[1:-1, 0] = P[1:-1, 0] + r[5]
        Q[1:-1, 1] = P[1:-1, 1] + r[6]
        a, c = action_np(Q, h, V, margin, sc1, sc2, *f)
        if c != OK:
            return P, np.array(actions), c, it, -1
        P = Q
        actions.append(a)
        if np.max(np.hypot(r[5], r[6]), initial=0.0) < tol:
            return P, np.array(actions), OK, it + 1, -1
    return P, np.array(actions), OK, iterations, -1
