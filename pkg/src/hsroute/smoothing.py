"""FMA smoothing: Newton-Jacobi sweeps on the discrete Euler-Lagrange equations.

The Lagrangian is the squared time rate L̂² of moving with velocity q̇ at
speed V through the current, discretized with the trapezoid rule over a
uniform step h. Spherical routes are smoothed in locally scaled metres
around the route's mean latitude.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import _jit
from .errors import (AllLandCell, CurrentExceedsSpeed, OutOfDomain, SingularHessian,
                     SmoothingError)
from .geometry import EUCLIDEAN, Space
from .kernels import fields as KF
from .kernels import fma as KM

log = logging.getLogger(__name__)

RESAMPLE_POINTS = 201
STOP_DISPLACEMENT = 1e-12


@dataclass
class SmoothingConfig:
    iterations: int = 10_000
    fd_step: float = 1e-6
    singular_margin: Optional[float] = None  # defaults to 1e-4 * V**2

    def margin(self, V: float) -> float:
        return 1e-4 * V * V if self.singular_margin is None else self.singular_margin

    def validate(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.singular_margin is not None and not self.singular_margin > 0:
            raise ValueError("singular_margin must be positive")
        return self


@dataclass
class DiscreteRoute:
    """Points q_0..q_N, one every ``h`` time units, in the space's coordinates."""

    points: np.ndarray
    h: float
    space: Space = EUCLIDEAN

    def __post_init__(self):
        self.points = np.array(self.points, dtype=np.float64).reshape(-1, 2)
        if self.points.shape[0] < 3:
            raise ValueError("a discrete route needs at least 3 points")
        if not self.h > 0:
            raise ValueError("h must be positive")

    @property
    def n(self) -> int:
        return self.points.shape[0] - 1

    @property
    def duration(self) -> float:
        return self.n * self.h


@dataclass
class SmoothResult:
    route: DiscreteRoute
    actions: np.ndarray
    iterations: int
    residuals: np.ndarray = dc_field(default_factory=lambda: np.empty(0))


def resample_uniform(times, points, m: int = RESAMPLE_POINTS - 1, end=None):
    """Linear resampling of a timed polyline to m + 1 equally spaced times.

    ``end`` (a point reached exactly at the last time) replaces the final sample,
    so the smoothed route is pinned to the goal itself.
    """
    times = np.asarray(times, dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)
    if end is not None:
        pts = pts.copy()
        pts[-1] = end
    tt = np.linspace(times[0], times[-1], m + 1)
    out = np.column_stack([np.interp(tt, times, pts[:, 0]), np.interp(tt, times, pts[:, 1])])
    out[0], out[-1] = pts[0], pts[-1]
    return out, (times[-1] - times[0]) / m


def from_hs_route(route, space: Space = EUCLIDEAN, goal=None, m: int = RESAMPLE_POINTS - 1) -> DiscreteRoute:
    st = route.states()
    pts, h = resample_uniform(st[:, 0], st[:, 1:3], m, goal)
    return DiscreteRoute(pts, h, space)


def _frame(route: DiscreteRoute):
    """Working coordinates and scales so that field coords = q / sc."""
    if not route.space.is_sphere:
        return route.points.copy(), 1.0, 1.0
    K = route.space.params.K_m
    phi = float(np.mean(route.points[:, 1]))
    sc1, sc2 = K * math.cos(math.radians(phi)), K
    return route.points * np.array([sc1, sc2]), sc1, sc2


def _raise(code, where, iteration=None):
    if code == KM.SINGULAR:
        err = CurrentExceedsSpeed(f"V^2 - |w|^2 below the singular margin near {where}", where=where)
    elif code == KM.SINGULAR_HESSIAN:
        err = SingularHessian(f"singular Newton system at point {where}", index=where)
    elif code == KF.OUT_OF_DOMAIN:
        err = OutOfDomain(f"route leaves the field domain near {where}")
    elif code == KF.ALL_LAND:
        err = AllLandCell(f"route enters an all-land cell near {where}")
    else:
        err = SmoothingError(f"kernel code {code}", iteration, None)
    if iteration is None:
        raise err
    raise SmoothingError(f"sweep {iteration} failed: {err}", iteration, err) from err


def lagrangian_hat(q, qdot, V: float, field, margin: Optional[float] = None) -> float:
    """Time per unit parameter to move with velocity ``qdot`` at ``q`` (plane units)."""
    m = 1e-4 * V * V if margin is None else margin
    val, code = KM.lhat(float(q[0]), float(q[1]), float(qdot[0]), float(qdot[1]), float(V), m,
                        1.0, 1.0, *field.packed())
    if code != KF.OK:
        _raise(code, tuple(q))
    return float(val)


def discrete_lagrangian(q0, q1, h: float, V: float, field, margin: Optional[float] = None) -> float:
    m = 1e-4 * V * V if margin is None else margin
    val, code = KM.ld(float(q0[0]), float(q0[1]), float(q1[0]), float(q1[1]), float(h), float(V), m,
                      1.0, 1.0, *field.packed())
    if code != KF.OK:
        _raise(code, (tuple(q0), tuple(q1)))
    return float(val)


def discrete_action(route: DiscreteRoute, V: float, field, margin: Optional[float] = None) -> float:
    m = 1e-4 * V * V if margin is None else margin
    P, sc1, sc2 = _frame(route)
    val, code = KM.action(P, route.h, float(V), m, sc1, sc2, *field.packed())
    if code != KF.OK:
        _raise(code, "route")
    return float(val)


def _newton(route, V, field, cfg: SmoothingConfig):
    P, sc1, sc2 = _frame(route)
    r = KM.newton_np(P, route.h, float(V), cfg.margin(V), cfg.fd_step, sc1, sc2, *field.packed())
    bad = np.nonzero(r[7] != KF.OK)[0]
    if bad.size:
        _raise(int(r[7][bad[0]]), int(bad[0]) + 1)
    return P, sc1, sc2, r


def del_residual(route: DiscreteRoute, k: int, V: float, field,
                 cfg: Optional[SmoothingConfig] = None) -> np.ndarray:
    """D2 Ld(q_{k-1}, q_k) + D1 Ld(q_k, q_{k+1}) by central differences."""
    if not 1 <= k <= route.n - 1:
        raise IndexError(f"k={k} is not an interior index")
    cfg = cfg or SmoothingConfig()
    P, sc1, sc2 = _frame(route)
    r = KM.newton_point(P, k, route.h, float(V), cfg.margin(V), cfg.fd_step, sc1, sc2, *field.packed())
    if r[7] not in (KF.OK, KM.SINGULAR_HESSIAN):
        _raise(r[7], k)
    return np.array([r[0], r[1]])


def residual_norm(route: DiscreteRoute, V: float, field, cfg: Optional[SmoothingConfig] = None) -> float:
    """Max-norm of the DEL residual over interior points."""
    cfg = cfg or SmoothingConfig()
    P, sc1, sc2 = _frame(route)
    r = KM.newton_np(P, route.h, float(V), cfg.margin(V), cfg.fd_step, sc1, sc2, *field.packed())
    return float(np.max(np.hypot(r[0], r[1]), initial=0.0))


def newton_jacobi_sweep(route: DiscreteRoute, V: float, field,
                        cfg: Optional[SmoothingConfig] = None) -> DiscreteRoute:
    """One Jacobi sweep: every interior point takes its own 2x2 Newton step."""
    cfg = cfg or SmoothingConfig()
    P, sc1, sc2, r = _newton(route, V, field, cfg)
    Q = P.copy()
    Q[1:-1, 0] += r[5]
    Q[1:-1, 1] += r[6]
    out = Q / np.array([sc1, sc2])
    out[0], out[-1] = route.points[0], route.points[-1]
    return DiscreteRoute(out, route.h, route.space)


def smooth(route: DiscreteRoute, cfg: SmoothingConfig, V: float, field) -> SmoothResult:
    """Run up to ``cfg.iterations`` sweeps, stopping once no point moves more than 1e-12."""
    cfg.validate()
    if cfg.iterations == 0:
        return SmoothResult(route, np.array([discrete_action(route, V, field, cfg.margin(V))]), 0)
    P, sc1, sc2 = _frame(route)
    args = (P, route.h, float(V), cfg.margin(V), cfg.fd_step, sc1, sc2, int(cfg.iterations),
            STOP_DISPLACEMENT, *field.packed())
    loop = KM.smooth_loop if _jit.USE_NUMBA else KM.smooth_loop_np
    Q, actions, code, it, k = loop(*args)
    if code != KF.OK:
        _raise(int(code), k if k >= 0 else "route", it)
    pts = Q / np.array([sc1, sc2])
    pts[0], pts[-1] = route.points[0], route.points[-1]
    log.debug("smoothing: %d sweeps, action %.6g -> %.6g", it, actions[0], actions[-1])
    return SmoothResult(DiscreteRoute(pts, route.h, route.space), np.asarray(actions), int(it))
