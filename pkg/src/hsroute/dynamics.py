"""Zermelo dynamics on the plane and the sphere, and the RK4 integrator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AllLandCell, IntegrationError, OutOfDomain, PoleSingularity
from .geometry import EUCLIDEAN, SphereParams, Space, Spherical, wrap_angle
from .kernels import dynamics as KD
from .kernels import fields as KF


@dataclass(frozen=True)
class TrajectoryState:
    x1: float
    x2: float
    alpha: float
    t: float = 0.0

    @property
    def pos(self):
        return (self.x1, self.x2)


def _check(code, where):
    if code == KF.OUT_OF_DOMAIN:
        raise OutOfDomain(f"field undefined at {where}")
    if code == KF.ALL_LAND:
        raise AllLandCell(f"all-land cell at {where}")
    if code == KD.POLE:
        raise PoleSingularity(f"too close to a pole at {where}")


def rhs_plane(s: TrajectoryState, V: float, field):
    """(dx1/dt, dx2/dt, dalpha/dt) on the plane."""
    d1, d2, da, code = KD.rhs(False, 1.0, s.x1, s.x2, s.alpha, V, *field.packed())
    _check(code, s.pos)
    return float(d1), float(d2), float(da)


def rhs_sphere(s: TrajectoryState, V: float, field, sp: SphereParams = SphereParams()):
    """(dlon/dt, dlat/dt, dalpha/dt) in degrees/s and rad/s; V and currents in m/s."""
    d1, d2, da, code = KD.rhs(True, sp.K_m, s.x1, s.x2, s.alpha, V, *field.packed())
    _check(code, s.pos)
    return float(d1), float(d2), float(da)


class ZermeloRHS:
    """Callable right-hand side bound to a speed, field and space."""

    def __init__(self, V: float, field, space: Space = EUCLIDEAN):
        if not V > 0:
            raise ValueError("V must be positive")
        self.V = float(V)
        self.field = field
        self.space = space

    def kernel_args(self):
        sphere, _, K = self.space.kernel_args()
        return sphere, K

    def __call__(self, s: TrajectoryState):
        if isinstance(self.space, Spherical):
            return rhs_sphere(s, self.V, self.field, self.space.params)
        return rhs_plane(s, self.V, self.field)


def rk4_step(s: TrajectoryState, dt: float, rhs: Callable) -> TrajectoryState:
    """One classical RK4 step of (x1, x2, alpha); alpha wrapped to (-pi, pi]."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if isinstance(rhs, ZermeloRHS):
        sphere, K = rhs.kernel_args()
        x1, x2, a, code = KD.rk4(sphere, K, s.x1, s.x2, s.alpha, rhs.V, dt, *rhs.field.packed())
        _check(code, s.pos)
        return TrajectoryState(float(x1), float(x2), float(a), s.t + dt)
    k1 = rhs(s)
    h = 0.5 * dt
    k2 = rhs(TrajectoryState(s.x1 + h * k1[0], s.x2 + h * k1[1], s.alpha + h * k1[2]))
    k3 = rhs(TrajectoryState(s.x1 + h * k2[0], s.x2 + h * k2[1], s.alpha + h * k2[2]))
    k4 = rhs(TrajectoryState(s.x1 + dt * k3[0], s.x2 + dt * k3[1], s.alpha + dt * k3[2]))
    inc = [dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(3)]
    return TrajectoryState(s.x1 + inc[0], s.x2 + inc[1], wrap_angle(s.alpha + inc[2]), s.t + dt)


def steps_per(tau: float, dt: float) -> int:
    """round(tau/dt), insisting tau is an integer multiple of dt."""
    n = int(round(tau / dt))
    if n < 1 or abs(n * dt - tau) > 1e-9 * max(1.0, abs(tau)):
        raise ValueError(f"tau={tau} is not a positive integer multiple of dt={dt}")
    return n


def integrate_leg(s0: TrajectoryState, tau: float, dt: float, rhs: Callable) -> list:
    """The round(tau/dt) successive RK4 states after s0 (s0 excluded)."""
    n = steps_per(tau, dt)
    if isinstance(rhs, ZermeloRHS):
        sphere, K = rhs.kernel_args()
        rows, code, k = KD.integrate(sphere, K, s0.t, s0.x1, s0.x2, s0.alpha, rhs.V, dt, n,
                                     *rhs.field.packed())
        if code != KF.OK:
            try:
                _check(code, "step %d" % k)
            except Exception as exc:
                raise IntegrationError(f"RK4 step {k} failed: {exc}", step=k, cause=exc) from exc
        return [TrajectoryState(float(r[1]), float(r[2]), float(r[3]), float(r[0])) for r in rows]
    out = []
    s = s0
    for k in range(n):
        try:
            s = rk4_step(s, dt, rhs)
        except Exception as exc:
            raise IntegrationError(f"RK4 step {k} failed: {exc}", step=k, cause=exc) from exc
        # times from the step count, not accumulated
        s = TrajectoryState(s.x1, s.x2, s.alpha, s0.t + (k + 1) * dt)
        out.append(s)
    return out


def states_array(states) -> np.ndarray:
    """Rows (t, x1, x2, alpha)."""
    return np.array([[s.t, s.x1, s.x2, s.alpha] for s in states], dtype=np.float64).reshape(-1, 4)


def ground_speed_residual(s: TrajectoryState, V: float, field) -> float:
    """| (dx/dt - w) | - V on the plane; zero up to rounding."""
    d1, d2, _ = rhs_plane(s, V, field)
    w = field.sample(s.pos)
    return math.hypot(d1 - w.w1, d2 - w.w2) - V
