"""Hybrid Search: cone shooting with exploration and refinement fans.

Each fan shoots ``N`` RK4 trajectories from a common point. A trajectory
stops on reaching the goal radius, on hitting land (truncated before the
first land state) or, at a checkpoint every ``tau``, when its heading strays
more than ``gamma_d / 2`` from the bearing to the goal. The fan's winner
seeds a narrower refinement fan, and the loop restarts from the refined
winner's endpoint until the goal is reached.
"""
from __future__ import annotations

import enum
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import _jit
from .errors import AllTrajectoriesDead, ConfigError, LandGoal, LandStart, RouteNotFound
from .geometry import EUCLIDEAN, Space, bearing, distance, wrap_angle
from .kernels import dynamics as KD

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class Status(enum.IntEnum):
    ACTIVE = KD.ACTIVE
    REACHED_GOAL = KD.REACHED
    DEVIATED = KD.DEVIATED
    HIT_LAND = KD.HIT_LAND


@dataclass
class HSConfig:
    V: float = 1.0
    N: int = 21
    gamma: float = math.pi
    gamma_d: float = math.pi / 2
    gamma_b: float = math.pi / 5
    dt: float = 0.01
    tau: float = 0.1
    d: float = 0.1
    max_outer: int = 200
    max_checkpoints: int = 100_000
    workers: int = 1

    @classmethod
    def synthetic(cls, **kw):
        """Defaults for the unit-speed synthetic benchmarks."""
        return cls(**kw)

    @classmethod
    def spherical(cls, **kw):
        """Defaults for real currents: seconds, m/s and km."""
        base = dict(V=6.0, dt=600.0, tau=7200.0, d=10.0)
        base.update(kw)
        return cls(**base)

    def validate(self):
        if not self.V > 0:
            raise ConfigError("V must be positive")
        if self.N < 2:
            raise ConfigError("N must be >= 2")
        if not 0 < self.gamma_b <= self.gamma <= TWO_PI:
            raise ConfigError("need 0 < gamma_b <= gamma <= 2*pi")
        if not 0 < self.gamma_d:
            raise ConfigError("gamma_d must be positive")
        if self.gamma_d > self.gamma:
            warnings.warn("gamma_d exceeds gamma; trajectories outside the cone are never culled early", stacklevel=2)
        if not self.d > 0:
            raise ConfigError("d must be positive")
        if not self.dt > 0 or self.tau < self.dt:
            raise ConfigError("need 0 < dt <= tau")
        n = int(round(self.tau / self.dt))
        if abs(n * self.dt - self.tau) > 1e-9 * max(1.0, self.tau):
            raise ConfigError(f"tau={self.tau} must be an integer multiple of dt={self.dt}")
        if self.max_outer < 1 or self.max_checkpoints < 1 or self.workers < 1:
            raise ConfigError("max_outer, max_checkpoints and workers must be >= 1")
        spacing = self.gamma / (self.N - 1)
        if self.gamma_b > 2.0 * spacing:
            warnings.warn(f"refinement cone {self.gamma_b:.4g} is wider than twice the exploration "
                          f"spacing {spacing:.4g}", stacklevel=2)
        return self

    @property
    def steps_per_check(self) -> int:
        return int(round(self.tau / self.dt))

    def updated(self, **kw):
        names = {f.name for f in fields(self)}
        bad = set(kw) - names
        if bad:
            raise ConfigError(f"unknown HS parameters: {sorted(bad)}")
        return replace(self, **kw)


@dataclass
class ShotTrajectory:
    """One shot of a fan; ``states`` rows are (t, x1, x2, alpha)."""

    states: np.ndarray
    status: Status
    shoot_index: int
    checkpoints: int = 0

    @property
    def start(self):
        return self.states[0]

    @property
    def end(self):
        return self.states[-1]

    @property
    def initial_heading(self) -> float:
        return float(self.states[0, 3])

    @property
    def reached(self) -> bool:
        return self.status == Status.REACHED_GOAL


@dataclass
class Route:
    legs: list = field(default_factory=list)
    reached: bool = False

    @property
    def total_time(self) -> float:
        return float(self.legs[-1].states[-1, 0]) if self.legs else 0.0

    def states(self) -> np.ndarray:
        """Concatenated rows, junction duplicates dropped."""
        if not self.legs:
            return np.empty((0, 4))
        parts = [self.legs[0].states] + [leg.states[1:] for leg in self.legs[1:]]
        return np.concatenate(parts, axis=0)

    def leg_boundaries(self) -> list:
        """Row indices (into ``states()``) at which each leg starts."""
        out = [0]
        for leg in self.legs[:-1]:
            out.append(out[-1] + leg.states.shape[0] - 1)
        return out


def shoot_fan(center_angle: float, amplitude: float, N: int) -> np.ndarray:
    """N headings evenly over [c - a/2, c + a/2]; a full circle drops the duplicate seam."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if amplitude >= TWO_PI - 1e-12:
        raw = np.linspace(center_angle - math.pi, center_angle + math.pi, N + 1)[1:]
    else:
        raw = np.linspace(center_angle - 0.5 * amplitude, center_angle + 0.5 * amplitude, N)
    return wrap_angle(raw)


def stop_check(states, goal, cfg: HSConfig, field, space: Space = EUCLIDEAN, checkpoint=True):
    """Apply the stopping rules to the states produced since the last check.

    ``states`` rows are (t, x1, x2, alpha); the first row is the last already
    accepted state. Returns ``(status, keep)`` where ``keep`` is the number of
    leading rows to retain. Goal radius and land are tested on every new row
    (goal wins when both hold on the same row); the heading rule is applied to
    the last retained row only when ``checkpoint`` is set.
    """
    states = np.asarray(states, dtype=np.float64)
    n = states.shape[0]
    for k in range(1, n):
        p = states[k, 1:3]
        if distance(space, p, goal) <= cfg.d:
            return Status.REACHED_GOAL, k + 1
        if field.is_land(p):
            return Status.HIT_LAND, k
    if n == 1 and distance(space, states[0, 1:3], goal) <= cfg.d:
        return Status.REACHED_GOAL, 1
    if checkpoint:
        last = states[n - 1]
        lam = bearing(space, last[1:3], goal)
        if abs(wrap_angle(last[3] - lam)) > 0.5 * cfg.gamma_d + KD.ANGLE_SLACK:
            return Status.DEVIATED, n
    return Status.ACTIVE, n


def select_winner(shots, goal, space: Space = EUCLIDEAN):
    """Earliest arrival among goal-reaching shots, else the one ending closest to the goal.

    Ties go to the lowest position in ``shots``.
    """
    reached = [s for s in shots if s.reached]
    if reached:
        return min(enumerate(reached), key=lambda e: (float(e[1].states[-1, 0]), e[0]))[1]
    return min(enumerate(shots),
               key=lambda e: (distance(space, e[1].states[-1, 1:3], goal), e[0]))[1]


def _evolve(start_state, headings, goal, cfg: HSConfig, field, space: Space):
    sphere, radius, K = space.kernel_args()
    t0, x0, y0 = (float(v) for v in start_state[:3])
    gx, gy = float(goal[0]), float(goal[1])
    packed = field.packed()
    common = (cfg.V, cfg.dt, cfg.steps_per_check, cfg.d, 0.5 * cfg.gamma_d, cfg.max_checkpoints)
    if not _jit.USE_NUMBA:
        rows, status, checks = KD.evolve_fan_np(sphere, radius, K, t0, x0, y0, headings, gx, gy,
                                                *common, *packed)
        return [ShotTrajectory(r, Status(int(s)), i, int(c))
                for i, (r, s, c) in enumerate(zip(rows, status, checks))]

    def one(i):
        r, s, c = KD.evolve_one(sphere, radius, K, t0, x0, y0, float(headings[i]), gx, gy,
                                *common, *packed)
        return ShotTrajectory(r, Status(int(s)), i, int(c))

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(one, range(len(headings))))
    return [one(i) for i in range(len(headings))]


def run_fan(start_state, goal, center_angle, amplitude, cfg: HSConfig, field, space: Space = EUCLIDEAN):
    """Shoot and evolve one fan; returns every shot (ordered by shoot index)."""
    headings = shoot_fan(center_angle, amplitude, cfg.N)
    shots = _evolve(start_state, headings, goal, cfg, field, space)
    if all(s.status == Status.HIT_LAND and s.states.shape[0] == 1 for s in shots):
        raise AllTrajectoriesDead(f"every trajectory from {tuple(start_state[1:3])} hits land at once")
    return shots


def explore(start_state, goal, cfg: HSConfig, field, space: Space = EUCLIDEAN,
            center_angle=None, amplitude=None):
    """Exploration fan centred on the bearing to the goal. Returns (winner, shots)."""
    if center_angle is None:
        center_angle = bearing(space, start_state[1:3], goal)
    if amplitude is None:
        amplitude = cfg.gamma
    shots = run_fan(start_state, goal, center_angle, amplitude, cfg, field, space)
    return select_winner(shots, goal, space), shots


def refine(winner: ShotTrajectory, goal, cfg: HSConfig, field, space: Space = EUCLIDEAN):
    """Narrow fan of amplitude gamma_b around the winner's initial heading.

    The better of the refined winner and ``winner`` is returned (same
    selection rule; ``winner`` wins ties).
    """
    shots = run_fan(winner.states[0], goal, winner.initial_heading, cfg.gamma_b, cfg, field, space)
    best = select_winner(shots, goal, space)
    return select_winner([winner, best], goal, space), shots


def hybrid_search(start, goal, cfg: HSConfig, field, space: Space = EUCLIDEAN, t0: float = 0.0,
                  on_leg=None) -> Route:
    """Alternate exploration and refinement until a shot reaches the goal.

    Raises ``RouteNotFound`` (with the partial route attached) after
    ``cfg.max_outer`` alternations.
    """
    cfg.validate()
    start = (float(start[0]), float(start[1]))
    goal = (float(goal[0]), float(goal[1]))
    if field.is_land(goal):
        raise LandGoal(f"goal {goal} is on land")
    if field.is_land(start):
        raise LandStart(f"start {start} is on land")
    route = Route()
    state = np.array([t0, start[0], start[1], 0.0])
    if distance(space, start, goal) <= cfg.d:
        route.legs.append(ShotTrajectory(state[None, :].copy(), Status.REACHED_GOAL, 0))
        route.reached = True
        return route
    for outer in range(cfg.max_outer):
        ex, _ = explore(state, goal, cfg, field, space)
        best, _ = refine(ex, goal, cfg, field, space)
        route.legs.append(best)
        if on_leg is not None:
            on_leg(outer, best)
        log.debug("leg %d: status=%s end=%s", outer, best.status.name, best.states[-1])
        if best.reached:
            route.reached = True
            return route
        state = best.states[-1].copy()
    raise RouteNotFound(f"goal not reached after {cfg.max_outer} alternations", route=route)
