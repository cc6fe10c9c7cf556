"""Time-optimal vessel routing through ocean currents.

Hybrid Search shoots fans of Zermelo trajectories toward the goal and chains
the winners into a piecewise-optimal route; FMA smoothing then relaxes that
route towards a solution of the discrete Euler-Lagrange equations.
"""
from ._jit import backend_name
from .errors import *  # noqa: F401,F403
from .geometry import EUCLIDEAN, SPHERE, Euclidean, SphereParams, Spherical, bearing, distance, geodesic_path
from .vector_field import (AffineField, GridField, VortexField, circular, four_vortices_field, uniform_field,
                           zero_field)
from .dynamics import TrajectoryState, ZermeloRHS, integrate_leg, rk4_step
from .hybrid_search import HSConfig, Route, ShotTrajectory, Status, hybrid_search
from .smoothing import DiscreteRoute, SmoothingConfig, from_hs_route, smooth
from .route_analysis import PathMetrics, VesselSpec, fuel_rate, path_travel_time, route_metrics
from .pipeline import plan, run_benchmark

__version__ = "0.1.0"
