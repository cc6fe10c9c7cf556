"""Shared synthetic fields used across test modules."""
import numpy as np

from hsroute.geometry import SPHERE
from hsroute.vector_field import GridField


def island_grid(current=(0.1, 0.0)):
    """10 x 6 Euclidean grid with a square island in the middle."""
    x1 = np.arange(0.0, 10.0001, 0.25)
    x2 = np.arange(0.0, 6.0001, 0.25)
    X1, X2 = np.meshgrid(x1, x2)
    mask = (X1 >= 4.0) & (X1 <= 6.0) & (X2 >= 2.0) & (X2 <= 4.0)
    u = np.full(X1.shape, current[0])
    v = np.full(X1.shape, current[1])
    return GridField(x1, x2, u, v, mask)


def gyre_sphere_grid():
    """A small North-Atlantic-like gyre in m/s on a 0.5 degree grid, with one island."""
    lon = np.arange(-82.0, -25.0, 0.5)
    lat = np.arange(25.0, 45.01, 0.5)
    LON, LAT = np.meshgrid(lon, lat)
    cx, cy = -55.0, 35.0
    dx, dy = LON - cx, LAT - cy
    r2 = dx * dx + dy * dy
    amp = 1.2 * np.exp(-r2 / 120.0)
    u = -amp * dy / 10.0
    v = amp * dx / 10.0
    mask = (np.abs(LON + 64.75) <= 1.0) & (np.abs(LAT - 32.3) <= 1.0)
    return GridField(lon, lat, u, v, mask, SPHERE)
