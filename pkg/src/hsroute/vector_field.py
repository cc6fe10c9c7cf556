"""Current fields: analytic synthetic benchmarks and gridded data."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import AllLandCell, NonMonotonicAxis, OutOfDomain, ShapeMismatch
from .geometry import EUCLIDEAN, Point, Space
from .kernels import fields as K

CIRCULAR_CENTER = (-3.0, -1.0)
CIRCULAR_SCALE = 0.05
FOUR_VORTICES_SCALE = 1.7
# (sign, a, b) for  -R(2,2) - R(4,4) - R(2,5) + R(5,1)
FOUR_VORTICES_TERMS = ((-1.0, 2.0, 2.0), (-1.0, 4.0, 4.0), (-1.0, 2.0, 5.0), (1.0, 5.0, 1.0))

_NO_AXIS = np.zeros(2)
_NO_GRID = np.zeros((1, 1))
_NO_MASK = np.zeros((1, 1), dtype=np.uint8)


class FieldSample(NamedTuple):
    w1: float
    w2: float


class FieldJacobian(NamedTuple):
    """Partials wij = d w_i / d x_j in the space's coordinate units."""

    w11: float
    w12: float
    w21: float
    w22: float
    one_sided: bool = False


class Field:
    kind: int
    params: np.ndarray
    space: Space = EUCLIDEAN

    def packed(self):
        return (self.kind, self.params, _NO_AXIS, _NO_AXIS, _NO_GRID, _NO_GRID, _NO_MASK)

    def sample(self, p: Point) -> FieldSample:
        w1, w2, code = K.eval_velocity(*self.packed(), float(p[0]), float(p[1]))
        _raise_for(code, p)
        return FieldSample(float(w1), float(w2))

    def jacobian(self, p: Point) -> FieldJacobian:
        r = K.eval_field(*self.packed(), float(p[0]), float(p[1]))
        _raise_for(r[6], p)
        return FieldJacobian(float(r[2]), float(r[3]), float(r[4]), float(r[5]), r[6] == K.ONE_SIDED)

    def is_land(self, p: Point) -> bool:
        kind, _, gx1, gx2, _, _, gmask = self.packed()
        return bool(K.eval_land(kind, gx1, gx2, gmask, float(p[0]), float(p[1])))

    def sample_many(self, x1, x2):
        """Vectorized (w1, w2, land) over coordinate arrays; never raises."""
        w1, w2, code = K.eval_velocity_np(*self.packed(), np.asarray(x1, float), np.asarray(x2, float))
        kind, _, gx1, gx2, _, _, gmask = self.packed()
        land = K.eval_land_np(kind, gx1, gx2, gmask, x1, x2) | (code != K.OK)
        return w1, w2, land


def _raise_for(code, p):
    if code == K.OUT_OF_DOMAIN:
        raise OutOfDomain(f"point {tuple(p)} outside the grid")
    if code == K.ALL_LAND:
        raise AllLandCell(f"all corners of the cell around {tuple(p)} are land")


class AffineField(Field):
    """w = offset + matrix @ x. Covers zero, uniform, shear and circular fields."""

    kind = K.KIND_AFFINE

    def __init__(self, offset=(0.0, 0.0), matrix=((0.0, 0.0), (0.0, 0.0)), space: Space = EUCLIDEAN):
        m = np.asarray(matrix, dtype=np.float64)
        self.params = np.array([offset[0], offset[1], m[0, 0], m[0, 1], m[1, 0], m[1, 1]], dtype=np.float64)
        self.space = space

    def __repr__(self):
        return f"AffineField({self.params.tolist()})"


def zero_field(space: Space = EUCLIDEAN) -> AffineField:
    return AffineField(space=space)


def uniform_field(w1: float, w2: float, space: Space = EUCLIDEAN) -> AffineField:
    return AffineField((w1, w2), space=space)


def circular(center=CIRCULAR_CENTER, scale=CIRCULAR_SCALE) -> AffineField:
    """Clockwise rotation about ``center``: w = <s (x2 - b), -s (x1 - a)>."""
    a, b = center
    s = scale
    return AffineField((-s * b, s * a), ((0.0, s), (-s, 0.0)))


class VortexField(Field):
    """Weighted sum of vortices R(a,b) = [-(x2-b), x1-a] / (3 r^2 + 1)."""

    kind = K.KIND_VORTEX

    def __init__(self, terms, scale: float = 1.0):
        self.params = np.array([[scale * w, a, b] for w, a, b in terms], dtype=np.float64).ravel()

    def __repr__(self):
        return f"VortexField({self.params.reshape(-1, 3).tolist()})"


def four_vortices_field(scale: float = FOUR_VORTICES_SCALE) -> VortexField:
    return VortexField(FOUR_VORTICES_TERMS, scale)


class GridField(Field):
    """Bilinear field on a rectilinear grid. Arrays are indexed [x2][x1].

    Near land, interpolation weights are renormalized over the water corners.
    The Jacobian is a central difference of the interpolant with a step of
    one cell; it degrades to one-sided at the grid edge (``one_sided``).
    """

    kind = K.KIND_GRID

    def __init__(self, x1_axis, x2_axis, u, v, land_mask=None, space: Space = EUCLIDEAN):
        self.x1_axis = np.ascontiguousarray(x1_axis, dtype=np.float64)
        self.x2_axis = np.ascontiguousarray(x2_axis, dtype=np.float64)
        shape = (self.x2_axis.size, self.x1_axis.size)
        if land_mask is None:
            land_mask = np.zeros(shape, dtype=bool)
        mask = np.asarray(land_mask, dtype=bool)
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        if u.shape != shape or v.shape != shape or mask.shape != shape:
            raise ShapeMismatch(f"expected arrays of shape {shape}, got u{u.shape} v{v.shape} mask{mask.shape}")
        for name, ax in (("x1_axis", self.x1_axis), ("x2_axis", self.x2_axis)):
            if ax.size < 2 or np.any(np.diff(ax) <= 0):
                raise NonMonotonicAxis(f"{name} must be strictly increasing with >= 2 entries")
        self.u = np.ascontiguousarray(np.where(mask, 0.0, u))
        self.v = np.ascontiguousarray(np.where(mask, 0.0, v))
        self.land_mask = mask
        self._mask8 = np.ascontiguousarray(mask.astype(np.uint8))
        self.space = space
        self.params = np.zeros(1)

    def packed(self):
        return (self.kind, self.params, self.x1_axis, self.x2_axis, self.u, self.v, self._mask8)

    @property
    def bounds(self):
        return (self.x1_axis[0], self.x1_axis[-1], self.x2_axis[0], self.x2_axis[-1])

    def __repr__(self):
        return f"GridField({self.x1_axis.size}x{self.x2_axis.size}, space={type(self.space).__name__})"


_CIRCULAR = circular()
_FOUR_VORTICES = four_vortices_field()

BUILTIN_FIELDS = {
    "circular": circular,
    "four_vortices": four_vortices_field,
    "zero": zero_field,
}


def circular_field(p: Point) -> FieldSample:
    return _CIRCULAR.sample(p)


def four_vortices(p: Point) -> FieldSample:
    return _FOUR_VORTICES.sample(p)


def grid_sample(f: GridField, p: Point) -> FieldSample:
    return f.sample(p)


def jacobian(field: Field, p: Point) -> FieldJacobian:
    return field.jacobian(p)


def is_land(field: Field, p: Point) -> bool:
    return field.is_land(p)
