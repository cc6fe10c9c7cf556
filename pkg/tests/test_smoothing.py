import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hsroute.errors import CurrentExceedsSpeed, SmoothingError
from hsroute.geometry import EUCLIDEAN
from hsroute.hybrid_search import HSConfig, hybrid_search
from hsroute.smoothing import (DiscreteRoute, SmoothingConfig, del_residual, discrete_action,
                               discrete_lagrangian, from_hs_route, lagrangian_hat, newton_jacobi_sweep,
                               residual_norm, resample_uniform, smooth)
from hsroute.vector_field import uniform_field, zero_field

finite = st.floats(-3, 3)


def test_lhat_examples():
    assert lagrangian_hat((0, 0), (2.0, 0.0), 1.0, zero_field()) == pytest.approx(2.0)
    assert lagrangian_hat((0, 0), (1.5, 0.0), 1.0, uniform_field(0.5, 0.0)) == pytest.approx(1.0)
    assert lagrangian_hat((0, 0), (0.0, 0.8), 1.0, uniform_field(0.6, 0.0)) == pytest.approx(1.0)
    assert lagrangian_hat((0, 0), (0.0, 0.0), 1.0, uniform_field(0.6, 0.0)) == 0.0


@given(finite, finite, st.floats(0, 0.95), st.floats(-math.pi, math.pi))
def test_lhat_satisfies_speed_constraint(v1, v2, wmag, wang):
    # qdot = L (V u + w) with |u| = 1, so |qdot - L w| = L V
    w = (wmag * math.cos(wang), wmag * math.sin(wang))
    L = lagrangian_hat((0, 0), (v1, v2), 1.0, uniform_field(*w))
    assert L >= 0
    assert math.hypot(v1 - L * w[0], v2 - L * w[1]) == pytest.approx(L, rel=1e-9, abs=1e-12)


def test_lhat_singular():
    with pytest.raises(CurrentExceedsSpeed):
        lagrangian_hat((0, 0), (1.0, 0.0), 1.0, uniform_field(0.99999, 0.0))


def test_discrete_lagrangian_examples():
    f = zero_field()
    assert discrete_lagrangian((1, 1), (1, 1), 0.5, 1.0, f) == 0.0
    assert discrete_lagrangian((0, 0), (1, 0), 1.0, 1.0, f) == pytest.approx(1.0)


def test_discrete_lagrangian_scaling_in_h():
    f = zero_field()
    # fixed velocity: linear in h; fixed displacement: inverse in h
    u = np.array([0.6, 0.8])
    vals = [discrete_lagrangian((0, 0), h * u, h, 1.0, f) for h in (0.5, 1.0, 2.0)]
    assert vals == pytest.approx([0.5, 1.0, 2.0])
    vals = [discrete_lagrangian((0, 0), (1, 0), h, 1.0, f) for h in (0.5, 1.0, 2.0)]
    assert vals == pytest.approx([2.0, 1.0, 0.5])


def _line(n=11, a=(0.0, 0.0), b=(5.0, 2.0), h=0.5):
    s = np.linspace(0, 1, n)[:, None]
    return DiscreteRoute(np.asarray(a) + s * (np.asarray(b) - np.asarray(a)), h)


def test_residual_vanishes_on_uniform_line():
    r = _line()
    for k in range(1, r.n):
        assert np.linalg.norm(del_residual(r, k, 1.0, zero_field())) < 1e-8


def test_residual_linear_in_perturbation():
    mags = []
    for delta in (1e-3, 2e-3, 4e-3):
        r = _line()
        r.points[5, 1] += delta
        mags.append(np.linalg.norm(del_residual(r, 5, 1.0, zero_field())))
    assert mags[1] / mags[0] == pytest.approx(2.0, rel=0.02)
    assert mags[2] / mags[1] == pytest.approx(2.0, rel=0.02)


def _grad_lhat2(v, w, V=1.0):
    v, w = np.asarray(v, float), np.asarray(w, float)
    D = V * V - w @ w
    vw = v @ w
    S = math.sqrt(vw * vw + D * (v @ v))
    L = (-vw + S) / D
    g = (-w + (vw * w + D * v) / S) / D
    return 2.0 * L * g


@given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.integers(0, 10_000))
def test_residual_matches_closed_form(w1, w2, seed):
    rng = np.random.default_rng(seed)
    pts = np.cumsum(rng.uniform(0.2, 1.0, size=(3, 2)), axis=0)
    h = 0.7
    r = DiscreteRoute(pts, h)
    fd = del_residual(r, 1, 1.0, uniform_field(w1, w2))
    exact = _grad_lhat2((pts[1] - pts[0]) / h, (w1, w2)) - _grad_lhat2((pts[2] - pts[1]) / h, (w1, w2))
    assert np.allclose(fd, exact, atol=1e-6)


def test_sweep_fixed_point_and_contraction():
    r = _line()
    assert np.allclose(newton_jacobi_sweep(r, 1.0, zero_field()).points, r.points, atol=1e-9)
    p = _line()
    p.points[5, 1] += 0.05
    line_y = p.points[5, 0] * 2.0 / 5.0
    q = newton_jacobi_sweep(p, 1.0, zero_field())
    assert abs(q.points[5, 1] - line_y) < abs(p.points[5, 1] - line_y)


def test_iterations_zero_is_identity(circ):
    r = _line()
    out = smooth(r, SmoothingConfig(iterations=0), 1.0, circ)
    assert out.route is r and out.iterations == 0


def test_zero_field_converges_to_chord():
    rng = np.random.default_rng(7)
    s = np.linspace(0, 1, 50)
    pts = np.column_stack([10 * s, 2 * np.sin(math.pi * s) + 0.1 * rng.standard_normal(50) * np.sin(math.pi * s)])
    r = DiscreteRoute(pts, 0.2)
    out = smooth(r, SmoothingConfig(iterations=5000), 1.0, zero_field())
    assert np.max(np.abs(out.route.points[:, 1])) < 1e-4
    assert np.array_equal(out.route.points[0], pts[0]) and np.array_equal(out.route.points[-1], pts[-1])


@pytest.fixture(scope="module")
def circ_discrete(circ):
    route = hybrid_search((3, 2), (-7, 2), HSConfig(), circ)
    return from_hs_route(route, EUCLIDEAN, goal=(-7, 2))


def test_circular_action_monotone_and_residual_drop(circ, circ_discrete):
    out = smooth(circ_discrete, SmoothingConfig(iterations=1000), 1.0, circ)
    assert np.all(np.diff(out.actions) <= 1e-10)
    assert residual_norm(out.route, 1.0, circ) * 10 <= residual_norm(circ_discrete, 1.0, circ)
    assert np.array_equal(out.route.points[0], circ_discrete.points[0])
    assert np.array_equal(out.route.points[-1], circ_discrete.points[-1])


def test_one_sweep_lowers_four_vortices_action(fv):
    route = hybrid_search((0, 0), (6, 2), HSConfig(), fv)
    dr = from_hs_route(route, EUCLIDEAN, goal=(6, 2))
    after = newton_jacobi_sweep(dr, 1.0, fv)
    assert discrete_action(after, 1.0, fv) <= discrete_action(dr, 1.0, fv) + 1e-10


def test_smoothing_error_carries_iteration():
    # a current faster than the vessel everywhere
    with pytest.raises(SmoothingError) as exc:
        smooth(_line(), SmoothingConfig(iterations=3), 1.0, uniform_field(1.2, 0.0))
    assert exc.value.iteration == 0
    assert isinstance(exc.value.cause, CurrentExceedsSpeed)


def test_resample_uniform():
    t = np.array([0.0, 1.0, 3.0])
    p = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]])
    q, h = resample_uniform(t, p, 6, end=(1.0, 2.05))
    assert h == pytest.approx(0.5)
    # the goal replaces the last point before interpolation, stretching the final leg
    assert np.allclose(q[:4], [[0, 0], [0.5, 0], [1, 0], [1, 0.5125]])
    assert tuple(q[-1]) == (1.0, 2.05)


def test_config_validation():
    with pytest.raises(ValueError):
        SmoothingConfig(iterations=-1).validate()
    assert SmoothingConfig().margin(2.0) == pytest.approx(4e-4)
