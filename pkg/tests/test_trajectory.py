import numpy as np
import pytest

from curveflow.errors import DegenerateTrajectoryError, ShapeError
from curveflow.schedules import LinearSchedule, TrigSchedule
from curveflow.trajectory import (cross_magnitude, curvature, interpolate,
                                  speed_squared, target_velocity)
from test_schedule import random_neural

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def test_interpolate_boundaries_and_midpoint():
    lin = LinearSchedule()
    x0 = np.array([2.0, -1.0])
    eps = np.array([0.5, 3.0])
    assert np.array_equal(interpolate(lin, x0, eps, 0.0), x0)
    assert np.array_equal(interpolate(lin, x0, eps, 1.0), eps)
    assert np.array_equal(interpolate(lin, E1, E2, 0.5), np.array([0.5, 0.5]))


def test_interpolate_shape_mismatch():
    with pytest.raises(ShapeError):
        interpolate(LinearSchedule(), np.zeros(2), np.zeros(3), 0.5)


def test_target_velocity_linear_is_difference():
    lin = LinearSchedule()
    x0 = np.array([1.0, 2.0])
    eps = np.array([-3.0, 0.5])
    for t in (0.0, 0.25, 0.9):
        assert np.array_equal(target_velocity(lin, x0, eps, t), eps - x0)
    # coincident endpoints: u = (da + db) x0 = 0 for the linear schedule
    assert np.array_equal(target_velocity(lin, x0, x0, 0.4), np.zeros(2))


def test_target_velocity_trig_midpoint():
    u = target_velocity(TrigSchedule(), E1, E2, 0.5)
    expected = (np.pi / 2) * np.sin(np.pi / 4)
    assert np.allclose(u, [-expected, expected], atol=1e-9)
    assert np.allclose(np.abs(u), 1.110721, atol=1e-6)


def test_cross_magnitude_cases():
    assert cross_magnitude(E1, E2) == 1.0
    assert cross_magnitude(np.array([1.0, 2.0]), np.array([2.0, 4.0])) == 0.0
    assert abs(cross_magnitude(np.array([1.0, 2.0]), np.array([3.0, 4.0])) - 2.0) < 1e-12


def test_cross_magnitude_symmetry_and_shear_invariance():
    rng = np.random.default_rng(0)
    for _ in range(100):
        dim = rng.integers(2, 6)
        x0 = rng.standard_normal(dim)
        eps = rng.standard_normal(dim)
        c = rng.normal()
        assert abs(cross_magnitude(x0, eps) - cross_magnitude(eps, x0)) < 1e-9
        assert abs(cross_magnitude(x0, eps + c * x0)
                   - cross_magnitude(x0, eps)) < 1e-9


def test_speed_squared_linear_constant():
    lin = LinearSchedule()
    x0 = np.array([1.0, 2.0])
    eps = np.array([0.0, -1.0])
    expected = float((eps - x0) @ (eps - x0))
    for t in (0.1, 0.5, 0.9):
        assert abs(speed_squared(lin, x0, eps, t) - expected) < 1e-12
    assert speed_squared(lin, x0, x0, 0.5) == 0.0


def test_speed_squared_trig_orthonormal():
    trig = TrigSchedule()
    for t in (0.0, 0.3, 0.7, 1.0):
        assert abs(speed_squared(trig, E1, E2, t) - (np.pi / 2) ** 2) < 1e-12


def test_linear_schedule_zero_curvature():
    lin = LinearSchedule()
    rng = np.random.default_rng(1)
    for _ in range(1000):
        dim = rng.integers(2, 9)
        x0 = rng.standard_normal(dim)
        eps = rng.standard_normal(dim)
        t = rng.random()
        assert curvature(lin, x0, eps, t).kappa < 1e-9


def test_trig_quarter_circle_curvature():
    trig = TrigSchedule()
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        cp = curvature(trig, E1, E2, t)
        assert abs(cp.kappa - 1.0) < 1e-9
        assert abs(cp.determinant - (np.pi / 2) ** 3) < 1e-9
        assert cp.cross == 1.0


def test_parallel_endpoints_zero_curvature_not_degenerate():
    lin = LinearSchedule()
    cp = curvature(lin, np.array([1.0, 1.0]), np.array([2.0, 2.0]), 0.5)
    assert cp.kappa == 0.0
    assert cp.cross == 0.0


def test_degenerate_trajectory_error():
    lin = LinearSchedule()
    x0 = np.array([1.0, 1.0])
    with pytest.raises(DegenerateTrajectoryError):
        curvature(lin, x0, x0, 0.5)  # speed identically zero


def test_curvature_point_reconstructs_formula():
    trig = TrigSchedule()
    rng = np.random.default_rng(2)
    for _ in range(50):
        x0 = rng.standard_normal(3)
        eps = rng.standard_normal(3)
        cp = curvature(trig, x0, eps, rng.random())
        rebuilt = abs(cp.determinant) * cp.cross / cp.speed ** 3
        assert abs(rebuilt - cp.kappa) <= 1e-12 * max(1.0, cp.kappa)


def test_curvature_scaling_inverse():
    trig = TrigSchedule()
    rng = np.random.default_rng(3)
    for _ in range(20):
        x0 = rng.standard_normal(2)
        eps = rng.standard_normal(2)
        t = rng.random()
        s = 0.5 + 2.0 * rng.random()
        k1 = curvature(trig, x0, eps, t).kappa
        k2 = curvature(trig, s * x0, s * eps, t).kappa
        if k1 > 1e-12:
            assert abs(k2 - k1 / s) / (k1 / s) < 1e-6


def test_neural_curvature_runs():
    sch = random_neural(5)
    cp = curvature(sch, E1, E2, 0.5)
    assert cp.kappa >= 0.0
    assert np.isfinite(cp.kappa)
