import numpy as np
import pytest

from curveflow.engine import (evaluate_with_gradients,
                              finite_difference_gradient, max_relative_error,
                              merge_params)
from curveflow.errors import ConfigError
from curveflow.losses import (curve_fm_loss, determinant_profile,
                              robust_curvature_loss, total_loss,
                              total_loss_graph)
from curveflow.schedules import (CustomSchedule, GridSpec, LinearSchedule,
                                 TrigSchedule, grid_derivatives)
from curveflow.velocity import VelocityField
from test_schedule import random_neural

HALF_PI = np.pi / 2


class OracleModel:
    """Stand-in velocity field returning a fixed function of (z, t)."""

    def __init__(self, fn, dim=2):
        self.fn = fn
        self.dim = dim
        from curveflow.engine import ParameterSet
        self.params = ParameterSet({})

    def __call__(self, z, t, params=None):
        from curveflow.engine import value_of
        return self.fn(value_of(z), np.asarray(t))


def zero_model():
    return OracleModel(lambda z, t: np.zeros_like(z))


def test_fm_loss_zero_for_perfect_model():
    lin = LinearSchedule()
    x0 = np.array([[1.0, 0.0], [0.3, -0.2]])
    eps = np.array([[0.0, 1.0], [1.0, 0.5]])
    t = np.array([0.2, 0.7])
    perfect = OracleModel(lambda z, tt: eps - x0)
    assert curve_fm_loss((x0, eps, t), perfect, lin) == 0.0


def test_fm_loss_direct_value():
    lin = LinearSchedule()
    batch = [(np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.4)]
    assert curve_fm_loss(batch, zero_model(), lin) == 2.0
    # mean reduction: two identical samples give the same value
    batch2 = batch * 2
    assert curve_fm_loss(batch2, zero_model(), lin) == 2.0


def test_fm_loss_empty_batch():
    with pytest.raises(ConfigError):
        curve_fm_loss([], zero_model(), LinearSchedule())


def test_determinant_profile_linear_zero():
    dg = grid_derivatives(LinearSchedule(), GridSpec(100))
    assert np.allclose(determinant_profile(dg), 0.0, atol=1e-9)


def test_determinant_profile_trig_constant():
    dg = grid_derivatives(TrigSchedule(), GridSpec(1000))
    det = determinant_profile(dg)
    assert np.max(np.abs(det - HALF_PI ** 3)) < 1e-3


def test_determinant_profile_polynomial_stub():
    stub = CustomSchedule(lambda t: 1.0 - t, lambda t: t ** 2)
    dg = grid_derivatives(stub, GridSpec(50))
    assert np.allclose(determinant_profile(dg), -2.0, atol=1e-8)


def test_robust_curvature_loss_values():
    g = GridSpec(1000)
    assert robust_curvature_loss(LinearSchedule(), g, 1.0) < 1e-12
    trig = robust_curvature_loss(TrigSchedule(), g, 1.0)
    assert abs(trig - HALF_PI ** 6) / HALF_PI ** 6 < 0.01
    assert robust_curvature_loss(TrigSchedule(), g, 0.0) == 0.0
    with pytest.raises(ConfigError):
        robust_curvature_loss(TrigSchedule(), g, -0.5)


def test_robust_curvature_loss_linear_in_lambda():
    g = GridSpec(200)
    sch = random_neural(0)
    l1 = robust_curvature_loss(sch, g, 0.3)
    l2 = robust_curvature_loss(sch, g, 0.6)
    assert l2 == 2.0 * l1


def test_regularizer_converges_to_integral():
    exact = HALF_PI ** 6
    errs = [abs(robust_curvature_loss(TrigSchedule(), GridSpec(m), 1.0) - exact)
            for m in (250, 1000)]
    assert errs[1] < errs[0]


def test_total_loss_report():
    lin = LinearSchedule()
    batch = [(np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.4)]
    g = GridSpec(100)
    perfect = OracleModel(lambda z, tt: np.array([[-1.0, 1.0]]))
    rep = total_loss(batch, perfect, lin, g, 1.0)
    assert rep.total < 1e-12  # grid differences on the linear schedule leave roundoff only

    rep = total_loss(batch, perfect, TrigSchedule(), g, 1.0)
    assert rep.fm_loss > 0.0  # trig target differs from the linear one
    rep0 = total_loss(batch, zero_model(), lin, g, 0.0)
    assert rep0.curvature_loss == 0.0
    assert rep0.total == rep0.fm_loss
    assert abs(rep.total - (rep.fm_loss + rep.curvature_loss)) < 1e-12


def test_total_loss_regularizer_only_case():
    g = GridSpec(1000)
    x0 = np.array([[1.0, 0.0]])
    eps = np.array([[0.0, 1.0]])
    t = np.array([0.5])
    trig = TrigSchedule()
    da = -HALF_PI * np.sin(HALF_PI * 0.5)
    db = HALF_PI * np.cos(HALF_PI * 0.5)
    perfect = OracleModel(lambda z, tt: da * x0 + db * eps)
    rep = total_loss((x0, eps, t), perfect, trig, g, 1.0)
    assert rep.fm_loss < 1e-20
    assert abs(rep.total - HALF_PI ** 6) / HALF_PI ** 6 < 0.01


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    schedule = random_neural(1, scale=0.2)
    model = VelocityField.initialize(2, seed=2, hidden=8, time_features=4)
    params = merge_params(model.params, schedule.params)
    x0 = rng.standard_normal((3, 2))
    eps = rng.standard_normal((3, 2))
    t = np.clip(rng.random(3), 0.05, 0.95)
    grid = GridSpec(8)

    def loss_fn(p):
        fm, reg = total_loss_graph((x0, eps, t), model, schedule, grid, 0.05, p)
        return fm + reg

    _, g_ad = evaluate_with_gradients(loss_fn, params)
    g_fd = finite_difference_gradient(loss_fn, params, step=1e-5)
    err, name = max_relative_error(g_ad, g_fd)
    assert err < 1e-4, name


def test_fm_loss_nonnegative_random():
    rng = np.random.default_rng(3)
    schedule = random_neural(4)
    model = VelocityField.initialize(2, seed=5, hidden=8, time_features=4)
    for _ in range(20):
        x0 = rng.standard_normal((4, 2))
        eps = rng.standard_normal((4, 2))
        t = np.clip(rng.random(4), 1e-3, 1 - 1e-3)
        assert curve_fm_loss((x0, eps, t), model, schedule) >= 0.0


def test_detach_target_changes_schedule_gradient_only():
    rng = np.random.default_rng(6)
    schedule = random_neural(7, scale=0.2)
    model = VelocityField.initialize(2, seed=8, hidden=8, time_features=4)
    params = merge_params(model.params, schedule.params)
    x0 = rng.standard_normal((3, 2))
    eps = rng.standard_normal((3, 2))
    t = np.clip(rng.random(3), 0.05, 0.95)

    def loss(detach):
        return lambda p: curve_fm_loss((x0, eps, t), model, schedule,
                                       params=p, detach_target=detach)

    _, g_on = evaluate_with_gradients(loss(False), params)
    _, g_off = evaluate_with_gradients(loss(True), params)
    for name in g_on:
        if name.startswith("v/"):
            assert np.array_equal(g_on[name], g_off[name])
    assert any(not np.array_equal(g_on[n], g_off[n])
               for n in g_on if n.startswith(("a/", "b/")))
