import numpy as np
import pytest

from curveflow.errors import ConfigError, DivergenceError
from curveflow.sampling import SolverConfig, integrate, sample_batch


def test_solver_config_validation():
    SolverConfig().validate()
    with pytest.raises(ConfigError):
        SolverConfig(method="rk9").validate()
    with pytest.raises(ConfigError):
        SolverConfig(steps=0).validate()


def test_constant_field_exact():
    c = np.array([2.0, -1.0])
    z0 = np.array([0.5, 0.5])
    for method in ("euler", "heun"):
        for steps in (1, 7, 50):
            z = integrate(lambda z, t: c, z0, SolverConfig(method, steps))
            assert np.allclose(z, z0 - c, atol=1e-12)


def test_linear_field_heun_accuracy():
    # dz/dt = z integrated from t=1 to 0 gives z0 * e^{-1}
    z0 = np.array([1.0, -2.0])
    z = integrate(lambda z, t: z, z0, SolverConfig("heun", 100))
    exact = z0 * np.exp(-1.0)
    assert np.max(np.abs(z - exact) / np.abs(exact)) < 1e-4


def _order_slope(method):
    z0 = np.array([1.0])
    exact = z0 * np.exp(-1.0)
    steps = np.array([8, 16, 32, 64, 128])
    errs = []
    for n in steps:
        z = integrate(lambda z, t: z, z0, SolverConfig(method, int(n)))
        errs.append(abs(float(z[0] - exact[0])))
    slope, _ = np.polyfit(np.log(steps), np.log(errs), 1)
    return -slope


def test_euler_first_order():
    assert abs(_order_slope("euler") - 1.0) < 0.2


def test_heun_second_order():
    assert abs(_order_slope("heun") - 2.0) < 0.2


def test_halving_step_halves_euler_quarters_heun():
    z0 = np.array([1.0])
    exact = float(z0[0] * np.exp(-1.0))

    def err(method, steps):
        out = integrate(lambda z, t: z, z0, SolverConfig(method, steps))
        return abs(float(out[0]) - exact)

    assert err("euler", 64) / err("euler", 128) == pytest.approx(2.0, rel=0.1)
    assert err("heun", 64) / err("heun", 128) == pytest.approx(4.0, rel=0.1)


def test_batch_rows_integrated_independently():
    field = lambda z, t: z * np.array([1.0, 0.5])
    batch = np.array([[1.0, 1.0], [2.0, -1.0], [0.0, 3.0]])
    whole = integrate(field, batch, SolverConfig("heun", 20))
    for i, row in enumerate(batch):
        single = integrate(field, row, SolverConfig("heun", 20))
        assert np.allclose(whole[i], single, atol=1e-12)


def test_divergence_reports_step():
    def blowup(z, t):
        with np.errstate(over="ignore"):
            return z * 1e300
    with pytest.raises(DivergenceError) as exc:
        integrate(blowup, np.array([1.0]), SolverConfig("euler", 10))
    assert exc.value.step is not None


def test_non_finite_start_rejected():
    with pytest.raises(ConfigError):
        integrate(lambda z, t: z, np.array([np.inf]), SolverConfig("euler", 5))


def test_sample_batch_deterministic():
    model = lambda z, t: np.zeros_like(z)
    a = sample_batch(model, 10, 2, seed=3, config=SolverConfig("heun", 5))
    b = sample_batch(model, 10, 2, seed=3, config=SolverConfig("heun", 5))
    assert np.array_equal(a, b)


def test_sample_batch_zero_field_is_identity():
    from curveflow.datagen import sample_noise
    model = lambda z, t: np.zeros_like(z)
    out = sample_batch(model, 20, 2, seed=9, config=SolverConfig("euler", 10))
    assert np.array_equal(out, sample_noise(20, 2, 9))


def test_sample_batch_count_validation():
    model = lambda z, t: np.zeros_like(z)
    with pytest.raises(ConfigError):
        sample_batch(model, 0, 2, seed=0, config=SolverConfig())
