"""Generation: integrate dz/dt = v(z, t) from noise (t=1) down to data (t=0)."""

from dataclasses import dataclass

import numpy as np

from .datagen import sample_noise
from .errors import ConfigError, DivergenceError


@dataclass
class SolverConfig:
    method: str = "heun"
    steps: int = 50

    def validate(self):
        if self.method not in ("euler", "heun"):
            raise ConfigError("unknown solver method %r" % self.method)
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        return self


def integrate(velocity, z_start, config):
    """Integrate t: 1 -> 0 with Euler or Heun (trapezoidal) steps.

    ``velocity`` is any callable (z, t) -> dz/dt; z may be a single point
    or a batch (rows are integrated independently).
    """
    config.validate()
    z = np.array(z_start, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ConfigError("z_start must be finite")
    h = 1.0 / config.steps
    for k in range(config.steps):
        t = 1.0 - k * h
        v1 = np.asarray(velocity(z, t), dtype=float)
        if config.method == "euler":
            z = z - h * v1
        else:
            z_pred = z - h * v1
            v2 = np.asarray(velocity(z_pred, t - h), dtype=float)
            z = z - 0.5 * h * (v1 + v2)
        if not np.all(np.isfinite(z)):
            raise DivergenceError("integration diverged at step %d" % k, step=k)
    return z


def sample_batch(model, count, dim, seed, config):
    """Draw seeded Gaussian noise and integrate each point to t=0."""
    if count < 1:
        raise ConfigError("count must be >= 1")
    eps = sample_noise(count, dim, seed)
    return integrate(lambda z, t: model(z, t), eps, config)
