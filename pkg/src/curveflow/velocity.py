"""Trainable velocity field v(z, t) for low-dimensional data.

A SiLU MLP (3 hidden layers, default width 128) on [z, time-embedding].
Parameter names are prefixed "v/" so the field can share one ParameterSet
with a neural schedule during training.
"""

import numpy as np

from .engine import ParameterSet, concat, silu, value_of
from .errors import ConfigError
from .schedules import sinusoidal_features


class VelocityField:

    def __init__(self, dim, hidden=128, time_features=16, params=None):
        if dim < 1:
            raise ConfigError("dim must be >= 1")
        self.dim = dim
        self.hidden = hidden
        self.time_features = time_features
        self.params = params

    @property
    def fan_in(self):
        return self.dim + self.time_features

    @classmethod
    def initialize(cls, dim, seed=0, hidden=128, time_features=16):
        """Xavier-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases."""
        model = cls(dim, hidden=hidden, time_features=time_features)
        rng = np.random.Generator(np.random.Philox(key=seed))
        dims = [(model.fan_in, hidden), (hidden, hidden), (hidden, hidden),
                (hidden, dim)]
        entries = {}
        for layer, (fan_in, fan_out) in enumerate(dims):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            entries["v/w%d" % layer] = rng.uniform(-limit, limit,
                                                   size=(fan_in, fan_out))
            entries["v/b%d" % layer] = np.zeros(fan_out)
        model.params = ParameterSet(entries)
        return model

    def __call__(self, z, t, params=None):
        """Velocity at (z, t); z is (n,) or (batch, n), t scalar or (batch,)."""
        p = self.params if params is None else params
        zv = value_of(z)
        single = zv.ndim == 1
        if single:
            z = z.reshape(1, -1)
            zv = value_of(z)
        if not np.all(np.isfinite(zv)):
            raise ValueError("non-finite input to velocity field")
        t = np.broadcast_to(np.asarray(t, dtype=float), (zv.shape[0],))
        temb = sinusoidal_features(t, self.time_features)
        h = concat(z, temb, axis=1)
        h = silu(h @ p["v/w0"] + p["v/b0"])
        h = silu(h @ p["v/w1"] + p["v/b1"])
        h = silu(h @ p["v/w2"] + p["v/b2"])
        out = h @ p["v/w3"] + p["v/b3"]
        if single:
            return out.reshape(self.dim)
        return out

    forward = __call__
