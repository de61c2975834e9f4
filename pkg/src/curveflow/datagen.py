"""Seeded synthetic 2D datasets and the Gaussian noise source.

All generators are pure functions of their spec: randomness comes from a
counter-based Philox stream keyed by the seed, and normals are produced by
the Box-Muller transform on Philox uniforms, so outputs are identical
across runs and platforms.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

KINDS = ("gaussians8", "two_moons", "checkerboard", "spiral")


@dataclass
class DatasetSpec:
    kind: str = "gaussians8"
    count: int = 2000
    seed: int = 0
    noise_std: float = 0.1

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError("unknown dataset kind %r" % self.kind)
        if self.count < 1:
            raise ConfigError("count must be >= 1")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be >= 0")
        return self


def _philox(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def _box_muller(rng, n):
    """n standard normals from Philox uniforms."""
    pairs = (n + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # in (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2.0 * np.pi * u2),
                        r * np.sin(2.0 * np.pi * u2)])
    return z[:n]


def sample_noise(count, dim, seed):
    """i.i.d. standard-normal points, shape (count, dim)."""
    if count < 1:
        raise ConfigError("count must be >= 1")
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    rng = _philox(seed)
    return _box_muller(rng, count * dim).reshape(count, dim)


def _gaussians8(rng, n, noise_std):
    comp = rng.integers(0, 8, size=n)
    ang = 2.0 * np.pi * comp / 8.0
    centers = 4.0 * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return centers + noise_std * _box_muller(rng, 2 * n).reshape(n, 2)


def _two_moons(rng, n, noise_std):
    n_out = n // 2
    n_in = n - n_out
    th_out = np.pi * rng.random(n_out)
    th_in = np.pi * rng.random(n_in)
    outer = np.stack([np.cos(th_out), np.sin(th_out)], axis=1)
    inner = np.stack([1.0 - np.cos(th_in), 0.5 - np.sin(th_in)], axis=1)
    pts = np.concatenate([outer, inner])
    return 2.0 * pts + noise_std * _box_muller(rng, 2 * n).reshape(n, 2)


def _checkerboard(rng, n, noise_std):
    x1 = rng.random(n) * 4.0 - 2.0
    x2 = rng.random(n) - rng.integers(0, 2, size=n) * 2.0
    x2 = x2 + np.floor(x1) % 2
    pts = np.stack([x1, x2], axis=1) * 2.0
    return pts + noise_std * _box_muller(rng, 2 * n).reshape(n, 2)


def _spiral(rng, n, noise_std):
    th = 3.0 * np.pi * np.sqrt(rng.random(n))
    r = th / (3.0 * np.pi) * 4.0
    pts = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    return pts + noise_std * _box_muller(rng, 2 * n).reshape(n, 2)


_GENERATORS = {
    "gaussians8": _gaussians8,
    "two_moons": _two_moons,
    "checkerboard": _checkerboard,
    "spiral": _spiral,
}


def generate(spec):
    """Points for the spec, shape (count, 2)."""
    spec.validate()
    rng = _philox(spec.seed)
    return _GENERATORS[spec.kind](rng, spec.count, spec.noise_std)


def generate_split(spec):
    """(train, held_out) of spec.count each: 2*count points split by parity."""
    spec.validate()
    rng = _philox(spec.seed)
    pts = _GENERATORS[spec.kind](rng, 2 * spec.count, spec.noise_std)
    return pts[0::2], pts[1::2]


def export_csv(path, points):
    points = np.asarray(points, dtype=float)
    with open(path, "w") as fh:
        fh.write("x,y\n")
        for x, y in points:
            fh.write("%s,%s\n" % (repr(float(x)), repr(float(y))))
