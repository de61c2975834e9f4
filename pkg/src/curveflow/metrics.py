"""Distributional distances and schedule geometry diagnostics.

Energy distance and sliced Wasserstein stand in for featurizer-based image
metrics: both are exact on 2D point clouds and need no pretrained models.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigError, DegenerateTrajectoryError, ShapeError
from .losses import determinant_profile
from .schedules import grid_derivatives
from .trajectory import SPEED_EPS, cross_magnitude

MAX_PAIRWISE = 5000  # above this, pairwise sums use a seeded subsample


@dataclass
class EvalReport:
    energy_distance: float = None
    sliced_wasserstein: float = None
    determinant_integral: float = None
    mean_curvature_profile: np.ndarray = None
    det_profile: np.ndarray = None
    profile_t: np.ndarray = None
    subsampled: bool = False


def _points(name, arr):
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    if arr.shape[0] == 0:
        raise ConfigError("%s is empty" % name)
    return arr


def _maybe_subsample(arr, rng):
    if arr.shape[0] <= MAX_PAIRWISE:
        return arr, False
    idx = rng.choice(arr.shape[0], size=MAX_PAIRWISE, replace=False)
    return arr[np.sort(idx)], True


def energy_distance(a, b, seed=0):
    """2 E||a-b|| - E||a-a'|| - E||b-b'||, clamped at zero."""
    a = _points("A", a)
    b = _points("B", b)
    if a.shape[1] != b.shape[1]:
        raise ShapeError("dimension mismatch: %d vs %d" % (a.shape[1], b.shape[1]))
    rng = np.random.Generator(np.random.Philox(key=seed))
    a, sub_a = _maybe_subsample(a, rng)
    b, sub_b = _maybe_subsample(b, rng)
    ab = cdist(a, b).mean()
    aa = cdist(a, a).mean()
    bb = cdist(b, b).mean()
    return max(2.0 * ab - aa - bb, 0.0)


def sliced_wasserstein(a, b, projections=64, seed=0, directions=None):
    """Mean 1D Wasserstein-1 over random unit directions (sorted matching).

    Requires equal-size point sets so the 1D computation is exact.
    """
    a = _points("A", a)
    b = _points("B", b)
    if a.shape != b.shape:
        raise ConfigError("sliced_wasserstein requires equal-size sets, got %s vs %s"
                          % (a.shape, b.shape))
    if directions is None:
        if projections < 1:
            raise ConfigError("projections must be >= 1")
        rng = np.random.Generator(np.random.Philox(key=seed))
        directions = rng.standard_normal((projections, a.shape[1]))
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    directions = directions / np.linalg.norm(directions, axis=1, keepdims=True)
    pa = np.sort(a @ directions.T, axis=0)
    pb = np.sort(b @ directions.T, axis=0)
    return float(np.abs(pa - pb).mean())


def schedule_diagnostics(schedule, grid, sample_pairs, exact=None):
    """Determinant integral and mean curvature profile over the grid.

    ``sample_pairs`` is a sequence of (x0, eps) pairs; pairs whose speed
    vanishes anywhere on the grid are skipped (error if all do).
    """
    if exact is None:
        exact = schedule.has_exact_derivatives
    dg = grid_derivatives(schedule, grid, exact=exact)
    det = np.asarray(determinant_profile(dg), dtype=float)
    integral = float(grid.dt * np.sum(det * det))

    da = np.asarray(dg.da, dtype=float)
    db = np.asarray(dg.db, dtype=float)
    profiles = []
    for x0, eps in sample_pairs:
        x0 = np.asarray(x0, dtype=float)
        eps = np.asarray(eps, dtype=float)
        sp2 = (da * da * (x0 @ x0) + 2.0 * da * db * (x0 @ eps)
               + db * db * (eps @ eps))
        if np.any(sp2 < SPEED_EPS):
            continue
        profiles.append(np.abs(det) * cross_magnitude(x0, eps) / sp2 ** 1.5)
    if sample_pairs and not profiles:
        raise DegenerateTrajectoryError("all sample pairs are degenerate")
    profile = (np.mean(profiles, axis=0) if profiles
               else np.zeros_like(det))
    return EvalReport(determinant_integral=integral,
                      mean_curvature_profile=profile,
                      det_profile=det,
                      profile_t=grid.interior)
