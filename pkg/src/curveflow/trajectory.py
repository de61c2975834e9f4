"""Interpolant trajectories and their differential geometry.

For z(t) = a(t) x0 + b(t) eps the curvature is

    kappa(t) = |da ddb - db dda| * ||x0 x eps|| / speed^3

with speed^2 = da^2 ||x0||^2 + 2 da db (x0 . eps) + db^2 ||eps||^2. The
cross-product magnitude is taken in the n-dimensional sense via the
Lagrange identity.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrajectoryError, ShapeError
from .schedules import pointwise_derivatives

SPEED_EPS = 1e-18  # below this, the curvature denominator is treated as zero


@dataclass
class TrajectorySample:
    x0: np.ndarray
    eps: np.ndarray
    t: float
    z: np.ndarray
    u: np.ndarray


@dataclass
class CurvaturePoint:
    t: float
    determinant: float
    cross: float
    speed: float
    kappa: float


def _pair(x0, eps):
    x0 = np.asarray(x0, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if x0.shape != eps.shape:
        raise ShapeError("x0 and eps must share a shape, got %s vs %s"
                         % (x0.shape, eps.shape))
    return x0, eps


def interpolate(schedule, x0, eps, t):
    """z_t = a(t) x0 + b(t) eps."""
    x0, eps = _pair(x0, eps)
    return float(schedule.a(t)) * x0 + float(schedule.b(t)) * eps


def target_velocity(schedule, x0, eps, t, h=1e-3):
    """u = da(t) x0 + db(t) eps, the flow-matching regression target."""
    x0, eps = _pair(x0, eps)
    da, db = pointwise_derivatives(schedule, t, h=h)
    return float(np.asarray(da).reshape(-1)[0]) * x0 \
        + float(np.asarray(db).reshape(-1)[0]) * eps


def make_sample(schedule, x0, eps, t, h=1e-3):
    x0, eps = _pair(x0, eps)
    return TrajectorySample(x0, eps, float(t),
                            interpolate(schedule, x0, eps, t),
                            target_velocity(schedule, x0, eps, t, h=h))


def cross_magnitude(x0, eps):
    """||x0 x eps|| in n dimensions: sqrt(|x0|^2 |eps|^2 - (x0.eps)^2)."""
    x0, eps = _pair(x0, eps)
    g = (x0 @ x0) * (eps @ eps) - (x0 @ eps) ** 2
    return float(np.sqrt(max(g, 0.0)))


def speed_squared(schedule, x0, eps, t, h=1e-3):
    x0, eps = _pair(x0, eps)
    da, db = pointwise_derivatives(schedule, t, h=h)
    da = float(np.asarray(da).reshape(-1)[0])
    db = float(np.asarray(db).reshape(-1)[0])
    return da * da * (x0 @ x0) + 2.0 * da * db * (x0 @ eps) + db * db * (eps @ eps)


def curvature(schedule, x0, eps, t, h=1e-3):
    """Full CurvaturePoint at time t (diagnostic use)."""
    x0, eps = _pair(x0, eps)
    da, db = pointwise_derivatives(schedule, t, h=h)
    dda, ddb = schedule.second_derivatives(t, h=h)
    da = float(np.asarray(da).reshape(-1)[0])
    db = float(np.asarray(db).reshape(-1)[0])
    dda = float(np.asarray(dda).reshape(-1)[0])
    ddb = float(np.asarray(ddb).reshape(-1)[0])
    det = da * ddb - db * dda
    cross = cross_magnitude(x0, eps)
    sp2 = da * da * (x0 @ x0) + 2.0 * da * db * (x0 @ eps) + db * db * (eps @ eps)
    if sp2 < SPEED_EPS:
        raise DegenerateTrajectoryError(
            "trajectory speed vanishes at t=%g (speed^2=%g)" % (t, sp2))
    kappa = abs(det) * cross / sp2 ** 1.5
    return CurvaturePoint(float(t), det, cross, float(np.sqrt(sp2)), kappa)
