"""Flow-matching data loss, robust curvature regularizer, and total loss.

The data term is the mean over the batch of the squared (summed over
dimensions) error between the velocity field and the schedule's
instantaneous velocity target da(t) x0 + db(t) eps. The regularizer is

    lambda * dt * sum_i (da_i ddb_i - db_i dda_i)^2

a left-point Riemann sum of the squared determinant over the interior
grid nodes.
"""

from dataclasses import dataclass

import numpy as np

from . import engine
from .engine import merge_params, square, value_of
from .errors import ConfigError
from .schedules import grid_derivatives, pointwise_derivatives


@dataclass
class LossReport:
    step: int
    fm_loss: float
    curvature_loss: float
    total: float
    lam: float
    lr: float = 0.0


def as_batch(batch):
    """Normalize a batch to (x0, eps, t) arrays.

    Accepts either a 3-tuple of arrays or a sequence of (x0, eps, t)
    triples.
    """
    if isinstance(batch, tuple) and len(batch) == 3:
        x0, eps, t = batch
    else:
        items = list(batch)
        if not items:
            raise ConfigError("empty batch")
        x0 = np.stack([np.asarray(s[0], float) for s in items])
        eps = np.stack([np.asarray(s[1], float) for s in items])
        t = np.asarray([float(s[2]) for s in items])
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    eps = np.atleast_2d(np.asarray(eps, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if x0.shape[0] == 0:
        raise ConfigError("empty batch")
    if x0.shape != eps.shape or x0.shape[0] != t.shape[0]:
        raise ConfigError("inconsistent batch shapes: x0 %s, eps %s, t %s"
                          % (x0.shape, eps.shape, t.shape))
    return x0, eps, t


def _default_params(model, schedule):
    return merge_params(model.params, schedule.params).as_dict()


def curve_fm_loss(batch, model, schedule, params=None, h=1e-3,
                  detach_target=False):
    """Mean squared velocity-matching error over the batch.

    When ``params`` holds engine Tensors the result is a Tensor and
    gradients flow to the model and, through both z_t and the target, to
    the schedule. ``detach_target`` cuts the schedule gradient through the
    regression target only (ablation switch).
    """
    x0, eps, t = as_batch(batch)
    if params is None:
        params = _default_params(model, schedule)
    a = schedule.a(t, params)
    b = schedule.b(t, params)
    z = a.reshape(-1, 1) * x0 + b.reshape(-1, 1) * eps
    tgt_params = params
    if detach_target:
        tgt_params = {n: value_of(p) for n, p in params.items()}
    da, db = pointwise_derivatives(schedule, t, h=h, params=tgt_params)
    u = da.reshape(-1, 1) * x0 + db.reshape(-1, 1) * eps
    v = model(z, t, params)
    diff = v - u
    loss = square(diff).sum() * (1.0 / x0.shape[0])
    return loss if isinstance(loss, engine.Tensor) else float(loss)


def determinant_profile(deriv_grid):
    """d_i = da_i ddb_i - db_i dda_i at the interior nodes."""
    return (deriv_grid.da * deriv_grid.ddb
            - deriv_grid.db * deriv_grid.dda)


def robust_curvature_loss(schedule, grid, lam, params=None, exact=False):
    """lambda * dt * sum of squared determinants over the interior grid."""
    if lam < 0:
        raise ConfigError("lambda must be >= 0, got %g" % lam)
    if lam == 0:
        return 0.0
    dg = grid_derivatives(schedule, grid, exact=exact, params=params)
    d = determinant_profile(dg)
    loss = (lam * grid.dt) * square(d).sum()
    return loss if isinstance(loss, engine.Tensor) else float(loss)


def total_loss_graph(batch, model, schedule, grid, lam, params,
                     h=None, detach_target=False):
    """(fm, regularizer) terms, Tensors when ``params`` holds Tensors."""
    if h is None:
        h = grid.dt
    fm = curve_fm_loss(batch, model, schedule, params=params, h=h,
                       detach_target=detach_target)
    reg = robust_curvature_loss(schedule, grid, lam, params=params)
    return fm, reg


def total_loss(batch, model, schedule, grid, lam, params=None, step=0,
               detach_target=False):
    """Numeric LossReport for one batch (no gradients)."""
    if params is None:
        params = _default_params(model, schedule)
    fm, reg = total_loss_graph(batch, model, schedule, grid, lam, params,
                               detach_target=detach_target)
    fm = float(value_of(fm))
    reg = float(value_of(reg))
    return LossReport(step=step, fm_loss=fm, curvature_loss=reg,
                      total=fm + reg, lam=lam)
