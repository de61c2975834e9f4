"""Training loop: timestep sampling, AdamW, polynomial-warmup LR schedule.

One shared AdamW optimizer updates the velocity field and (unless frozen)
the schedule's residual networks. All randomness comes from a single
Philox stream keyed by the config seed, so a rerun with the same config
reproduces the parameter trajectory bit for bit.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import ParameterSet, Tensor, backward, merge_params
from .errors import ConfigError, DivergenceError
from .losses import LossReport, total_loss_graph
from .schedules import GridSpec

T_CLAMP = 1e-5  # keep sampled timesteps strictly inside (0, 1)


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 16
    base_lr: float = 1e-3  # desk-scale default; the paper's 1e-5 targets LoRA fine-tuning
    warmup_steps: int = 100
    poly_power: float = 1.0
    lam: float = 0.001
    grid_m: int = 1000
    timestep_sampler: str = "uniform"
    seed: int = 0
    train_schedule: bool = True
    detach_target: bool = False

    def validate(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.base_lr <= 0:
            raise ConfigError("base_lr must be > 0")
        if self.warmup_steps < 1:
            raise ConfigError("warmup_steps must be >= 1")
        if self.lam < 0:
            raise ConfigError("lam must be >= 0")
        if self.grid_m < 4:
            raise ConfigError("grid_m must be >= 4")
        if self.timestep_sampler not in ("uniform", "logit-normal"):
            raise ConfigError("unknown timestep_sampler %r" % self.timestep_sampler)
        return self


@dataclass
class OptimizerState:
    m: dict
    v: dict
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01

    @classmethod
    def init(cls, params):
        return cls(m={n: np.zeros_like(a) for n, a in params.items()},
                   v={n: np.zeros_like(a) for n, a in params.items()})


def sample_timestep(kind, rng, size=None):
    """Draw t strictly inside (0, 1)."""
    n = 1 if size is None else size
    if kind == "uniform":
        t = rng.random(n)
    elif kind == "logit-normal":
        g = rng.standard_normal(n)
        t = 1.0 / (1.0 + np.exp(-g))
    else:
        raise ConfigError("unknown timestep sampler %r" % kind)
    t = np.clip(t, T_CLAMP, 1.0 - T_CLAMP)
    return float(t[0]) if size is None else t


def adamw_step(params, grads, state, lr, names=None):
    """Decoupled-weight-decay Adam update; returns a new ParameterSet."""
    names = params.names() if names is None else list(names)
    state.step += 1
    k = state.step
    bc1 = 1.0 - state.beta1 ** k
    bc2 = 1.0 - state.beta2 ** k
    out = params.as_dict()
    for name in names:
        g = np.asarray(grads[name], dtype=float)
        if not np.all(np.isfinite(g)):
            raise DivergenceError("non-finite gradient for %r" % name,
                                  step=state.step)
        p = out[name]
        state.m[name] = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        state.v[name] = state.beta2 * state.v[name] + (1.0 - state.beta2) * g * g
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        out[name] = p - lr * m_hat / (np.sqrt(v_hat) + state.eps) \
            - lr * state.weight_decay * p
    return ParameterSet(out)


def lr_at(step, total_steps, config):
    """Linear warmup to base_lr, then polynomial decay to zero."""
    w = config.warmup_steps
    if step < w:
        return config.base_lr * step / w
    if total_steps <= w:
        return config.base_lr
    frac = (step - w) / (total_steps - w)
    return config.base_lr * (1.0 - frac) ** config.poly_power


@dataclass
class TrainResult:
    params: ParameterSet
    opt_state: OptimizerState
    history: list = field(default_factory=list)
    steps: int = 0


def train(config, dataset, schedule, model):
    """Run the optimization loop; returns TrainResult with per-step history.

    Raises DivergenceError (carrying the last valid state) if a loss or
    gradient goes non-finite.
    """
    config.validate()
    data = np.atleast_2d(np.asarray(dataset, dtype=float))
    if data.shape[0] == 0:
        raise ConfigError("dataset is empty")
    n, dim = data.shape

    params = merge_params(model.params, schedule.params)
    state = OptimizerState.init(params)
    grid = GridSpec(config.grid_m)
    rng = np.random.Generator(np.random.Philox(key=config.seed))

    trainable = [name for name in params
                 if name.startswith("v/") or config.train_schedule]

    steps_per_epoch = math.ceil(n / config.batch_size)
    total_steps = config.epochs * steps_per_epoch
    history = []
    step = 0
    for _ in range(config.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            x0 = data[idx]
            eps = rng.standard_normal((len(idx), dim))
            t = sample_timestep(config.timestep_sampler, rng, size=len(idx))

            leaves = {name: Tensor(arr) for name, arr in params.items()}
            try:
                fm, reg = total_loss_graph((x0, eps, t), model, schedule, grid,
                                           config.lam, leaves,
                                           detach_target=config.detach_target)
                tot = fm + reg if isinstance(reg, Tensor) or config.lam > 0 else fm
                backward(tot if isinstance(tot, Tensor) else fm)
            except Exception as exc:
                raise DivergenceError("loss evaluation failed at step %d: %s"
                                      % (step, exc), step=step, params=params,
                                      opt_state=state, history=history) from exc

            grads = {}
            for name in trainable:
                g = leaves[name].grad
                grads[name] = np.zeros_like(params[name]) if g is None else g

            lr = lr_at(step, total_steps, config)
            try:
                params = adamw_step(params, grads, state, lr, names=trainable)
            except DivergenceError as exc:
                exc.step = step
                exc.params = params
                exc.opt_state = state
                exc.history = history
                raise

            fm_val = float(fm.value if isinstance(fm, Tensor) else fm)
            reg_val = float(reg.value if isinstance(reg, Tensor) else reg)
            history.append(LossReport(step=step, fm_loss=fm_val,
                                      curvature_loss=reg_val,
                                      total=fm_val + reg_val,
                                      lam=config.lam, lr=lr))
            step += 1

    # push the trained arrays back into the owning objects
    model.params = ParameterSet({name: params[name] for name in model.params})
    if len(schedule.params):
        schedule.params = ParameterSet({name: params[name]
                                        for name in schedule.params})
    return TrainResult(params=params, opt_state=state, history=history,
                       steps=step)
