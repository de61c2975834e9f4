"""Command-line entry point: train, sample, analyze, compare, gradcheck.

Exit codes: 0 success, 1 check failure, 2 invalid input, 3 runtime
divergence. All artifacts are text (JSON, CSV, SVG) and deterministic
given config and seed, except the run-manifest timestamp.
"""

import argparse
import copy
import json
import os
import sys
import time

import numpy as np

from . import datagen, losses, metrics, svgplot
from .config import (Checkpoint, ExperimentConfig, config_to_dict,
                     load_checkpoint, load_config, save_checkpoint)
from .engine import (evaluate_with_gradients, finite_difference_gradient,
                     max_relative_error, merge_params)
from .errors import (CheckpointError, ConfigError, DegenerateTrajectoryError,
                     DivergenceError)
from .sampling import SolverConfig, sample_batch
from .schedules import GridSpec, NeuralSchedule, make_schedule
from .training import train
from .velocity import VelocityField

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_DIVERGED = 3


def _fmt(x):
    return repr(float(x))


def build_schedule(config):
    sc = config.schedule
    if sc.kind == "neural":
        return NeuralSchedule(hidden=sc.hidden, embed=sc.embed, seed=sc.seed)
    return make_schedule(sc.kind)


def build_model(config, dim=2):
    mc = config.model
    return VelocityField.initialize(dim, seed=mc.seed, hidden=mc.hidden,
                                    time_features=mc.time_features)


def write_history_csv(path, history):
    with open(path, "w") as fh:
        fh.write("step,fm_loss,curvature_loss,total,lr\n")
        for row in history:
            fh.write("%d,%s,%s,%s,%s\n" % (row.step, _fmt(row.fm_loss),
                                           _fmt(row.curvature_loss),
                                           _fmt(row.total), _fmt(row.lr)))


def _write_manifest(path, config, extra=None):
    doc = {"config": config_to_dict(config),
           "seed": config.train.seed,
           "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def run_experiment(config):
    """Train one model per the config; returns everything downstream needs."""
    train_data, held_out = datagen.generate_split(config.data)
    schedule = build_schedule(config)
    model = build_model(config, dim=train_data.shape[1])
    result = train(config.train, train_data, schedule, model)
    return result, schedule, model, train_data, held_out


def evaluate_model(config, schedule, model, held_out):
    """Energy distance / sliced Wasserstein vs held-out, plus geometry."""
    n = min(config.metrics.eval_count, held_out.shape[0])
    samples = sample_batch(lambda z, t: model(z, t), n, held_out.shape[1],
                           config.metrics.seed, config.solver)
    ref = held_out[:n]
    ed = metrics.energy_distance(samples, ref, seed=config.metrics.seed)
    sw = metrics.sliced_wasserstein(samples, ref,
                                    projections=config.metrics.projections,
                                    seed=config.metrics.seed)
    grid = GridSpec(config.train.grid_m)
    pairs = _diagnostic_pairs(config)
    report = metrics.schedule_diagnostics(schedule, grid, pairs)
    report.energy_distance = ed
    report.sliced_wasserstein = sw
    report.subsampled = n > metrics.MAX_PAIRWISE
    return report, samples


def _diagnostic_pairs(config, count=64):
    spec = datagen.DatasetSpec(kind=config.data.kind, count=count,
                               seed=config.data.seed,
                               noise_std=config.data.noise_std)
    x0s = datagen.generate(spec)
    eps = datagen.sample_noise(count, 2, config.data.seed + 1)
    return list(zip(x0s, eps))


# -- commands ------------------------------------------------------------


def cmd_train(args):
    try:
        config = _load_config_with_overrides(args)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    try:
        result, schedule, model, _, _ = run_experiment(config)
    except DivergenceError as exc:
        print("training diverged at step %s: %s" % (exc.step, exc),
              file=sys.stderr)
        if exc.params is not None:
            save_checkpoint(os.path.join(outdir, "checkpoint.json"),
                            Checkpoint(config=config, params=exc.params,
                                       opt_state=exc.opt_state, step=exc.step))
            write_history_csv(os.path.join(outdir, "history.csv"),
                              exc.history or [])
        return EXIT_DIVERGED
    save_checkpoint(os.path.join(outdir, "checkpoint.json"),
                    Checkpoint(config=config, params=result.params,
                               opt_state=result.opt_state, step=result.steps))
    write_history_csv(os.path.join(outdir, "history.csv"), result.history)
    _write_manifest(os.path.join(outdir, "run_manifest.json"), config,
                    extra={"steps": result.steps})
    print("trained %d steps; outputs in %s" % (result.steps, outdir))
    return EXIT_OK


def _load_config_with_overrides(args):
    config = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        config.train.seed = args.seed
    return config.validate()


def cmd_sample(args):
    try:
        ckpt = load_checkpoint(args.checkpoint)
    except CheckpointError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    config = ckpt.config
    solver = SolverConfig(method=args.method or config.solver.method,
                          steps=args.steps or config.solver.steps)
    try:
        solver.validate()
        if args.count < 1:
            raise ConfigError("count must be >= 1")
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    model = build_model(config)
    model.params = _subset(ckpt.params, "v/")
    seed = args.seed if args.seed is not None else config.metrics.seed
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    try:
        samples = sample_batch(lambda z, t: model(z, t), args.count, 2,
                               seed, solver)
    except DivergenceError as exc:
        print("sampling diverged: %s" % exc, file=sys.stderr)
        return EXIT_DIVERGED
    datagen.export_csv(os.path.join(outdir, "samples.csv"), samples)
    _, held_out = datagen.generate_split(config.data)
    svgplot.scatter(os.path.join(outdir, "samples.svg"),
                    [("held-out", held_out), ("generated", samples)],
                    title="generated vs held-out")
    print("wrote %d samples to %s" % (len(samples), outdir))
    return EXIT_OK


def _subset(params, prefix):
    from .engine import ParameterSet
    return ParameterSet({n: a for n, a in params.items()
                         if n.startswith(prefix)})


def cmd_analyze(args):
    if bool(args.checkpoint) == bool(args.schedule):
        print("error: pass exactly one of --checkpoint or --schedule",
              file=sys.stderr)
        return EXIT_INVALID
    try:
        if args.checkpoint:
            ckpt = load_checkpoint(args.checkpoint)
            config = ckpt.config
            schedule = build_schedule(config)
            if isinstance(schedule, NeuralSchedule):
                sched_params = {n: a for n, a in ckpt.params.items()
                                if n.startswith(("a/", "b/"))}
                if sched_params:
                    from .engine import ParameterSet
                    schedule.params = ParameterSet(sched_params)
        else:
            config = ExperimentConfig()
            schedule = make_schedule(args.schedule)
    except (CheckpointError, ConfigError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    grid = GridSpec(config.train.grid_m)
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    try:
        report = metrics.schedule_diagnostics(schedule, grid,
                                              _diagnostic_pairs(config))
    except DegenerateTrajectoryError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DIVERGED
    csv_path = os.path.join(outdir, "curvature_profile.csv")
    with open(csv_path, "w") as fh:
        fh.write("t,mean_kappa,det\n")
        for t, k, d in zip(report.profile_t, report.mean_curvature_profile,
                           report.det_profile):
            fh.write("%s,%s,%s\n" % (_fmt(t), _fmt(k), _fmt(d)))
    svgplot.lines(os.path.join(outdir, "curvature_profile.svg"),
                  report.profile_t,
                  [("mean curvature", report.mean_curvature_profile),
                   ("determinant", report.det_profile)],
                  title="schedule geometry")
    print("determinant_integral %s" % _fmt(report.determinant_integral))
    return EXIT_OK


def cmd_compare(args):
    try:
        config = _load_config_with_overrides(args)
        if not config.lambda_grid:
            raise ConfigError("lambda_grid is empty")
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)

    variants = [("rf_uniform", "linear", 0.0, "uniform"),
                ("rf_logit_normal", "linear", 0.0, "logit-normal")]
    for lam in config.lambda_grid:
        variants.append(("curveflow_lam_%g" % lam, "neural", lam,
                         config.train.timestep_sampler))

    results_path = os.path.join(outdir, "results.csv")
    with open(results_path, "w") as fh:
        fh.write("variant,lambda,energy_distance,sliced_wasserstein,"
                 "determinant_integral\n")
        for name, kind, lam, sampler in variants:
            vcfg = copy.deepcopy(config)
            vcfg.schedule.kind = kind
            vcfg.train.lam = lam
            vcfg.train.timestep_sampler = sampler
            try:
                _, schedule, model, _, held_out = run_experiment(vcfg)
                report, _ = evaluate_model(vcfg, schedule, model, held_out)
            except DivergenceError as exc:
                print("variant %s diverged: %s" % (name, exc), file=sys.stderr)
                continue
            fh.write("%s,%s,%s,%s,%s\n"
                     % (name, _fmt(lam), _fmt(report.energy_distance),
                        _fmt(report.sliced_wasserstein),
                        _fmt(report.determinant_integral)))
            fh.flush()
            print("%s: energy=%.4f sliced_w=%.4f det_integral=%.6f"
                  % (name, report.energy_distance, report.sliced_wasserstein,
                     report.determinant_integral))
    return EXIT_OK


def gradcheck(seed=0, corrupt=False):
    """Autodiff vs finite differences on a small total-loss instance.

    Returns (max relative error, worst parameter name).
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    dim, batch = 2, 4
    schedule = NeuralSchedule(hidden=8, embed=8, seed=seed)
    schedule.params = schedule.params.copy()
    # perturb all schedule weights so the residual nets are active
    from .engine import ParameterSet
    schedule.params = ParameterSet({
        n: a + 0.1 * rng.standard_normal(a.shape)
        for n, a in schedule.params.items()})
    model = VelocityField.initialize(dim, seed=seed + 1, hidden=16,
                                     time_features=8)
    params = merge_params(model.params, schedule.params)
    x0 = rng.standard_normal((batch, dim))
    eps = rng.standard_normal((batch, dim))
    t = np.clip(rng.random(batch), 0.05, 0.95)
    grid = GridSpec(16)

    def loss_fn(p):
        fm, reg = losses.total_loss_graph((x0, eps, t), model, schedule,
                                          grid, 0.1, p)
        return fm + reg

    _, g_ad = evaluate_with_gradients(loss_fn, params)
    g_fd = finite_difference_gradient(loss_fn, params, step=1e-5)
    if corrupt:
        bad = g_ad.as_dict()
        name = sorted(bad)[0]
        bad[name] = bad[name] + 1e-2
        from .engine import GradientMap
        g_ad = GradientMap(bad)
    return max_relative_error(g_ad, g_fd)


def cmd_gradcheck(args):
    err, worst = gradcheck(seed=args.seed, corrupt=args.corrupt_gradient)
    print("max relative error %s (parameter %s)" % (_fmt(err), worst or "-"))
    if err < 1e-4:
        return EXIT_OK
    print("gradcheck FAILED: worst offender %s" % worst, file=sys.stderr)
    return EXIT_CHECK_FAILED


def make_parser():
    parser = argparse.ArgumentParser(prog="curveflow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="sample from a trained checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--method", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("analyze", help="schedule geometry diagnostics")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--schedule", default=None)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="train the lambda grid plus RF baselines")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gradcheck", help="autodiff vs finite differences")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-gradient", action="store_true",
                   help=argparse.SUPPRESS)  # negative-control test hook
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
