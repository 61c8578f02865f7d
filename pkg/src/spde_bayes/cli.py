"""Command-line interface.

Subcommands: simulate, estimate, posterior, bayes, bvm, experiment, mc.
Output files land in --out, else $SPDE_BAYES_OUT, else ./spde-bayes-out.
Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .backend import backend_name
from .bayes import bayes_estimator, bvm_distance, posterior_from_mle
from .config import (ExperimentConfig, load_config_file, parameter_set_config,
                     parse_loss, parse_prior)
from .errors import ConfigurationError, NumericFailure
from .estimators import MLE_ROUTES, pivot
from .harness import (default_output_dir, mc_consistency_suite, mc_gap_suite,
                      mc_pivot_suite, run_parameter_set, write_csv)
from .simulate import SimulationGrid, replicate_seed, simulate_modes, write_paths_csv


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--set", default="I-a0",
                        choices=["I-a0", "I-a0999", "II"],
                        help="built-in parameter set (default I-a0)")
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="config file overriding --set")
    parser.add_argument("--out", default=None, metavar="DIR",
                        help="output directory (default $SPDE_BAYES_OUT)")


def _resolve_config(args) -> ExperimentConfig:
    if args.config:
        return load_config_file(args.config)
    return parameter_set_config(args.set)


def _apply_grid_override(config: ExperimentConfig, dt) -> ExperimentConfig:
    if dt is None:
        return config
    grid = SimulationGrid.from_dt(float(dt), config.model.horizon)
    return replace(config, grid=grid)


def _single_replicate(config: ExperimentConfig, seed, n_modes: int,
                      keep_paths: bool = False):
    master = config.master_seed if seed is None else int(seed)
    rep_seed = replicate_seed(master, 0)
    pathset = simulate_modes(config.model, config.theta_true,
                             config.u0[:n_modes], config.grid, rep_seed,
                             keep_paths=keep_paths)
    return master, pathset


def _cmd_simulate(args) -> int:
    config = _apply_grid_override(_resolve_config(args), args.dt)
    n = args.n_modes or config.model.k_max
    _, pathset = _single_replicate(config, args.seed, n, keep_paths=True)
    out = default_output_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "paths.csv"
    with open(path, "w", newline="\n") as fh:
        write_paths_csv(pathset, fh)
    print(path)
    return 0


def _cmd_estimate(args) -> int:
    config = _apply_grid_override(_resolve_config(args), args.dt)
    if args.route not in MLE_ROUTES:
        raise ConfigurationError(f"unknown route {args.route!r}")
    n = args.n_modes or max(config.n_list)
    master, pathset = _single_replicate(config, args.seed, n)
    result = MLE_ROUTES[args.route](config.model, pathset, n)
    xi = pivot(result, config.theta_true)
    print("seed,route,N,theta_hat,theta_hat_mle,fisher,pivot")
    print(",".join(_fmt(v) for v in (
        master, result.route, result.n_modes, result.theta_hat,
        result.theta_hat_mle, result.fisher, xi)))
    return 0


def _cmd_posterior(args) -> int:
    config = _apply_grid_override(_resolve_config(args), args.dt)
    n = args.n_modes or max(config.n_list)
    _, pathset = _single_replicate(config, args.seed, n)
    result = MLE_ROUTES[config.route](config.model, pathset, n)
    prior = parse_prior(args.prior)
    post = posterior_from_mle(result, prior)
    import numpy as np

    params = post.conjugate_params() or (post.theta_hat, 1.0 / post.fisher)
    m, v = params
    s = v ** 0.5
    grid = np.linspace(max(0.0, m - 8.0 * s), max(m, 0.0) + 8.0 * s,
                       args.points)
    density = np.asarray(post.density(grid))
    out = default_output_dir(args.out)
    path = write_csv(out / "posterior.csv", ("theta", "density"),
                     zip(grid.tolist(), density.tolist()))
    print(path)
    return 0


def _cmd_bayes(args) -> int:
    config = _apply_grid_override(_resolve_config(args), args.dt)
    n = args.n_modes or max(config.n_list)
    master, pathset = _single_replicate(config, args.seed, n)
    result = MLE_ROUTES[config.route](config.model, pathset, n)
    prior = parse_prior(args.prior)
    loss = parse_loss(args.loss)
    post = posterior_from_mle(result, prior)
    est = bayes_estimator(post, loss, scaled=args.scaled)
    print("seed,N,prior,loss,scaled,beta,risk_at_min,iterations,boundary")
    print(",".join(_fmt(v) for v in (
        master, n, prior.label(), loss.label(), int(args.scaled), est.beta,
        est.risk_at_min, est.optimizer_iterations, int(est.boundary))))
    return 0


def _cmd_bvm(args) -> int:
    config = _apply_grid_override(_resolve_config(args), args.dt)
    n_max = max(config.n_list)
    _, pathset = _single_replicate(config, args.seed, n_max)
    prior = parse_prior(args.prior)
    rows = []
    for n in config.n_list:
        result = MLE_ROUTES[config.route](config.model, pathset, n)
        post = posterior_from_mle(result, prior)
        rows.append((n, bvm_distance(post)))
    out = default_output_dir(args.out)
    path = write_csv(out / "bvm.csv", ("N", "distance"), rows)
    print(path)
    return 0


def _cmd_experiment(args) -> int:
    config = _resolve_config(args)
    written = run_parameter_set(config if args.config else args.set,
                                output_dir=args.out)
    for name in sorted(written):
        print(written[name])
    return 0


def _cmd_mc(args) -> int:
    config = _resolve_config(args)
    if args.suite == "pivot":
        report = mc_pivot_suite(config, route=args.route,
                                replicates=args.replicates)
    elif args.suite == "consistency":
        report = mc_consistency_suite(config, replicates=args.replicates)
    else:
        report = mc_gap_suite(config, replicates=args.replicates)
    out = default_output_dir(args.out)
    path = report.write(out / f"mc_{args.suite}.csv")
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spde-bayes",
        description="Drift inference for spectrally observed parabolic "
                    "SPDEs: simulation, MLE, Bayesian estimators, and "
                    "Monte Carlo validation suites.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({backend_name()} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate mode paths, dump CSV")
    _add_common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--n-modes", type=int, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="one-replicate drift estimate")
    _add_common(p)
    p.add_argument("--route", default="increments",
                   choices=["increments", "endpoints", "oracle"])
    p.add_argument("--n-modes", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("posterior", help="posterior density table")
    _add_common(p)
    p.add_argument("--prior", default="uniform")
    p.add_argument("--n-modes", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=_cmd_posterior)

    p = sub.add_parser("bayes", help="Bayesian estimator for one replicate")
    _add_common(p)
    p.add_argument("--loss", default="quadratic",
                   help="quadratic | power:a | exp-power:r")
    p.add_argument("--prior", default="uniform",
                   help="uniform | tnormal:mu0,var0")
    p.add_argument("--scaled", action="store_true",
                   help="minimize the sqrt(I_N)-scaled loss")
    p.add_argument("--n-modes", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(func=_cmd_bayes)

    p = sub.add_parser("bvm", help="BvM distance table over N")
    _add_common(p)
    p.add_argument("--prior", default="uniform")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(func=_cmd_bvm)

    p = sub.add_parser("experiment", help="reproduce a parameter set")
    _add_common(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("mc", help="seeded Monte Carlo validation suite")
    _add_common(p)
    p.add_argument("--suite", required=True,
                   choices=["pivot", "consistency", "gap"])
    p.add_argument("--replicates", type=int, default=None, metavar="M")
    p.add_argument("--route", default="oracle",
                   choices=["increments", "endpoints", "oracle"])
    p.set_defaults(func=_cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
