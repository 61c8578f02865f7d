"""Experiment driver: parameter-set reproduction and Monte Carlo suites.

Figure reproduction is data-level: the driver emits the plotted quantities
(posterior density tables, estimator-vs-N tables, scaled-gap tables) as
CSV; rendering is out of scope. All randomness flows from the config's
master seed through per-replicate derived seeds, so reruns are
byte-identical and adding replicates never perturbs existing ones.

Oracle-route Monte Carlo suites sample the terminal noise on a single-step
grid by default: the oracle estimator is an exact functional of the
terminal Brownian values, whose law does not depend on the partition, and
the fine grid would spend minutes buying nothing. Increment-route suites
always honor the config's dt.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bayes import (LossFunction, Prior, bayes_estimator, posterior_from_mle)
from .config import ExperimentConfig, parameter_set_config, write_config_echo
from .errors import ConfigurationError
from .estimators import (MLE_ROUTES, MleResult, mle_endpoints, mle_increments,
                         mle_oracle, pivot)
from .simulate import ModePathSet, SimulationGrid, replicate_seed, simulate_modes
from .special import normal_cdf
from .spectral import fisher_info

ENV_OUTPUT_DIR = "SPDE_BAYES_OUT"
KS_COEFF_1PCT = 1.63  # asymptotic 1% Kolmogorov-Smirnov critical coefficient

# Regression thresholds for the increments-vs-oracle estimator gap at
# Parameter Set I, N = 20, dt = 5e-5: the 99th-percentile gap observed over
# the 100-seed pilots (master seed below). Re-derive with
# pilot_increment_threshold(parameter_set_config(name)). At alpha = 0 the
# gap is dominated by the deterministic second-order Ito-sum expansion
# (theta^2 dt / 2) sum(mu^3/q^2) / sum(mu^2/q^2); at alpha = 0.999 the
# stochastic component dominates.
PILOT_MASTER_SEED = 727_927_041
INCREMENT_GAP_PILOT_SEEDS = 100
INCREMENT_GAP_P99 = {
    "I-a0": 0.0006913712454822169,
    "I-a0999": 0.003941469858261466,
}


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def default_output_dir(explicit: Optional[str] = None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(ENV_OUTPUT_DIR)
    return Path(env) if env else Path("spde-bayes-out")


def write_csv(path: Path, header: Sequence[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


PLOT_HEADERS = {
    "estimator": ("N", "theta_hat", "beta_tilde", "beta_hat", "fisher"),
    "gap": ("N", "sqrtI_gap_tilde", "sqrtI_gap_hat"),
}


def emit_plot_data(kind: str, rows, path: Path,
                   header: Optional[Sequence[str]] = None) -> Path:
    """Write one figure-analog table with its documented header."""
    if header is None:
        if kind not in PLOT_HEADERS:
            raise ConfigurationError(f"unknown plot-data kind {kind!r}")
        header = PLOT_HEADERS[kind]
    return write_csv(path, header, rows)


def ks_statistic(sample) -> float:
    """Two-sided sup distance between the empirical CDF and the standard
    normal, by the sorted-sample formula."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n < 2:
        raise ValueError("KS statistic needs at least two observations")
    cdf = normal_cdf(x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    return float(max(d_plus, d_minus))


@dataclass
class MonteCarloReport:
    """Tabular suite output; deterministic given the config."""

    suite: str
    header: tuple
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def write(self, path: Path) -> Path:
        return write_csv(path, self.header, self.rows)


def _simulate_replicate(config: ExperimentConfig, index: int, n_modes: int,
                        grid: Optional[SimulationGrid] = None) -> ModePathSet:
    seed = replicate_seed(config.master_seed, index)
    return simulate_modes(config.model, config.theta_true,
                          config.u0[:n_modes], grid or config.grid, seed)


def _require_noise(config: ExperimentConfig) -> None:
    if config.model.sigma == 0:
        raise ConfigurationError(
            "sigma = 0 is degenerate (zero-variance pivot); suite refused"
        )


def _suite_grid(config: ExperimentConfig, route: str,
                exact_oracle_grid: bool) -> SimulationGrid:
    if route == "oracle" and exact_oracle_grid:
        return SimulationGrid.from_steps(1, config.model.horizon)
    return config.grid


def mc_pivot_suite(config: ExperimentConfig, route: str = "oracle",
                   replicates: Optional[int] = None,
                   ns: Optional[Sequence[int]] = None,
                   exact_oracle_grid: bool = True) -> MonteCarloReport:
    """Distribution check of the pivot against the standard normal.

    For the oracle route the pivot is exactly standard normal at every N,
    so the 1% KS critical value is a hard pass criterion; for the
    increments route the report is diagnostic only (discretization bias).
    """
    _require_noise(config)
    if route not in MLE_ROUTES:
        raise ConfigurationError(f"unknown estimator route {route!r}")
    m = replicates if replicates is not None else max(config.replicates, 500)
    if m < 500:
        raise ConfigurationError("pivot suite needs >= 500 replicates for "
                                 "KS power")
    ns = tuple(ns) if ns is not None else config.n_list
    grid = _suite_grid(config, route, exact_oracle_grid)
    estimator = MLE_ROUTES[route]
    n_max = max(ns)
    pivots = {n: np.empty(m) for n in ns}
    truncated = {n: 0 for n in ns}
    for i in range(m):
        pathset = _simulate_replicate(config, i, n_max, grid)
        for n in ns:
            res = estimator(config.model, pathset, n)
            pivots[n][i] = pivot(res, config.theta_true)
            truncated[n] += int(res.truncated)
    threshold = KS_COEFF_1PCT / math.sqrt(m)
    report = MonteCarloReport(
        suite="pivot",
        header=("N", "route", "replicates", "mean", "sd", "ks_stat",
                "ks_threshold_1pct", "ks_pass", "n_truncated"),
        meta={"route": route, "grid_steps": grid.n_steps,
              "master_seed": config.master_seed},
    )
    for n in ns:
        sample = pivots[n]
        ks = ks_statistic(sample)
        report.rows.append((
            n, route, m, float(np.mean(sample)), float(np.std(sample, ddof=1)),
            ks, threshold, int(ks < threshold), truncated[n],
        ))
    return report


def mc_consistency_suite(config: ExperimentConfig,
                         replicates: Optional[int] = None,
                         n: Optional[int] = None,
                         bound_multiple: float = 5.0,
                         exact_oracle_grid: bool = True) -> MonteCarloReport:
    """Oracle-route error-quantile sweep against the Gaussian-tail bound
    bound_multiple / sqrt(I_N)."""
    _require_noise(config)
    m = replicates if replicates is not None else max(config.replicates, 1000)
    n = n if n is not None else max(config.n_list)
    grid = _suite_grid(config, "oracle", exact_oracle_grid)
    errors = np.empty(m)
    truncated = 0
    for i in range(m):
        pathset = _simulate_replicate(config, i, n, grid)
        res = mle_oracle(config.model, pathset, n)
        errors[i] = abs(res.theta_hat - config.theta_true)
        truncated += int(res.truncated)
    bound = bound_multiple / math.sqrt(fisher_info(config.model, n))
    within = float(np.mean(errors < bound))
    report = MonteCarloReport(
        suite="consistency",
        header=("N", "replicates", "bound", "frac_within", "q50_abs_err",
                "q99_abs_err", "max_abs_err", "n_truncated"),
        meta={"master_seed": config.master_seed, "grid_steps": grid.n_steps},
    )
    report.rows.append((
        n, m, bound, within, float(np.quantile(errors, 0.5)),
        float(np.quantile(errors, 0.99)), float(np.max(errors)), truncated,
    ))
    return report


def mc_gap_suite(config: ExperimentConfig,
                 replicates: Optional[int] = None,
                 ns: Optional[Sequence[int]] = None) -> MonteCarloReport:
    """Medians of the scaled Bayes-MLE gaps sqrt(I_N) |beta - theta_hat|.

    Uses the config's route for theta_hat (increments by default, at the
    config dt) and computes both the scaled and unscaled Bayes estimators
    for every (prior, loss) pair.
    """
    _require_noise(config)
    m = replicates if replicates is not None else config.replicates
    if ns is None:
        ns = tuple(n for n in (5, 10, 20) if n in config.n_list) \
            or (max(config.n_list),)
    estimator = MLE_ROUTES[config.route]
    n_max = max(ns)
    gaps = {}
    abs_err = {}
    for i in range(m):
        pathset = _simulate_replicate(config, i, n_max)
        for n in ns:
            res = estimator(config.model, pathset, n)
            sqrt_i = math.sqrt(res.fisher)
            for prior in config.priors:
                post = posterior_from_mle(res, prior)
                for loss in config.losses:
                    for scaled, tag in ((True, "beta_tilde"), (False, "beta_hat")):
                        est = bayes_estimator(post, loss, scaled=scaled)
                        key = (n, prior.label(), loss.label(), tag)
                        gaps.setdefault(key, []).append(
                            sqrt_i * abs(est.beta - res.theta_hat))
                        abs_err.setdefault(key, []).append(
                            abs(est.beta - config.theta_true))
    report = MonteCarloReport(
        suite="gap",
        header=("N", "prior", "loss", "estimator", "replicates",
                "median_scaled_gap", "q90_scaled_gap", "median_abs_err"),
        meta={"master_seed": config.master_seed, "route": config.route},
    )
    for key in sorted(gaps):
        n, prior_label, loss_label, tag = key
        g = np.asarray(gaps[key])
        report.rows.append((
            n, prior_label, loss_label, tag, m,
            float(np.median(g)), float(np.quantile(g, 0.9)),
            float(np.median(np.asarray(abs_err[key]))),
        ))
    return report


def pilot_increment_threshold(config: ExperimentConfig,
                              n_seeds: int = INCREMENT_GAP_PILOT_SEEDS,
                              n: Optional[int] = None,
                              quantile: float = 0.99) -> float:
    """99th-percentile |increments - oracle| estimator gap over a pilot.

    The paper gives no strong-error bound for the Ito-sum statistic, so
    the regression threshold is calibrated, not derived.
    """
    n = n if n is not None else max(config.n_list)
    gaps = np.empty(n_seeds)
    for i in range(n_seeds):
        pathset = _simulate_replicate(config, i, n)
        inc = mle_increments(config.model, pathset, n)
        orc = mle_oracle(config.model, pathset, n)
        gaps[i] = abs(inc.theta_hat - orc.theta_hat)
    return float(np.quantile(gaps, quantile))


def _posterior_table_rows(config: ExperimentConfig, result: MleResult,
                          points: int = 401):
    """Common-grid density table for all configured priors."""
    posteriors = [posterior_from_mle(result, prior) for prior in config.priors]
    los, his = [], []
    for post in posteriors:
        params = post.conjugate_params()
        m, v = params if params else (post.theta_hat, 1.0 / post.fisher)
        s = math.sqrt(v)
        los.append(max(0.0, m - 8.0 * s))
        his.append(max(m, 0.0) + 8.0 * s)
    grid = np.linspace(min(los), max(his), points)
    columns = [np.asarray(post.density(grid)) for post in posteriors]
    header = ["theta"] + [
        "density_uniform" if p.kind == "uniform"
        else ("density_tnormal" if p.kind == "truncated_normal"
              else f"density_{p.label()}")
        for p in config.priors
    ]
    rows = [tuple([grid[i]] + [col[i] for col in columns])
            for i in range(points)]
    return header, rows


def run_parameter_set(which, output_dir=None) -> dict:
    """Reproduce one parameter set: single-path figure tables plus the
    statistics archive and a config echo. Returns the written paths.

    Accepts a set name (`I-a0`, `I-a0999`, `II`) or a full
    ExperimentConfig.
    """
    config = which if isinstance(which, ExperimentConfig) \
        else parameter_set_config(which)
    out = default_output_dir(output_dir or config.output_dir)
    out = out / f"set_{config.name}" if not isinstance(which, ExperimentConfig) \
        else out
    out.mkdir(parents=True, exist_ok=True)
    written = {}

    seed = replicate_seed(config.master_seed, 0)
    pathset = simulate_modes(config.model, config.theta_true, config.u0,
                             config.grid, seed)
    estimator = MLE_ROUTES[config.route]

    # Per-mode statistics archive (oracle column flagged by name).
    stat_rows = [
        (seed, k, config.model.mu[k - 1], config.model.q[k - 1],
         pathset.ito_sums[k - 1], pathset.log_endpoints[k - 1],
         pathset.w_terminal[k - 1])
        for k in range(1, pathset.n_modes + 1)
    ]
    written["statistics"] = write_csv(
        out / "statistics.csv",
        ("seed", "mode", "mu", "q", "ito_sum", "log_endpoint",
         "w_terminal_oracle"),
        stat_rows,
    )

    # Estimator-vs-N and scaled-gap tables, one file per prior; the first
    # configured loss drives the Bayes estimators.
    loss = config.losses[0]
    for prior in config.priors:
        est_rows, gap_rows = [], []
        for n in config.n_list:
            res = estimator(config.model, pathset, n)
            post = posterior_from_mle(res, prior)
            tilde = bayes_estimator(post, loss, scaled=True)
            hat = bayes_estimator(post, loss, scaled=False)
            sqrt_i = math.sqrt(res.fisher)
            est_rows.append((n, res.theta_hat, tilde.beta, hat.beta,
                             res.fisher))
            gap_rows.append((n, sqrt_i * abs(tilde.beta - res.theta_hat),
                             sqrt_i * abs(hat.beta - res.theta_hat)))
        tag = "uniform" if prior.kind == "uniform" else "tnormal"
        written[f"estimators_{tag}"] = emit_plot_data(
            "estimator", est_rows, out / f"estimators_{tag}.csv")
        written[f"gaps_{tag}"] = emit_plot_data(
            "gap", gap_rows, out / f"gaps_{tag}.csv")

    # Posterior density tables on a grid shared by both priors.
    for n in config.posterior_n_list:
        res = estimator(config.model, pathset, n)
        header, rows = _posterior_table_rows(config, res)
        written[f"posterior_N{n}"] = write_csv(
            out / f"posterior_N{n}.csv", header, rows)

    with open(out / "config.txt", "w", newline="\n") as fh:
        write_config_echo(config, fh)
    written["config"] = out / "config.txt"
    return written
