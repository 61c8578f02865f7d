"""Experiment configuration: built-in parameter sets and the config file
format.

Config files are flat structured text: `[section]` headers with
`key = value` lines; arrays are bracketed and comma-separated. The shipped
parameter-set files under configs/ are complete, self-describing
reproducibility artifacts; `write_config_echo` emits the same format
(including the initial-mode floor note) next to every experiment's output.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bayes import LossFunction, Prior
from .errors import ConfigurationError
from .simulate import SimulationGrid
from .spectral import SpectralModel, heat_initial_modes, power_law_model

DEFAULT_FLOOR = 1e-3
U0_ANALYTIC_HEAT = "analytic-heat"
U0_EXPLICIT = "explicit"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a seeded experiment needs, resolved and validated."""

    name: str
    model: SpectralModel
    theta_true: float
    u0: np.ndarray
    u0_kind: str
    u0_floor: Optional[float]
    grid: SimulationGrid
    n_list: tuple
    posterior_n_list: tuple
    route: str
    priors: tuple
    losses: tuple
    master_seed: int
    replicates: int
    output_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "u0",
                           np.ascontiguousarray(self.u0, dtype=float))
        if self.replicates < 1:
            raise ConfigurationError("replicate count must be >= 1")
        if list(self.n_list) != sorted(self.n_list):
            raise ConfigurationError("n_list must be nondecreasing")
        if max(self.n_list) > self.model.k_max:
            raise ConfigurationError("max(n_list) exceeds the model's k_max")
        if self.u0.size != self.model.k_max:
            raise ConfigurationError("u0 length must equal k_max")
        if not self.theta_true > 0:
            raise ConfigurationError("theta_true must be positive")


def parse_prior(spec: str) -> Prior:
    """Parse `uniform` or `tnormal:mu0,var0` (CLI/config prior syntax)."""
    s = spec.strip()
    if s == "uniform":
        return Prior.uniform()
    if s.startswith("tnormal:"):
        try:
            params = s.split(":", 1)[1].replace(":", ",")
            mu0, var0 = (float(v) for v in params.split(","))
        except ValueError as exc:
            raise ConfigurationError(f"bad prior spec {spec!r}") from exc
        return Prior.truncated_normal(mu0, var0)
    raise ConfigurationError(f"unknown prior spec {spec!r}")


def parse_loss(spec: str) -> LossFunction:
    """Parse `quadratic`, `power:a`, or `exp-power:r`."""
    s = spec.strip()
    if s == "quadratic":
        return LossFunction.quadratic()
    for prefix, ctor in (("power:", LossFunction.power),
                         ("exp-power:", LossFunction.exp_power)):
        if s.startswith(prefix):
            try:
                return ctor(float(s[len(prefix):]))
            except ValueError as exc:
                raise ConfigurationError(f"bad loss spec {spec!r}") from exc
    raise ConfigurationError(f"unknown loss spec {spec!r}")


def _resolve_u0(kind: str, model: SpectralModel, floor: Optional[float],
                explicit) -> np.ndarray:
    if kind == U0_ANALYTIC_HEAT:
        return heat_initial_modes(model.k_max,
                                  DEFAULT_FLOOR if floor is None else floor)
    if kind == U0_EXPLICIT:
        u0 = np.asarray(explicit, dtype=float)
        if u0.size != model.k_max or np.any(u0 == 0):
            raise ConfigurationError("explicit u0 must be nonzero, length k_max")
        return u0
    raise ConfigurationError(f"unknown u0 kind {kind!r}")


def parameter_set_config(which: str, output_dir: Optional[str] = None,
                         **overrides) -> ExperimentConfig:
    """Built-in configs reproducing the numerical study's parameter sets.

    `I-a0` / `I-a0999`: drift 0.3 with noise-weight exponents 0 and 0.999,
    quadratic loss. `II`: drift 0.505, exponent 1, exponential-power loss
    with exponent 3/2 computed in both scaled and unscaled form. All use
    sigma = T = 1, 20 modes, dt = 5e-5, flat and truncated-normal(1, 0.1)
    priors.
    """
    base = dict(
        k_max=20,
        sigma=1.0,
        horizon=1.0,
        dt=5e-5,
        n_list=tuple(range(1, 21)),
        posterior_n_list=(2, 4, 8),
        route="increments",
        priors=(Prior.uniform(), Prior.truncated_normal(1.0, 0.1)),
        master_seed=727_927_041,
        replicates=100,
    )
    if which in ("I-a0", "SetI_alpha0"):
        theta, alpha = 0.3, 0.0
        losses = (LossFunction.quadratic(),)
    elif which in ("I-a0999", "SetI_alpha0999"):
        theta, alpha = 0.3, 0.999
        losses = (LossFunction.quadratic(),)
    elif which in ("II", "SetII"):
        theta, alpha = 0.505, 1.0
        losses = (LossFunction.exp_power(1.5),)
    else:
        raise ConfigurationError(f"unknown parameter set {which!r}")
    base.update(overrides)
    model = power_law_model(2.0, alpha, base["k_max"], base["sigma"],
                            base["horizon"])
    u0 = heat_initial_modes(base["k_max"], DEFAULT_FLOOR)
    return ExperimentConfig(
        name=which,
        model=model,
        theta_true=base.get("theta_true", theta),
        u0=u0,
        u0_kind=U0_ANALYTIC_HEAT,
        u0_floor=DEFAULT_FLOOR,
        grid=SimulationGrid.from_dt(base["dt"], base["horizon"]),
        n_list=tuple(base["n_list"]),
        posterior_n_list=tuple(base["posterior_n_list"]),
        route=base["route"],
        priors=tuple(base["priors"]),
        losses=tuple(base.get("losses", losses)),
        master_seed=int(base["master_seed"]),
        replicates=int(base["replicates"]),
        output_dir=output_dir,
    )


def _parse_scalar(text: str):
    s = text.strip()
    if s.lower() in ("true", "yes", "on"):
        return True
    if s.lower() in ("false", "no", "off"):
        return False
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    return s


def _parse_value(text: str):
    s = text.strip()
    if s.startswith("[") and s.endswith("]"):
        inner = s[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(tok) for tok in inner.split(",")]
    return _parse_scalar(s)


def load_config_file(path) -> ExperimentConfig:
    """Read an experiment config from the flat `[section]` format."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = cp.read(str(path))
    if not read:
        raise ConfigurationError(f"config file not found: {path}")
    sec = {name: {k: _parse_value(v) for k, v in cp[name].items()}
           for name in cp.sections()}

    m = sec.get("model", {})
    sigma = float(m.get("sigma", 1.0))
    horizon = float(m.get("t", m.get("horizon", 1.0)))
    if "mu" in m or "q" in m:
        if not ("mu" in m and "q" in m):
            raise ConfigurationError("explicit spectra need both mu and q")
        model = SpectralModel(mu=np.asarray(m["mu"], dtype=float),
                              q=np.asarray(m["q"], dtype=float),
                              sigma=sigma, horizon=horizon)
    else:
        if m.get("family", "power") != "power":
            raise ConfigurationError("family must be `power` or explicit mu/q")
        model = power_law_model(float(m.get("p", 2.0)),
                                float(m.get("alpha", 0.0)),
                                int(m.get("k_max", 20)), sigma, horizon)

    truth = sec.get("truth", {})
    theta_true = float(truth.get("theta", 0.3))

    init = sec.get("initial", {})
    u0_kind = str(init.get("kind", U0_ANALYTIC_HEAT))
    floor = init.get("floor", DEFAULT_FLOOR)
    floor = None if floor in ("none", "") else float(floor)
    u0 = _resolve_u0(u0_kind, model, floor, init.get("values"))

    grid_sec = sec.get("grid", {})
    grid = SimulationGrid.from_dt(float(grid_sec.get("dt", 5e-5)), horizon)

    est = sec.get("estimation", {})
    n_list = tuple(int(n) for n in est.get("n_list", list(range(1, model.k_max + 1))))
    posterior_ns = tuple(int(n) for n in est.get("posterior_n_list", [2, 4, 8]))
    route = str(est.get("route", "increments"))

    priors = []
    for key, val in sec.get("priors", {"uniform": True}).items():
        if key == "uniform" and val:
            priors.append(Prior.uniform())
        elif key == "tnormal":
            mu0, var0 = (float(x) for x in val)
            priors.append(Prior.truncated_normal(mu0, var0))
        elif val:
            raise ConfigurationError(f"unknown prior key {key!r}")

    losses = []
    for key, val in sec.get("losses", {"quadratic": True}).items():
        if key == "quadratic" and val:
            losses.append(LossFunction.quadratic())
        elif key == "power":
            losses.append(LossFunction.power(float(val)))
        elif key in ("exp_power", "exp-power"):
            losses.append(LossFunction.exp_power(float(val)))
        elif val:
            raise ConfigurationError(f"unknown loss key {key!r}")

    seeds = sec.get("seeds", {})
    out = sec.get("output", {})
    out_dir = out.get("dir")
    return ExperimentConfig(
        name=str(sec.get("meta", {}).get("name", Path(str(path)).stem)),
        model=model,
        theta_true=theta_true,
        u0=u0,
        u0_kind=u0_kind,
        u0_floor=floor,
        grid=grid,
        n_list=n_list,
        posterior_n_list=posterior_ns,
        route=route,
        priors=tuple(priors),
        losses=tuple(losses),
        master_seed=int(seeds.get("master", 727_927_041)),
        replicates=int(seeds.get("replicates", 100)),
        output_dir=str(out_dir) if out_dir else None,
    )


def _fmt_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_config_echo(config: ExperimentConfig, fh) -> None:
    """Echo a resolved config in the file format (a reproducibility artifact)."""
    fam = config.model.family
    fh.write(f"[meta]\nname = {config.name}\n\n")
    fh.write("[model]\n")
    if fam is not None:
        fh.write("family = power\n")
        fh.write(f"p = {_fmt_scalar(fam.p)}\nalpha = {_fmt_scalar(fam.alpha)}\n")
        fh.write(f"k_max = {config.model.k_max}\n")
    else:
        fh.write("mu = [" + ", ".join(_fmt_scalar(x) for x in config.model.mu) + "]\n")
        fh.write("q = [" + ", ".join(_fmt_scalar(x) for x in config.model.q) + "]\n")
    fh.write(f"sigma = {_fmt_scalar(config.model.sigma)}\n")
    fh.write(f"T = {_fmt_scalar(config.model.horizon)}\n\n")
    fh.write(f"[truth]\ntheta = {_fmt_scalar(config.theta_true)}\n\n")
    fh.write("[initial]\n")
    fh.write(f"kind = {config.u0_kind}\n")
    if config.u0_floor is not None:
        fh.write(f"floor = {_fmt_scalar(config.u0_floor)}\n")
        fh.write("# analytically vanishing modes (even heat modes) are "
                 "floored to this value\n")
    fh.write("\n[grid]\n")
    fh.write(f"dt = {_fmt_scalar(config.grid.dt)}\n\n")
    fh.write("[estimation]\n")
    fh.write(f"route = {config.route}\n")
    fh.write("n_list = [" + ", ".join(str(n) for n in config.n_list) + "]\n")
    fh.write("posterior_n_list = ["
             + ", ".join(str(n) for n in config.posterior_n_list) + "]\n\n")
    fh.write("[priors]\n")
    for prior in config.priors:
        if prior.kind == "uniform":
            fh.write("uniform = true\n")
        elif prior.kind == "truncated_normal":
            fh.write(f"tnormal = [{_fmt_scalar(prior.mu0)}, "
                     f"{_fmt_scalar(prior.var0)}]\n")
    fh.write("\n[losses]\n")
    for loss in config.losses:
        if loss.kind == "quadratic":
            fh.write("quadratic = true\n")
        elif loss.kind == "power":
            fh.write(f"power = {_fmt_scalar(loss.a)}\n")
        elif loss.kind == "exp_power":
            fh.write(f"exp_power = {_fmt_scalar(loss.r)}\n")
    fh.write("\n[seeds]\n")
    fh.write(f"master = {config.master_seed}\n")
    fh.write(f"replicates = {config.replicates}\n")
    if config.output_dir:
        fh.write(f"\n[output]\ndir = {config.output_dir}\n")
