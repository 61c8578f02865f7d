"""Exact simulation of the Fourier modes and their observation statistics.

Each mode is a geometric-Brownian-motion-type scalar SDE with closed-form
solution, so paths advance by the exact exponential update; the only
discretization error in the whole pipeline lives in the left-point Ito sum
statistic, exactly as for an observer of continuous data.

Randomness: a master seed names a replicate; mode k draws from its own
counter-based stream keyed by (seed, k), so enlarging k_max never perturbs
the retained modes and replicates/modes can be generated concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import backend
from .errors import OracleUnavailableError
from .spectral import SpectralModel

GRID_REL_TOL = 1e-12


@dataclass(frozen=True)
class SimulationGrid:
    """Uniform time grid with n_steps * dt = T (to one part in 1e12)."""

    dt: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def horizon(self) -> float:
        return self.dt * self.n_steps

    @classmethod
    def from_dt(cls, dt: float, horizon: float) -> "SimulationGrid":
        n = int(round(horizon / dt))
        grid = cls(dt=dt, n_steps=max(n, 1))
        if abs(grid.horizon - horizon) > GRID_REL_TOL * horizon:
            raise ValueError(
                f"dt={dt} does not tile horizon {horizon} within 1e-12"
            )
        return grid

    @classmethod
    def from_steps(cls, n_steps: int, horizon: float) -> "SimulationGrid":
        return cls(dt=horizon / n_steps, n_steps=n_steps)

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class ModePathSet:
    """Simulated modes plus their per-mode observation statistics.

    ito_sums and log_endpoints are the observable statistics consumed by the
    estimators. w_terminal and theta_true form the oracle channel: they are
    not observable and only `oracle_`-style consumers and tests may use
    them. paths is None in statistics-only mode.
    """

    u0: np.ndarray
    theta_true: Optional[float]
    seed: int
    grid: SimulationGrid
    ito_sums: np.ndarray
    log_endpoints: np.ndarray
    w_terminal: Optional[np.ndarray]
    paths: Optional[np.ndarray] = None

    @property
    def n_modes(self) -> int:
        return int(self.u0.size)

    def observable_view(self) -> "ModePathSet":
        """Copy with the oracle channel stripped."""
        return replace(self, theta_true=None, w_terminal=None)

    def has_oracle(self) -> bool:
        return self.w_terminal is not None and self.theta_true is not None


def mode_stream(seed: int, mode_index: int) -> np.random.Generator:
    """Counter-based stream for 1-based mode k of the given replicate."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(mode_index - 1,))
    return np.random.Generator(np.random.Philox(ss))


def replicate_seed(master_seed: int, replicate_index: int) -> int:
    """Derived per-replicate seed; adding replicates never perturbs others."""
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=(int(replicate_index),))
    return int(ss.generate_state(1, np.uint64)[0])


def draw_increments(seed: int, n_modes: int, grid: SimulationGrid) -> np.ndarray:
    """Brownian increments dW[k-1, i], already scaled by sqrt(dt)."""
    sqdt = np.sqrt(grid.dt)
    dw = np.empty((n_modes, grid.n_steps))
    for k in range(1, n_modes + 1):
        dw[k - 1] = mode_stream(seed, k).standard_normal(grid.n_steps)
    dw *= sqdt
    return dw


def simulate_modes(model: SpectralModel, theta: float, u0, grid: SimulationGrid,
                   seed: int, keep_paths: bool = False) -> ModePathSet:
    """Simulate len(u0) modes exactly and accumulate their statistics.

    The per-step update is u_k(t+dt) = u_k(t) * exp(log_step_k + vol_k dW);
    statistics are always computed (single pass through the increments),
    trajectories are stored only when keep_paths is set.
    """
    u0 = np.ascontiguousarray(u0, dtype=float)
    if u0.ndim != 1 or u0.size == 0:
        raise ValueError("u0 must be a nonempty 1-D array")
    if np.any(u0 == 0):
        raise ValueError("initial modes must be nonzero")
    n_modes = u0.size
    if n_modes > model.k_max:
        raise ValueError(f"requested {n_modes} modes but model has {model.k_max}")
    if not theta > 0:
        raise ValueError("theta must be positive")
    if abs(grid.horizon - model.horizon) > GRID_REL_TOL * model.horizon:
        raise ValueError("grid horizon does not match the model horizon")

    mu = model.mu[:n_modes]
    q = model.q[:n_modes]
    log_step = -(theta * mu + 0.5 * model.sigma ** 2 * q ** 2) * grid.dt
    vol = model.sigma * q

    dw = draw_increments(seed, n_modes, grid)
    ito, w_term = backend.mode_statistics(dw, log_step, vol)
    # Factored form of the accumulated log increments: exact in dt and free
    # of time-discretization error.
    log_end = grid.n_steps * log_step + vol * w_term
    paths = backend.synthesize_paths(u0, dw, log_step, vol) if keep_paths else None
    return ModePathSet(
        u0=u0,
        theta_true=float(theta),
        seed=int(seed),
        grid=grid,
        ito_sums=ito,
        log_endpoints=log_end,
        w_terminal=w_term,
        paths=paths,
    )


def ito_log_integral(pathset: ModePathSet, k: int) -> float:
    """Left-point Riemann-Ito sum of du_k/u_k for 1-based mode k."""
    if not 1 <= k <= pathset.n_modes:
        raise ValueError(f"mode index {k} out of range")
    return float(pathset.ito_sums[k - 1])


def log_endpoint_statistic(pathset: ModePathSet, k: int) -> float:
    """log(u_k(T)/u_k(0)), sign-safe (both ends share the sign of u_k(0))."""
    if not 1 <= k <= pathset.n_modes:
        raise ValueError(f"mode index {k} out of range")
    return float(pathset.log_endpoints[k - 1])


def write_paths_csv(pathset: ModePathSet, fh) -> None:
    """Dump trajectories as `t,u_1,...,u_N` rows with round-trip formatting."""
    if pathset.paths is None:
        raise ValueError("pathset was simulated in statistics-only mode")
    n = pathset.n_modes
    fh.write("t," + ",".join(f"u_{k}" for k in range(1, n + 1)) + "\n")
    times = pathset.grid.times()
    for i, t in enumerate(times):
        row = [format(t, ".17g")]
        row.extend(format(v, ".17g") for v in pathset.paths[:, i])
        fh.write(",".join(row) + "\n")
