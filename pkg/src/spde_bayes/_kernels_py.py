"""Pure-numpy twin of the compiled kernels.

Same contracts as `_kernels.pyx`; numpy's pairwise summation plays the role
of the compensated loops. Agreement between backends is covered by tests
(statistics to ~1e-12 relative, paths to ~1e-9 over 2e4 steps).
"""

from __future__ import annotations

import numpy as np


def _check(dw, log_step, vol, u0=None):
    if dw.ndim != 2:
        raise ValueError("dw must be 2-D (modes x steps)")
    m = dw.shape[0]
    if log_step.shape != (m,) or vol.shape != (m,):
        raise ValueError("log_step/vol length must match dw rows")
    if u0 is not None and u0.shape != (m,):
        raise ValueError("u0 length must match dw rows")


def mode_statistics(dw, log_step, vol):
    dw = np.ascontiguousarray(dw, dtype=float)
    log_step = np.ascontiguousarray(log_step, dtype=float)
    vol = np.ascontiguousarray(vol, dtype=float)
    _check(dw, log_step, vol)
    ito = np.expm1(log_step[:, None] + vol[:, None] * dw).sum(axis=1)
    wt = dw.sum(axis=1)
    return ito, wt


def synthesize_paths(u0, dw, log_step, vol):
    u0 = np.ascontiguousarray(u0, dtype=float)
    dw = np.ascontiguousarray(dw, dtype=float)
    log_step = np.ascontiguousarray(log_step, dtype=float)
    vol = np.ascontiguousarray(vol, dtype=float)
    _check(dw, log_step, vol, u0)
    log_growth = np.cumsum(log_step[:, None] + vol[:, None] * dw, axis=1)
    paths = np.empty((dw.shape[0], dw.shape[1] + 1), dtype=float)
    paths[:, 0] = u0
    paths[:, 1:] = u0[:, None] * np.exp(log_growth)
    return paths
