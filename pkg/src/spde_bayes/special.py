"""Standard-normal density, CDF and quantile helpers.

Every closed-form posterior/BvM oracle in this package routes through the
normal CDF, so it is kept in one place and pinned by high-precision fixtures
(relative error <= 1e-14 on the tested range). The implementation delegates
to the complementary error function, which is accurate in both tails.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sc

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def normal_pdf(x):
    """Standard normal density, vectorized."""
    x = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return out if out.ndim else float(out)


def normal_cdf(x):
    """P(Z <= x) for standard normal Z, accurate in the left tail."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * _sc.erfc(-x / _SQRT2)
    return out if out.ndim else float(out)


def normal_sf(x):
    """P(Z > x); complementary CDF, accurate in the right tail."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * _sc.erfc(x / _SQRT2)
    return out if out.ndim else float(out)


def normal_ppf(p):
    """Quantile function (inverse CDF)."""
    p = np.asarray(p, dtype=float)
    out = _sc.ndtri(p)
    return out if out.ndim else float(out)


def log_normal_cdf(x):
    """log P(Z <= x), usable far into the left tail."""
    x = np.asarray(x, dtype=float)
    out = _sc.log_ndtr(x)
    return out if out.ndim else float(out)


def abs_moment(r: float) -> float:
    """E|Z|^r = 2^{r/2} Gamma((r+1)/2) / sqrt(pi) for r > -1."""
    if r <= -1:
        raise ValueError("absolute moment requires r > -1")
    return 2.0 ** (r / 2.0) * math.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)
