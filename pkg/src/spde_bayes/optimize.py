"""Derivative-free 1-D minimization with verified brackets.

Golden-section search is used because the admitted loss functions need not
be differentiable (|x|, for instance). Unimodality is checked, not assumed:
a coarse scan must produce a three-point bracket (interior point at most as
large as both edges) before the section search runs, expanding the interval
geometrically when the minimum sits on a soft edge. Failure to bracket is
reported as an error, never silently returned as an answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OptimizationFailure

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


@dataclass(frozen=True)
class ScalarMinimum:
    x: float
    fx: float
    iterations: int
    at_lower_bound: bool = False

    @property
    def boundary(self) -> bool:
        return self.at_lower_bound


def _scan_bracket(f, lo, hi, n=17):
    """Evaluate f on a grid; return (points, values, index of minimum)."""
    pts = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    vals = [f(x) for x in pts]
    imin = min(range(n), key=lambda i: vals[i])
    return pts, vals, imin


def golden_section(f, lo: float, hi: float, tol: float,
                   max_iter: int = 500) -> tuple[float, float, int]:
    """Minimize f on [lo, hi]; returns (x, f(x), iterations).

    Assumes the bracket is valid; use minimize_unimodal for the checked
    front end.
    """
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while (b - a) > tol and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        it += 1
    x = 0.5 * (a + b)
    return x, f(x), it


def minimize_unimodal(f, lo: float, hi: float, tol: float,
                      hard_lower: float | None = None,
                      max_expansions: int = 60) -> ScalarMinimum:
    """Bracket-then-search minimization on [lo, hi] with edge expansion.

    If the coarse scan puts the minimum on an edge, the interval is grown
    geometrically on that side (never below hard_lower). Exhausting the
    expansion budget raises OptimizationFailure. A minimum pinned at
    hard_lower is returned with at_lower_bound=True rather than treated as
    a failure: the parameter space is an open half-line and the caller
    reports the boundary honestly.
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    total_iters = 0
    for _ in range(max_expansions):
        pts, vals, imin = _scan_bracket(f, lo, hi)
        total_iters += len(pts)
        if imin == 0:
            if hard_lower is not None and lo <= hard_lower:
                # Pinned at the open-set edge; refine within the first cell.
                x, fx, it = golden_section(f, pts[0], pts[1], tol)
                total_iters += it
                if f(lo) <= fx:
                    return ScalarMinimum(lo, f(lo), total_iters, True)
                return ScalarMinimum(x, fx, total_iters, False)
            width = hi - lo
            lo = lo - 2.0 * width
            if hard_lower is not None:
                lo = max(lo, hard_lower)
            continue
        if imin == len(pts) - 1:
            width = hi - lo
            hi = hi + 2.0 * width
            continue
        x, fx, it = golden_section(f, pts[imin - 1], pts[imin + 1], tol)
        total_iters += it
        return ScalarMinimum(x, fx, total_iters, False)
    raise OptimizationFailure(
        "no unimodal bracket found after expansion; risk may not be unimodal"
    )


def local_optimality(f, x: float, fx: float, tol: float,
                     lower: float | None = None,
                     multiples=(1.0, 2.0, 4.0)) -> bool:
    """Certificate that f(x +- m*tol) >= f(x) for the given multiples.

    A hair of relative slack absorbs quadrature round-off in the risk
    evaluations being compared.
    """
    slack = 1e-10 * max(abs(fx), 1e-300)
    for m in multiples:
        for s in (-1.0, 1.0):
            probe = x + s * m * tol
            if lower is not None and probe < lower:
                continue
            if f(probe) < fx - slack:
                return False
    return True
