"""Maximum-likelihood estimation of the drift and the exact Gaussian pivot.

Three algebraically equivalent routes are provided: the Ito-increment form
(what an observer of continuous data approximates), the log-endpoint form
(free of time-discretization error), and the oracle decomposition in terms
of the driving terminal noise (exact; test/diagnostic channel only).

Mode sums are accumulated with math.fsum: the weights mu_k^2/q_k^2 span
five-plus orders of magnitude at N = 20, alpha = 0, and route-equivalence
checks run at 1e-10 relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OracleUnavailableError
from .simulate import ModePathSet
from .spectral import SpectralModel, fisher_info

ROUTE_INCREMENTS = "increments"
ROUTE_ENDPOINTS = "endpoints"
ROUTE_ORACLE = "oracle"


@dataclass(frozen=True)
class MleResult:
    """Signed estimator plus its positive-part truncation.

    theta_hat is the raw likelihood maximizer over the real line; the
    truncated version clips at zero (flagged) since the parameter space is
    the positive half-line. Downstream Bayes code uses the signed value.
    """

    theta_hat: float
    theta_hat_mle: float
    route: str
    n_modes: int
    fisher: float
    truncated: bool

    @staticmethod
    def from_theta_hat(theta_hat: float, route: str, n_modes: int,
                       fisher: float) -> "MleResult":
        truncated = not theta_hat > 0
        return MleResult(
            theta_hat=theta_hat,
            theta_hat_mle=theta_hat if theta_hat > 0 else 0.0,
            route=route,
            n_modes=n_modes,
            fisher=fisher,
            truncated=truncated,
        )


def _check_modes(model: SpectralModel, pathset: ModePathSet, n: int) -> None:
    if not 1 <= n <= pathset.n_modes:
        raise ValueError(f"n={n} exceeds the {pathset.n_modes} simulated modes")
    if n > model.k_max:
        raise ValueError(f"n={n} exceeds the model's {model.k_max} modes")


def _denominator(model: SpectralModel, n: int) -> float:
    terms = (model.mu[:n] / model.q[:n]) ** 2
    return model.horizon * math.fsum(terms.tolist())


def mle_increments(model: SpectralModel, pathset: ModePathSet, n: int) -> MleResult:
    """Drift estimate from the per-mode Ito log-increment sums."""
    _check_modes(model, pathset, n)
    weights = model.mu[:n] / model.q[:n] ** 2
    num = math.fsum((weights * pathset.ito_sums[:n]).tolist())
    theta_hat = -num / _denominator(model, n)
    return MleResult.from_theta_hat(theta_hat, ROUTE_INCREMENTS, n,
                                    fisher_info(model, n))


def mle_endpoints(model: SpectralModel, pathset: ModePathSet, n: int) -> MleResult:
    """Drift estimate from mode endpoints only; no discretization error."""
    _check_modes(model, pathset, n)
    mu = model.mu[:n]
    q = model.q[:n]
    half_ito_correction = 0.5 * model.sigma ** 2 * model.horizon
    terms = mu * (pathset.log_endpoints[:n] / q ** 2 + half_ito_correction)
    theta_hat = -math.fsum(terms.tolist()) / _denominator(model, n)
    return MleResult.from_theta_hat(theta_hat, ROUTE_ENDPOINTS, n,
                                    fisher_info(model, n))


def mle_oracle(model: SpectralModel, pathset: ModePathSet, n: int) -> MleResult:
    """Exact decomposition theta_0 minus a weighted terminal-noise average.

    Requires the oracle channel (true parameter and terminal Brownian
    values); the observable API never exposes these.
    """
    _check_modes(model, pathset, n)
    if not pathset.has_oracle():
        raise OracleUnavailableError("pathset carries no oracle channel")
    mu = model.mu[:n]
    q = model.q[:n]
    num = math.fsum((mu / q * pathset.w_terminal[:n]).tolist())
    den = math.fsum(((mu / q) ** 2).tolist())
    theta_hat = pathset.theta_true - model.sigma / model.horizon * num / den
    return MleResult.from_theta_hat(theta_hat, ROUTE_ORACLE, n,
                                    fisher_info(model, n))


MLE_ROUTES = {
    ROUTE_INCREMENTS: mle_increments,
    ROUTE_ENDPOINTS: mle_endpoints,
    ROUTE_ORACLE: mle_oracle,
}


def pivot(result: MleResult, theta0: float) -> float:
    """sqrt(I_N) (theta_hat - theta0); exactly standard normal for the
    oracle route at every N."""
    return math.sqrt(result.fisher) * (result.theta_hat - theta0)


def log_likelihood_ratio(model: SpectralModel, pathset: ModePathSet, n: int,
                         theta: float, theta_ref: float) -> float:
    """log dP^theta / dP^theta_ref evaluated on the observed modes.

    Quadratic in theta with curvature -I_N; maximized at the increment-route
    estimator.
    """
    if not (theta > 0 and theta_ref > 0):
        raise ValueError("theta and theta_ref must be positive")
    _check_modes(model, pathset, n)
    if model.sigma == 0:
        raise ValueError("likelihood ratio undefined for sigma = 0")
    mu = model.mu[:n]
    q = model.q[:n]
    sig2 = model.sigma ** 2
    ito_term = math.fsum((mu / q ** 2 * pathset.ito_sums[:n]).tolist())
    info_term = math.fsum(((mu / q) ** 2).tolist())
    return ((theta_ref - theta) / sig2 * ito_term
            + (theta_ref ** 2 - theta ** 2) * model.horizon / (2.0 * sig2)
            * info_term)
