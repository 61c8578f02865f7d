"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, numeric
failures (optimizer/quadrature) exit 3, I/O problems exit 4.
"""


class ConfigurationError(ValueError):
    """Invalid model/experiment configuration."""


class OracleUnavailableError(RuntimeError):
    """An oracle-channel quantity was requested from observable-only data."""


class NumericFailure(RuntimeError):
    """A numerical routine could not produce a trustworthy answer."""


class OptimizationFailure(NumericFailure):
    """Bracketing or minimization failed (e.g. no unimodal bracket found)."""
