"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
otherwise transparent. `SPDE_BAYES_BACKEND=python` forces the fallback,
`=cython` demands the extension (raising if it is missing).
"""

from __future__ import annotations

import os

from .errors import ConfigurationError

_requested = os.environ.get("SPDE_BAYES_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "c", "cython", "compiled"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        if _requested in ("c", "cython", "compiled"):
            raise
        from . import _kernels_py as _impl

        BACKEND = "python"
elif _requested in ("python", "py", "numpy"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    raise ConfigurationError(
        f"unknown SPDE_BAYES_BACKEND value: {_requested!r}"
    )

mode_statistics = _impl.mode_statistics
synthesize_paths = _impl.synthesize_paths


def backend_name() -> str:
    return BACKEND
