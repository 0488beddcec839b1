"""Stepping kernels: compiled core with a pure-Python fallback.

The compiled module is preferred when importable; set the environment
variable ``ADIABLOCH_PURE_PYTHON=1`` before import to force the fallback
(useful for benchmarking and debugging).
"""

import os

if os.environ.get("ADIABLOCH_PURE_PYTHON", "") not in ("", "0"):
    from . import _ref as _impl

    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _ref as _impl

        BACKEND = "python"

SCHEME_RK4 = 0
SCHEME_RK45 = 1

STATUS_OK = 0
STATUS_NORM_DRIFT = 1
STATUS_REJECTED = 2

full_evolution = _impl.full_evolution
projected_evolution = _impl.projected_evolution
pendulum_evolution = _impl.pendulum_evolution


def backend_name() -> str:
    """Name of the active kernel backend ('cython' or 'python')."""
    return BACKEND
