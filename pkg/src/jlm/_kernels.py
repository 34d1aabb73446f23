"""Backend selection for the sweep kernels.

The compiled ``_speedups`` extension is used when it imports; otherwise the
NumPy fallback. Set ``JLM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

try:
    from . import _speedups
except ImportError:  # extension not built
    _speedups = None

if _speedups is not None and os.environ.get("JLM_PURE_PYTHON", "") in ("", "0"):
    _impl = _speedups
    BACKEND = "cython"
else:
    _impl = _fallback
    BACKEND = "python"


def available_backends():
    names = {"python": _fallback}
    if _speedups is not None:
        names["cython"] = _speedups
    return names


multiplier_sweep = _impl.multiplier_sweep
solution_sweep = _impl.solution_sweep
path_integrate = _impl.path_integrate
digamma = _impl.digamma
