"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the NumPy
fallback is used. Set ``SPNEHARI_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SPNEHARI_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

theta_fields = _impl.theta_fields
theta_power = _impl.theta_power

__all__ = ["BACKEND", "theta_fields", "theta_power"]
