"""Kernel backend selection.

The compiled extension is preferred when importable; setting the environment
variable PROJKIT_PURE_PYTHON to a truthy value ("1", "true", "yes") forces
the numpy fallback. Both backends implement the same semantics contract, so
the choice affects speed only.
"""

import os

from . import _kernels_py

__all__ = ["BACKEND", "project_batch", "fixed_point_batch", "get_backend"]


def _want_pure():
    return os.environ.get("PROJKIT_PURE_PYTHON", "").strip().lower() in ("1", "true", "yes")


if _want_pure():
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND_NAME
project_batch = _impl.project_batch
fixed_point_batch = _impl.fixed_point_batch


def get_backend(name):
    """Return the named backend module ("python" or "compiled").

    Used by parity tests and benchmarks; raises ImportError when the
    compiled backend is unavailable.
    """
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels_cy
        return _kernels_cy
    raise ValueError(f"unknown backend '{name}'")
