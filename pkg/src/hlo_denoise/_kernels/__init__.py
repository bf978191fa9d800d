"""Backend selection for the per-sweep half-kernel kernel.

The numba backend is used when numba imports cleanly, unless the environment
variable ``HLO_DENOISE_DISABLE_NUMBA`` is set to a truthy value, in which case
the vectorized numpy path runs instead. Both produce the same result up to
floating-point rounding.
"""
import os

from . import numpy_impl
from .common import (  # noqa: F401
    E_INIT,
    STATUS_FALLBACK,
    STATUS_HALF_WINDOW,
    STATUS_INACTIVE,
    STATUS_NO_CANDIDATE,
    STATUS_NULL_NORMAL,
)

ENV_FLAG = "HLO_DENOISE_DISABLE_NUMBA"


def _disabled():
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")


try:
    if _disabled():
        raise ImportError(f"disabled by {ENV_FLAG}")
    from . import numba_impl
except ImportError:
    numba_impl = None

BACKENDS = {"numpy": numpy_impl.hlo_sweep}
if numba_impl is not None:
    BACKENDS["numba"] = numba_impl.hlo_sweep

DEFAULT_BACKEND = "numba" if numba_impl is not None else "numpy"


def get_sweep(backend=None):
    name = backend or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} unavailable; choose from {sorted(BACKENDS)}"
        ) from None
