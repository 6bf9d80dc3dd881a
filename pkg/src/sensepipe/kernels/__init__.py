"""Hot kernels with a numba backend and a pure-numpy fallback.

The numba backend is used when numba imports cleanly, unless the
environment variable ``SENSEPIPE_DISABLE_JIT`` is set to a truthy value
(``1``, ``true``, ``yes``). Both backends expose the same functions; use
:func:`get_backend` to address one explicitly.
"""
import logging
import os
from types import ModuleType

from . import _numpy

log = logging.getLogger(__name__)

KERNELS = ("disambiguation_loop", "im2col", "col2im", "pool_forward", "pool_backward",
           "scatter_rows", "lstm_forward", "lstm_backward")


def _jit_disabled() -> bool:
    return os.environ.get("SENSEPIPE_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes", "on")


def get_backend(name: str) -> ModuleType:
    """Return the ``"numpy"`` or ``"numba"`` kernel module."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _jit
        return _jit
    raise ValueError(f"unknown backend {name!r}")


def _select() -> tuple[str, ModuleType]:
    if _jit_disabled():
        return "numpy", _numpy
    try:
        return "numba", get_backend("numba")
    except ImportError as exc:  # pragma: no cover - numba is a declared dependency
        log.warning("numba unavailable (%s); using numpy kernels", exc)
        return "numpy", _numpy


BACKEND, _impl = _select()

disambiguation_loop = _impl.disambiguation_loop
im2col = _impl.im2col
col2im = _impl.col2im
pool_forward = _impl.pool_forward
pool_backward = _impl.pool_backward
scatter_rows = _impl.scatter_rows
lstm_forward = _impl.lstm_forward
lstm_backward = _impl.lstm_backward
