"""Hot-path kernels: compiled extension when available, numpy fallback otherwise.

Set ``PERCOPT_PURE=1`` in the environment to force the fallback even when
the extension is built (useful for benchmarking the two side by side).
"""
import os

from . import _fallback

_impl = _fallback
if not os.environ.get("PERCOPT_PURE"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

reach_mask = _impl.reach_mask


def backend() -> str:
    """Name of the kernel implementation selected at import time."""
    return "compiled" if _impl is not _fallback else "fallback"
