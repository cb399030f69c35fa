"""Select the compiled rectangle kernel, falling back to pure Python.

Set SALBOX_PURE=1 to force the fallback (used by the benchmark and the
backend-parity tests).
"""

import os

_FORCE_PURE = os.environ.get("SALBOX_PURE", "") not in ("", "0")

if _FORCE_PURE:
    from salbox._kernels_py import largest_rectangle

    BACKEND = "pure"
else:
    try:
        from salbox._kernels import largest_rectangle

        BACKEND = "compiled"
    except ImportError:
        from salbox._kernels_py import largest_rectangle

        BACKEND = "pure"

__all__ = ["largest_rectangle", "kernel_backend", "BACKEND"]


def kernel_backend() -> str:
    """Name of the rectangle-search backend in use: 'compiled' or 'pure'."""
    return BACKEND
