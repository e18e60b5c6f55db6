"""Kernel selection: the Cython extension when importable, else pure Python."""

import os

if os.environ.get("BINPART_PURE") == "1":
    from . import _fallback as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        from . import _fallback as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
