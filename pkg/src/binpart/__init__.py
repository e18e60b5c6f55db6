"""Binary partition functions, sums of squares, and their verification."""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
