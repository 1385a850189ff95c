"""Kernel selection: the compiled core when built, otherwise pure Python.

Set ``COMMITPAY_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("COMMITPAY_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

pivot = _impl.pivot
solve_square = _impl.solve_square
BACKEND = "compiled" if _impl is not _kernels_py else "python"
