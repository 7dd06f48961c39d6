"""Backend selection for the hot kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy fallback.  ``ASTSKIN_PURE_PYTHON=1`` forces the fallback.
"""

import importlib
import os

from . import _kernels_py

BACKENDS = ("cython", "python")


def load_backend(name: str):
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("astskin._kernels")
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if os.environ.get("ASTSKIN_PURE_PYTHON", "") not in ("", "0"):
        return "python", _kernels_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _kernels_py


BACKEND, _impl = _select()

best_split = _impl.best_split
knn_raw = _impl.knn_raw
