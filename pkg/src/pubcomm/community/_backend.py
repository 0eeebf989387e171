"""Selects the compiled sweep kernel when available, else the Python twin."""
import os

from . import _kernel_py

try:
    from . import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None

if _kernel_c is not None and not os.environ.get("PUBCOMM_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def available() -> list[str]:
    return ["cython", "python"] if _kernel_c is not None else ["python"]


def get_sweep(name: str | None = None):
    name = name or BACKEND
    if name == "cython":
        if _kernel_c is None:
            raise RuntimeError("compiled kernel not built; reinstall with a C compiler")
        return _kernel_c.sweep
    if name == "python":
        return _kernel_py.sweep
    raise ValueError(f"unknown backend {name!r}; choose from {available()}")
