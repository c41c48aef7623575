"""Hot-kernel backend selection.

The compiled Cython extension is used when it imported successfully; the
pure-NumPy fallback is always available. Override with the environment
variable GASFEEG_KERNEL_BACKEND in {auto, cython, python} (read at import
time) or select_backend() at runtime.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_OPS = ("conv2d_forward", "conv2d_backward_weights", "conv2d_backward_input",
        "maxpool_forward", "maxpool_backward")

_active = None


def available_backends() -> list[str]:
    names = ["python"]
    if _ckernels is not None:
        names.insert(0, "cython")
    return names


def select_backend(name: str = "auto") -> str:
    """Switch the active kernel backend; returns the backend actually used."""
    global _active
    if name == "auto":
        name = "cython" if _ckernels is not None else "python"
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernel extension is not available")
        _active = _ckernels
    elif name == "python":
        _active = _pykernels
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    mod = globals()
    for op in _OPS:
        mod[op] = getattr(_active, op)
    return backend_name()


def backend_name() -> str:
    return _active.BACKEND_NAME


select_backend(os.environ.get("GASFEEG_KERNEL_BACKEND", "auto"))
