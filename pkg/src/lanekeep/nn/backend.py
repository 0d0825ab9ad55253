"""Selects the convolution kernel backend at import time.

The compiled Cython extension is used when importable; otherwise the numpy
fallback. Override with LANEKEEP_BACKEND=cython|numpy. Each backend is
bit-deterministic run to run on one machine; the two backends agree to within
float64 rounding (they may differ in the last bits because GEMM blocking
differs), so a trained model is bit-reproducible only under a fixed backend.
"""

from __future__ import annotations

import os

from . import kernels_numpy

_env = os.environ.get("LANEKEEP_BACKEND", "auto").lower()

_impl = None
_name = "numpy"
if _env in ("auto", "cython"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        _name = "cython"
    except ImportError:
        if _env == "cython":
            raise ImportError(
                "LANEKEEP_BACKEND=cython but the compiled extension is unavailable"
            )
        _impl = None
if _impl is None:
    _impl = kernels_numpy
    _name = "numpy"


def active_backend() -> str:
    return _name


conv2d_forward = _impl.conv2d_forward
conv2d_forward_train = _impl.conv2d_forward_train
conv2d_backward = _impl.conv2d_backward
elu_forward = _impl.elu_forward
elu_forward_train = _impl.elu_forward_train
mul_inplace = _impl.mul_inplace
