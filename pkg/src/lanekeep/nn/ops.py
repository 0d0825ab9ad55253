"""Elementary network operations, float64 throughout.

Convolutions are valid (no padding) cross-correlations; see `backend` for the
kernel implementation. Single-sample tensors (C, H, W) and batched (N, C, H, W)
are both accepted where it makes sense.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from . import backend


def _as4d(x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 3:
        return x[None], True
    if x.ndim == 4:
        return x, False
    raise ShapeError(f"conv input must be (C,H,W) or (N,C,H,W), got {x.shape}")


def conv2d_forward(x, w, b, stride: tuple[int, int]) -> np.ndarray:
    """Valid cross-correlation plus bias; output H' = floor((H-kh)/sh)+1."""
    x4, squeeze = _as4d(x)
    w = np.ascontiguousarray(w, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    sh, sw = int(stride[0]), int(stride[1])
    if sh < 1 or sw < 1:
        raise ShapeError("strides must be >= 1")
    if w.ndim != 4 or b.ndim != 1 or w.shape[0] != b.shape[0]:
        raise ShapeError(f"bad kernel/bias shapes {w.shape} / {b.shape}")
    k, c, kh, kw = w.shape
    n, cx, h, wd = x4.shape
    if cx != c:
        raise ShapeError(f"input channels {cx} != kernel channels {c}")
    if kh > h or kw > wd:
        raise ShapeError(f"kernel {kh}x{kw} larger than input {h}x{wd}")
    y = backend.conv2d_forward(x4, w, b, sh, sw)
    return y[0] if squeeze else y


def elu(x) -> np.ndarray:
    """x for x >= 0, exp(x) - 1 otherwise."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0.0, x, np.expm1(x))


def elu_grad(x) -> np.ndarray:
    """Derivative of elu; both one-sided derivatives at 0 equal 1."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0.0, 1.0, np.exp(x))


def dense_forward(x, w, b) -> np.ndarray:
    """w @ x + b for vectors; row-batched x @ w.T + b for (N, n) inputs."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if w.ndim != 2 or b.shape != (w.shape[0],):
        raise ShapeError(f"bad dense shapes w={w.shape}, b={b.shape}")
    if x.shape[-1] != w.shape[1]:
        raise ShapeError(f"input width {x.shape[-1]} != weight width {w.shape[1]}")
    return x @ w.T + b


def dropout(x, keep_prob: float, training: bool = True, rng=None) -> np.ndarray:
    """Inverted dropout: kept elements are scaled by 1/keep_prob at train time."""
    if not 0.0 < keep_prob <= 1.0:
        raise ValueError(f"keep_prob={keep_prob} outside (0, 1]")
    x = np.asarray(x, dtype=np.float64)
    if not training or keep_prob == 1.0:
        return x
    if rng is None or isinstance(rng, int):
        rng = np.random.default_rng(rng)
    mask = rng.random(x.shape) < keep_prob
    return x * mask / keep_prob


def mse_loss(pred, target) -> float:
    """Mean squared error (1/n) * sum((target_i - pred_i)^2)."""
    pred = np.asarray(pred, dtype=np.float64).ravel()
    target = np.asarray(target, dtype=np.float64).ravel()
    if pred.size == 0:
        raise ShapeError("mse_loss on empty input")
    if pred.shape != target.shape:
        raise ShapeError(f"pred {pred.shape} != target {target.shape}")
    diff = target - pred
    return float(diff @ diff / diff.size)
