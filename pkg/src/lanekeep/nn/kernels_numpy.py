"""Numpy/BLAS fallback for the hot kernels (im2col + GEMM convolution, ELU).

Valid cross-correlation only, float64. The compiled extension in _kernels.pyx
implements the same entry points; `lanekeep.nn.backend` selects one at import
time. Training-path calls may pass a per-layer `scratch` dict that keeps the
large intermediates alive across batches.
"""

from __future__ import annotations

import numpy as np


def _buf(scratch: dict | None, name: str, shape: tuple) -> np.ndarray:
    if scratch is None:
        return np.empty(shape)
    a = scratch.get(name)
    if a is None or a.shape != shape:
        a = np.empty(shape)
        scratch[name] = a
    return a


def _out_dims(h: int, w: int, kh: int, kw: int, sh: int, sw: int) -> tuple[int, int]:
    return (h - kh) // sh + 1, (w - kw) // sw + 1


def _im2col(x: np.ndarray, kh: int, kw: int, sh: int, sw: int, cols: np.ndarray) -> np.ndarray:
    """Fill the (C*kh*kw, N*OH*OW) patch matrix."""
    n, c, h, w = x.shape
    oh, ow = _out_dims(h, w, kh, kw, sh, sw)
    cols6 = cols.reshape(c, kh, kw, n, oh, ow)
    for u in range(kh):
        for v in range(kw):
            patch = x[:, :, u : u + sh * oh : sh, v : v + sw * ow : sw]
            cols6[:, u, v] = patch.transpose(1, 0, 2, 3)
    return cols


def conv2d_forward_train(x, w, b, sh, sw, scratch: dict | None = None):
    n = x.shape[0]
    k, c, kh, kw = w.shape
    oh, ow = _out_dims(x.shape[2], x.shape[3], kh, kw, sh, sw)
    cols = _im2col(x, kh, kw, sh, sw, _buf(scratch, "cols", (c * kh * kw, n * oh * ow)))
    y2 = _buf(scratch, "y2", (k, n * oh * ow))
    np.matmul(w.reshape(k, -1), cols, out=y2)
    y = _buf(scratch, "y", (n, k, oh, ow))
    y[...] = y2.reshape(k, n, oh, ow).transpose(1, 0, 2, 3)
    y += b[None, :, None, None]
    return y, cols


def conv2d_forward(x, w, b, sh, sw):
    y, _ = conv2d_forward_train(x, w, b, sh, sw, None)
    return y


def conv2d_backward(x, w, g, sh, sw, cols=None, scratch: dict | None = None, need_dx: bool = True):
    """Gradients (dx, dw, db) of a valid cross-correlation.

    `cols` may carry the patch matrix from conv2d_forward_train; with
    need_dx=False the input gradient is skipped and None is returned for it.
    """
    n, c, h, wd = x.shape
    k, _, kh, kw = w.shape
    oh, ow = g.shape[2], g.shape[3]
    if cols is None:
        cols = _im2col(x, kh, kw, sh, sw, _buf(scratch, "cols", (c * kh * kw, n * oh * ow)))
    g2 = _buf(scratch, "g2", (k, n * oh * ow))
    g2[...] = g.reshape(n, k, oh * ow).transpose(1, 0, 2).reshape(k, -1)

    dw = (g2 @ cols.T).reshape(k, c, kh, kw)
    db = g.sum(axis=(0, 2, 3))
    if not need_dx:
        return None, dw, db

    dcols = _buf(scratch, "dcols", (c * kh * kw, n * oh * ow))
    np.matmul(w.reshape(k, -1).T, g2, out=dcols)
    dcols6 = dcols.reshape(c, kh, kw, n, oh, ow)
    dx = _buf(scratch, "dx", x.shape)
    dx.fill(0.0)
    for u in range(kh):
        for v in range(kw):
            dx[:, :, u : u + sh * oh : sh, v : v + sw * ow : sw] += dcols6[:, u, v].transpose(
                1, 0, 2, 3
            )
    return dx, dw, db


def elu_forward_train(x, scratch: dict | None = None):
    """ELU value and derivative; returns (y, factor) with factor = elu'(x)."""
    neg = x < 0.0
    factor = _buf(scratch, "elu_f", x.shape)
    factor.fill(1.0)
    np.exp(x, out=factor, where=neg)
    y = _buf(scratch, "elu_y", x.shape)
    np.copyto(y, x)
    np.subtract(factor, 1.0, out=y, where=neg)
    return y, factor


def elu_forward(x):
    return np.where(x >= 0.0, x, np.expm1(x))


def mul_inplace(g, f):
    g *= f
    return g
