"""Image preprocessing: crop, bilinear downsample, per-image standardization.

A GrayFrame is a (H, W) uint8 numpy array. The network input is the fixed
68 x 183 standardized float tensor produced by `preprocess`; that target size
is what a 480 x 640 frame yields after cropping 35% of the top and 15% of the
bottom and downsampling by 3.5, and it is required by the flatten size of the
policy network, so it is pinned rather than recomputed from ratios.
"""

from __future__ import annotations

import numpy as np

from ..errors import FrameError

FEATURE_HEIGHT = 68
FEATURE_WIDTH = 183

CROP_TOP_FRAC = 0.35
CROP_BOTTOM_FRAC = 0.15

STD_FLOOR = 1e-6


def _check_frame(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim != 2 or f.size == 0:
        raise FrameError(f"expected a non-empty (H, W) frame, got shape {f.shape}")
    return f


def crop(f: np.ndarray) -> np.ndarray:
    """Remove floor(0.35 H) top rows and floor(0.15 H) bottom rows."""
    f = _check_frame(f)
    h = f.shape[0]
    if h < 20:
        raise FrameError(f"frame height {h} < 20")
    top = int(CROP_TOP_FRAC * h)
    bottom = int(CROP_BOTTOM_FRAC * h)
    out = f[top : h - bottom]
    if out.shape[0] < 1:
        raise FrameError("crop produced an empty frame")
    return out


def downsample_bilinear(f: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize with pixel-center alignment: src = (i + 0.5) * scale - 0.5.

    Output is uint8, rounded half up.
    """
    f = _check_frame(f)
    in_h, in_w = f.shape
    if out_h <= 0 or out_w <= 0:
        raise FrameError("output dimensions must be positive")
    if out_h > in_h or out_w > in_w:
        raise FrameError(f"output {out_h}x{out_w} exceeds input {in_h}x{in_w}")

    def axis_weights(n_in: int, n_out: int):
        scale = n_in / n_out
        src = (np.arange(n_out) + 0.5) * scale - 0.5
        i0 = np.clip(np.floor(src).astype(np.int64), 0, n_in - 1)
        i1 = np.minimum(i0 + 1, n_in - 1)
        frac = np.clip(src - i0, 0.0, 1.0)
        return i0, i1, frac

    r0, r1, rf = axis_weights(in_h, out_h)
    c0, c1, cf = axis_weights(in_w, out_w)
    rows = f.astype(np.float64)
    rows = rows[r0] * (1.0 - rf)[:, None] + rows[r1] * rf[:, None]
    out = rows[:, c0] * (1.0 - cf) + rows[:, c1] * cf
    return np.ascontiguousarray(np.floor(out + 0.5)).astype(np.uint8)


def standardize(f: np.ndarray) -> np.ndarray:
    """Subtract the image mean, divide by the population std (floored at 1e-6)."""
    f = _check_frame(f).astype(np.float64)
    mean = f.mean()
    std = f.std()
    return (f - mean) / max(std, STD_FLOOR)


def preprocess(f: np.ndarray) -> np.ndarray:
    """Full pipeline crop -> downsample -> standardize; always (68, 183) float64."""
    return standardize(downsample_bilinear(crop(f), FEATURE_HEIGHT, FEATURE_WIDTH))
