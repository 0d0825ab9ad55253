"""8-bit grayscale PNG read/write for camera frames and saliency masks."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import FrameError


def png_bytes(frame: np.ndarray) -> bytes:
    """Encode a (H, W) uint8 frame as PNG in memory."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(frame), mode="L").save(buf, format="PNG", compress_level=1)
    return buf.getvalue()


def save_gray_png(frame: np.ndarray, path) -> None:
    frame = np.asarray(frame)
    if frame.dtype != np.uint8 or frame.ndim != 2:
        raise FrameError(f"expected (H, W) uint8, got {frame.dtype} {frame.shape}")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(frame, mode="L").save(path, format="PNG", compress_level=4)


def load_gray_png(path) -> np.ndarray:
    with Image.open(path) as img:
        if img.mode != "L":
            img = img.convert("L")
        return np.asarray(img, dtype=np.uint8)
