from .preprocess import (
    FEATURE_HEIGHT,
    FEATURE_WIDTH,
    crop,
    downsample_bilinear,
    preprocess,
    standardize,
)
from .pngio import load_gray_png, save_gray_png
from .render import CameraConfig, render, render_with_mask

__all__ = [
    "CameraConfig",
    "FEATURE_HEIGHT",
    "FEATURE_WIDTH",
    "crop",
    "downsample_bilinear",
    "load_gray_png",
    "preprocess",
    "render",
    "render_with_mask",
    "save_gray_png",
    "standardize",
]
