from .architecture import (
    FLATTEN_SIZE,
    PARAM_COUNT,
    build_network,
    infer,
    infer_features,
)
from .smoothing import SmootherState, smooth
from .vbp import save_saliency_png, vbp_saliency

__all__ = [
    "FLATTEN_SIZE",
    "PARAM_COUNT",
    "SmootherState",
    "build_network",
    "infer",
    "infer_features",
    "save_saliency_png",
    "smooth",
    "vbp_saliency",
]
