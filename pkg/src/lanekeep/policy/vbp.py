"""Visual backpropagation saliency: which input pixels drive the policy.

Each convolution level contributes the channel mean of its post-ELU
activations clamped at zero (for a ReLU network this is just the mean; with
ELU the clamp keeps the map non-negative without erasing levels whose mean
drifts negative). The level maps are multiplied together from the deepest
level up, with an all-ones transposed convolution matching each level's
kernel/stride as the upsampler. Where the valid-convolution floor makes the
canonical transposed size fall short of the shallower map, the bottom/right
edge is zero padded.
"""

from __future__ import annotations

import numpy as np

from ..camera.preprocess import preprocess
from ..camera.pngio import save_gray_png
from ..nn.layers import ELU, Conv2D
from ..nn.network import Network


def _norm_max(m: np.ndarray) -> np.ndarray:
    peak = m.max()
    return m / peak if peak > 0 else m


def _upsample_ones(
    m: np.ndarray, target: tuple[int, int], kernel: tuple[int, int], stride: tuple[int, int]
) -> np.ndarray:
    """Transposed convolution with an all-ones kernel, fitted to `target` dims."""
    ih, iw = m.shape
    kh, kw = kernel
    sh, sw = stride
    out = np.zeros(((ih - 1) * sh + kh, (iw - 1) * sw + kw))
    for u in range(kh):
        for v in range(kw):
            out[u : u + ih * sh : sh, v : v + iw * sw : sw] += m
    th, tw = target
    fitted = np.zeros((th, tw))
    ch, cw = min(th, out.shape[0]), min(tw, out.shape[1])
    fitted[:ch, :cw] = out[:ch, :cw]
    return fitted


def _conv_activation_maps(net: Network, features: np.ndarray):
    """Channel mean of the zero-clamped post-ELU activation per convolution."""
    num_convs = sum(isinstance(l, Conv2D) for l in net.layers)
    maps: list[tuple[Conv2D, np.ndarray]] = []
    x = features[None, None, :, :]
    i = 0
    while i < len(net.layers) and len(maps) < num_convs:
        layer = net.layers[i]
        x = layer.forward(x)
        if isinstance(layer, Conv2D):
            if i + 1 < len(net.layers) and isinstance(net.layers[i + 1], ELU):
                x = net.layers[i + 1].forward(x)
                i += 1
            maps.append((layer, np.maximum(x[0], 0.0).mean(axis=0)))
        i += 1
    if not maps:
        raise ValueError("network has no convolution layers")
    return maps


def vbp_saliency_features(net: Network, features: np.ndarray) -> np.ndarray:
    """Saliency mask in [0, 1] at the feature-tensor resolution."""
    maps = _conv_activation_maps(net, features)
    mask = maps[-1][1]
    for level in range(len(maps) - 2, -1, -1):
        deeper_conv = maps[level + 1][0]
        spec = deeper_conv.spec
        up = _upsample_ones(mask, maps[level][1].shape, spec.kernel, spec.stride)
        mask = _norm_max(up) * maps[level][1]
    first = maps[0][0].spec
    mask = _upsample_ones(mask, features.shape, first.kernel, first.stride)
    return _norm_max(mask)


def vbp_saliency(net: Network, frame: np.ndarray) -> np.ndarray:
    """Saliency mask of a camera frame; 68 x 183, values in [0, 1]."""
    return vbp_saliency_features(net, preprocess(frame))


def save_saliency_png(mask: np.ndarray, path) -> None:
    save_gray_png(np.floor(mask * 255.0 + 0.5).astype(np.uint8), path)
