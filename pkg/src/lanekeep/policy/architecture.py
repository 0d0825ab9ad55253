"""The steering policy network: 5 strided convolutions + 4 dense layers.

Input is the 68 x 183 standardized camera tensor; output is a single path
curvature in 1/m. The spatial chain through the convolutions is
68x183 -> 32x90 -> 14x43 -> 5x20 -> 3x18 -> 1x16, flattened to 1216 features.
Total parameter count is 264 343.
"""

from __future__ import annotations

import numpy as np

from ..camera.preprocess import preprocess
from ..errors import TrainingDivergedError
from ..nn.layers import ELU, Conv2D, Dense, Dropout, Flatten, Identity
from ..nn.network import Network

FLATTEN_SIZE = 1216
PARAM_COUNT = 264_343

CONV_PLAN = [
    # (in_channels, out_channels, kernel, stride)
    (1, 24, (5, 5), (2, 2)),
    (24, 36, (5, 5), (2, 2)),
    (36, 48, (5, 5), (2, 2)),
    (48, 64, (3, 3), (1, 1)),
    (64, 76, (3, 3), (1, 1)),
]
DENSE_PLAN = [(FLATTEN_SIZE, 100), (100, 50), (50, 10), (10, 1)]


def build_network(seed: int = 0, keep_prob: float = 0.5) -> Network:
    """Deterministically initialized policy network (Glorot uniform, zero biases)."""
    rng = np.random.default_rng(seed)
    layers = []
    for in_c, out_c, kernel, stride in CONV_PLAN:
        layers.append(Conv2D(in_c, out_c, kernel, stride, rng=rng))
        layers.append(ELU())
    layers.append(Flatten())
    for i, (in_u, out_u) in enumerate(DENSE_PLAN):
        layers.append(Dense(in_u, out_u, rng=rng))
        if i < 3:
            layers.append(ELU())
            layers.append(Dropout(keep_prob))
        else:
            layers.append(Identity())
    net = Network(layers)
    assert net.param_count() == PARAM_COUNT
    return net


def infer_features(net: Network, features: np.ndarray) -> float:
    """Run the network on an already-preprocessed (68, 183) tensor."""
    out = net.forward(features[None, None, :, :])
    value = float(out[0, 0])
    if not np.isfinite(value):
        raise TrainingDivergedError("non-finite policy output")
    return value


def infer(net: Network, frame: np.ndarray) -> float:
    """Preprocess a camera frame and return the predicted curvature (1/m)."""
    return infer_features(net, preprocess(frame))
