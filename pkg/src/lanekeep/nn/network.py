"""Layer-sequence network with reverse-mode gradients of the MSE loss."""

from __future__ import annotations

import numpy as np

from ..errors import TrainingDivergedError
from . import ops


class Network:
    """An ordered sequence of layers trained as a scalar regressor."""

    def __init__(self, layers):
        self.layers = list(layers)

    def parameters(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params()]

    def param_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def specs(self):
        return [layer.spec for layer in self.layers]

    def forward(self, x) -> np.ndarray:
        """Inference pass; dropout layers are identities."""
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def forward_train(self, x, rng: np.random.Generator):
        """Training pass; returns the output and per-layer caches."""
        caches = []
        for layer in self.layers:
            x, cache = layer.forward_train(x, rng)
            caches.append(cache)
        return x, caches

    def backward_from(self, g, caches) -> list[np.ndarray]:
        """Backpropagate an output gradient; returns grads aligned with parameters()."""
        # No input gradient is needed below the first parameterized layer.
        first_param = next(
            (i for i, layer in enumerate(self.layers) if layer.params()), len(self.layers)
        )
        grads_rev = []
        for pos in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[pos]
            g, layer_grads = layer.backward(g, caches[pos], need_dx=pos > first_param)
            grads_rev.append(layer_grads)
        out = []
        for layer_grads in reversed(grads_rev):
            out.extend(layer_grads)
        return out


def loss_and_grads(
    net: Network, x, targets, rng: np.random.Generator | None = None
) -> tuple[float, list[np.ndarray], np.ndarray]:
    """MSE loss, parameter gradients, and predictions for one batch.

    Dropout masks are drawn from `rng` once and shared between the forward and
    backward passes. With rng=None a fixed seed 0 stream is used, keeping the
    call deterministic.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    targets = np.asarray(targets, dtype=np.float64).ravel()
    out, caches = net.forward_train(x, rng)
    pred = out.ravel()
    if not np.all(np.isfinite(pred)):
        raise TrainingDivergedError("non-finite network output")
    loss = ops.mse_loss(pred, targets)
    g = (2.0 / pred.size) * (pred - targets)
    grads = net.backward_from(g.reshape(out.shape), caches)
    return loss, grads, pred


def backward(net: Network, x, target, rng: np.random.Generator | None = None):
    """Gradients of the MSE loss w.r.t. every parameter, in parameter order."""
    _, grads, _ = loss_and_grads(net, x, target, rng)
    return grads
