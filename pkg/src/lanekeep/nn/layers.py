"""Layer objects: parameters, forward pass, and reverse-mode gradients.

Training-path intermediates (patch matrices, activation buffers) are kept per
layer and reused across batches; they are valid until the next forward_train
call on the same layer. The training loop is single-threaded by contract, so
this is safe; `forward` (inference) allocates fresh arrays and may run
concurrently on a shared network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from . import backend, ops


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    in_channels: int = 0
    out_channels: int = 0
    kernel: tuple[int, int] = (0, 0)
    stride: tuple[int, int] = (1, 1)
    in_units: int = 0
    out_units: int = 0
    keep_prob: float = 1.0


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Conv2D:
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel: tuple[int, int],
        stride: tuple[int, int],
        rng: np.random.Generator | None = None,
    ):
        kh, kw = kernel
        sh, sw = stride
        if min(kh, kw) < 1 or min(sh, sw) < 1:
            raise ShapeError("kernel and stride extents must be >= 1")
        self.stride = (int(sh), int(sw))
        if rng is None:
            self.w = np.zeros((out_channels, in_channels, kh, kw))
        else:
            fan_in = in_channels * kh * kw
            fan_out = out_channels * kh * kw
            self.w = glorot_uniform(rng, (out_channels, in_channels, kh, kw), fan_in, fan_out)
        self.b = np.zeros(out_channels)
        self._scratch: dict[tuple, dict] = {}

    @property
    def spec(self) -> LayerSpec:
        return LayerSpec(
            kind="conv",
            in_channels=self.w.shape[1],
            out_channels=self.w.shape[0],
            kernel=self.w.shape[2:4],
            stride=self.stride,
        )

    def params(self):
        return [self.w, self.b]

    def _scratch_for(self, shape) -> dict:
        scr = self._scratch.get(shape)
        if scr is None:
            scr = self._scratch[shape] = {}
        return scr

    def forward(self, x):
        return backend.conv2d_forward(np.ascontiguousarray(x), self.w, self.b, *self.stride)

    def forward_train(self, x, rng):
        x = np.ascontiguousarray(x)
        scr = self._scratch_for(x.shape)
        y, cols = backend.conv2d_forward_train(x, self.w, self.b, *self.stride, scr)
        return y, (x, cols)

    def backward(self, g, cache, need_dx: bool = True):
        x, cols = cache
        g = np.ascontiguousarray(g)
        dx, dw, db = backend.conv2d_backward(
            x, self.w, g, *self.stride, cols, self._scratch_for(x.shape), need_dx
        )
        return dx, [dw, db]


class Dense:
    def __init__(self, in_units: int, out_units: int, rng: np.random.Generator | None = None):
        if rng is None:
            self.w = np.zeros((out_units, in_units))
        else:
            self.w = glorot_uniform(rng, (out_units, in_units), in_units, out_units)
        self.b = np.zeros(out_units)

    @property
    def spec(self) -> LayerSpec:
        return LayerSpec(kind="dense", in_units=self.w.shape[1], out_units=self.w.shape[0])

    def params(self):
        return [self.w, self.b]

    def forward(self, x):
        return ops.dense_forward(x, self.w, self.b)

    def forward_train(self, x, rng):
        return self.forward(x), x

    def backward(self, g, cache, need_dx: bool = True):
        x = cache
        dx = g @ self.w if need_dx else None
        return dx, [g.T @ x, g.sum(axis=0)]


class ELU:
    spec = LayerSpec(kind="elu")

    def __init__(self):
        self._scratch: dict = {}

    def params(self):
        return []

    def forward(self, x):
        return backend.elu_forward(np.ascontiguousarray(x))

    def forward_train(self, x, rng):
        y, factor = backend.elu_forward_train(np.ascontiguousarray(x), self._scratch)
        return y, factor

    def backward(self, g, cache, need_dx: bool = True):
        # g is dead upstream of this layer; scale it in place.
        return backend.mul_inplace(np.ascontiguousarray(g), cache), []


class Dropout:
    def __init__(self, keep_prob: float = 0.5):
        if not 0.0 < keep_prob <= 1.0:
            raise ValueError(f"keep_prob={keep_prob} outside (0, 1]")
        self.keep_prob = keep_prob

    @property
    def spec(self) -> LayerSpec:
        return LayerSpec(kind="dropout", keep_prob=self.keep_prob)

    def params(self):
        return []

    def forward(self, x):
        return x

    def forward_train(self, x, rng):
        if self.keep_prob >= 1.0:
            return x, None
        mask = rng.random(x.shape) < self.keep_prob
        return x * mask / self.keep_prob, mask

    def backward(self, g, cache, need_dx: bool = True):
        if cache is None:
            return g, []
        return g * cache / self.keep_prob, []


class Flatten:
    spec = LayerSpec(kind="flatten")

    def params(self):
        return []

    def forward(self, x):
        return x.reshape(x.shape[0], -1)

    def forward_train(self, x, rng):
        return self.forward(x), x.shape

    def backward(self, g, cache, need_dx: bool = True):
        return g.reshape(cache), []


class Identity:
    spec = LayerSpec(kind="identity")

    def params(self):
        return []

    def forward(self, x):
        return x

    def forward_train(self, x, rng):
        return x, None

    def backward(self, g, cache, need_dx: bool = True):
        return g, []
