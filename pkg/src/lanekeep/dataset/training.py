"""Behavioral-cloning training loop: frames in, curvature targets out.

Regression targets are always the curvature transform of the recorded SWA,
never the raw SWA, so the learned policy is independent of the recording
vehicle's steering geometry.
"""

from __future__ import annotations

import math
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from threadpoolctl import threadpool_limits

from ..camera.pngio import load_gray_png
from ..camera.preprocess import FEATURE_HEIGHT, FEATURE_WIDTH, STD_FLOOR, crop, downsample_bilinear
from ..errors import DatasetError, TrainingDivergedError
from ..nn.adam import adam_step, init_adam
from ..nn.network import Network, loss_and_grads
from ..policy.architecture import build_network
from ..vehicle import VehicleParams, swa_to_curvature
from .manifest import Dataset


@dataclass
class TrainConfig:
    batches: int
    batch: int = 64
    lr: float = 1e-4
    seed: int = 0
    keep_prob: float = 0.5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    cache_frames: bool = True
    on_batch: Callable[[int, float], None] | None = None  # progress hook (index, loss)


class _FrameCache:
    """Keeps cropped+downsampled uint8 frames in memory across epochs."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self._store: dict = {}

    def features(self, path) -> np.ndarray:
        small = self._store.get(path)
        if small is None:
            small = downsample_bilinear(crop(load_gray_png(path)), FEATURE_HEIGHT, FEATURE_WIDTH)
            if self.enabled:
                self._store[path] = small
        f = small.astype(np.float64)
        f -= f.mean()
        f /= max(f.std(), STD_FLOOR)
        return f


def _batch_indices(rng: np.random.Generator, n: int, batch: int):
    """Yield per-epoch shuffled index blocks forever; tiny datasets are tiled."""
    while True:
        order = rng.permutation(n)
        if n < batch:
            yield np.resize(order, batch)
            continue
        for pos in range(0, n - batch + 1, batch):
            yield order[pos : pos + batch]


def train_policy(train: Dataset, cfg: TrainConfig) -> tuple[Network, list[float]]:
    """Train the steering policy; returns the network and the per-batch MSE log."""
    if len(train) == 0:
        raise DatasetError("training dataset is empty")
    net = build_network(cfg.seed, keep_prob=cfg.keep_prob)
    if cfg.batches <= 0:
        return net, []

    targets = np.array([swa_to_curvature(s.swa, cfg.vehicle) for s in train.samples])
    paths = [s.frame_path for s in train.samples]
    cache = _FrameCache(cfg.cache_frames)
    params = net.parameters()
    st = init_adam(params, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    shuffle_rng = np.random.default_rng([cfg.seed, 101])
    batches = _batch_indices(shuffle_rng, len(train), cfg.batch)

    # The compiled kernels parallelize with OpenMP; a multi-threaded BLAS pool
    # on the same cores just fights it, so pin BLAS to one thread while training.
    from ..nn.backend import active_backend

    limits = threadpool_limits(limits=1, user_api="blas") if active_backend() == "cython" else nullcontext()
    loss_log: list[float] = []
    with limits:
        for bi in range(cfg.batches):
            idx = next(batches)
            x = np.stack([cache.features(paths[i]) for i in idx])[:, None, :, :]
            dropout_rng = np.random.default_rng([cfg.seed, 202, bi])
            loss, grads, _ = loss_and_grads(net, x, targets[idx], dropout_rng)
            if not math.isfinite(loss):
                raise TrainingDivergedError(f"loss became {loss} at batch {bi}", batch=bi, loss=loss)
            adam_step(params, grads, st)
            loss_log.append(loss)
            if cfg.on_batch is not None:
                cfg.on_batch(bi, loss)
    return net, loss_log


def evaluate_mse(net: Network, data: Dataset, vehicle: VehicleParams = VehicleParams()) -> float:
    """Inference-mode MSE of a trained policy over a dataset."""
    if len(data) == 0:
        raise DatasetError("dataset is empty")
    cache = _FrameCache(enabled=False)
    err = 0.0
    for s in data.samples:
        pred = float(net.forward(cache.features(s.frame_path)[None, None])[0, 0])
        err += (pred - swa_to_curvature(s.swa, vehicle)) ** 2
    return err / len(data)
