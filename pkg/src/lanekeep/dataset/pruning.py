"""Histogram pruning of overrepresented steering angles, and expedition splits.

Overfull histogram bins are trimmed one sample at a time, always drawing a
uniformly random sample from the expedition currently holding the most samples
in that bin (ties broken by lexicographically smallest expedition id), so
larger expeditions lose proportionally more data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import DatasetError
from .manifest import Dataset


@dataclass(frozen=True)
class PruneConfig:
    bins: int = 18000
    swa_range: float = 9.0  # histogram spans [-swa_range, +swa_range]
    cap: int = 10000        # maximum samples per bin
    seed: int = 0

    def __post_init__(self):
        if self.bins <= 0:
            raise DatasetError("bins must be > 0")
        if self.cap <= 0:
            raise DatasetError("cap must be > 0")
        if self.swa_range <= 0:
            raise DatasetError("swa_range must be > 0")


def bin_indices(values, bins: int, value_range: float) -> np.ndarray:
    vals = np.asarray(values, dtype=np.float64)
    if vals.size and (vals.min() < -value_range or vals.max() > value_range):
        bad = vals[np.argmax(np.abs(vals))]
        raise DatasetError(f"value {bad} outside +/-{value_range}")
    width = 2.0 * value_range / bins
    idx = np.floor((vals + value_range) / width).astype(np.int64)
    return np.minimum(idx, bins - 1)  # values exactly at +range go to the last bin


def histogram(values, bins: int, value_range: float) -> np.ndarray:
    """Counts per uniform bin over [-value_range, +value_range]."""
    if bins <= 0:
        raise DatasetError("bins must be > 0")
    idx = bin_indices(values, bins, value_range)
    return np.bincount(idx, minlength=bins)


def prune(d: Dataset, cfg: PruneConfig) -> Dataset:
    """Trim every histogram bin of |swa| down to cfg.cap samples.

    Deterministic per seed; surviving samples keep their original order.
    """
    idx = bin_indices([s.swa for s in d.samples], cfg.bins, cfg.swa_range)
    counts = np.bincount(idx, minlength=cfg.bins)
    rng = np.random.default_rng(cfg.seed)
    removed: set[int] = set()
    for b in np.nonzero(counts > cfg.cap)[0]:
        members: dict[str, list[int]] = {}
        for i in np.nonzero(idx == b)[0]:
            members.setdefault(d.samples[i].expedition_id, []).append(int(i))
        for _ in range(int(counts[b]) - cfg.cap):
            exp = min(members.items(), key=lambda kv: (-len(kv[1]), kv[0]))[0]
            pool = members[exp]
            j = int(rng.integers(len(pool)))
            pool[j], pool[-1] = pool[-1], pool[j]
            removed.add(pool.pop())
            if not pool:
                del members[exp]
    survivors = tuple(s for i, s in enumerate(d.samples) if i not in removed)
    return replace(d, samples=survivors, manifest_path=None)


def split(d: Dataset, train_frac: float, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Split whole expeditions into train/validation sets (no temporal leakage)."""
    if not 0.0 < train_frac < 1.0:
        raise DatasetError("train_frac must be in (0, 1)")
    expeditions = sorted(d.expeditions())
    if len(expeditions) < 2:
        raise DatasetError(f"need at least 2 expeditions to split, got {len(expeditions)}")
    rng = np.random.default_rng(seed)
    order = [expeditions[i] for i in rng.permutation(len(expeditions))]
    n_train = min(max(int(round(train_frac * len(order))), 1), len(order) - 1)
    train_ids = set(order[:n_train])
    train = tuple(s for s in d.samples if s.expedition_id in train_ids)
    val = tuple(s for s in d.samples if s.expedition_id not in train_ids)
    return (
        replace(d, samples=train, manifest_path=None),
        replace(d, samples=val, manifest_path=None),
    )
