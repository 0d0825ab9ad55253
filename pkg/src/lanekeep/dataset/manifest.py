"""Demonstration storage: manifest.csv + frames/*.png.

Manifest columns: frame,swa_rad,speed_mps,t_s,expedition. Frame paths are
stored relative to the manifest's directory so a dataset directory can be
moved as a unit. Pruned manifests reference the same frame files.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace
from pathlib import Path

from ..errors import DatasetError

MANIFEST_COLUMNS = ("frame", "swa_rad", "speed_mps", "t_s", "expedition")
MAX_SWA = 9.0


@dataclass(frozen=True)
class Sample:
    frame_path: Path
    swa: float
    speed: float
    timestamp: float
    expedition_id: str

    def __post_init__(self):
        if abs(self.swa) > MAX_SWA:
            raise DatasetError(f"|swa|={abs(self.swa):.3f} exceeds {MAX_SWA}")
        if self.speed < 0:
            raise DatasetError("speed must be >= 0")
        if not self.expedition_id:
            raise DatasetError("expedition_id must be non-empty")


@dataclass(frozen=True)
class Dataset:
    samples: tuple[Sample, ...]
    manifest_path: Path | None = None

    def __len__(self) -> int:
        return len(self.samples)

    def expeditions(self) -> list[str]:
        seen = dict.fromkeys(s.expedition_id for s in self.samples)
        return list(seen)


def load_manifest(path, check_frames: bool = True) -> Dataset:
    path = Path(path)
    base = path.parent
    samples = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or tuple(reader.fieldnames) != MANIFEST_COLUMNS:
            raise DatasetError(
                f"{path}: bad manifest header {reader.fieldnames}, want {list(MANIFEST_COLUMNS)}"
            )
        for row in reader:
            samples.append(
                Sample(
                    frame_path=base / row["frame"],
                    swa=float(row["swa_rad"]),
                    speed=float(row["speed_mps"]),
                    timestamp=float(row["t_s"]),
                    expedition_id=row["expedition"],
                )
            )
    if check_frames:
        for s in samples:
            if not s.frame_path.is_file():
                raise DatasetError(f"frame not found: {s.frame_path}")
    return Dataset(samples=tuple(samples), manifest_path=path)


def save_manifest(d: Dataset, path) -> Dataset:
    """Write a manifest for `d` at `path`, re-basing frame paths."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(MANIFEST_COLUMNS)
        for s in d.samples:
            rel = os.path.relpath(s.frame_path, path.parent)
            writer.writerow(
                [rel, f"{s.swa:.12g}", f"{s.speed:.12g}", f"{s.timestamp:.12g}", s.expedition_id]
            )
    return replace(d, manifest_path=path)


class ManifestWriter:
    """Streaming appender used by collection runs and the live recorder."""

    def __init__(self, manifest_path):
        self.path = Path(manifest_path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        new = not self.path.exists() or self.path.stat().st_size == 0
        self._file = open(self.path, "a", newline="")
        self._writer = csv.writer(self._file)
        if new:
            self._writer.writerow(MANIFEST_COLUMNS)

    def add(self, frame_path, swa: float, speed: float, t: float, expedition_id: str) -> None:
        rel = os.path.relpath(frame_path, self.path.parent)
        self._writer.writerow(
            [rel, f"{swa:.12g}", f"{speed:.12g}", f"{t:.12g}", expedition_id]
        )

    def flush(self) -> None:
        self._file.flush()

    def close(self) -> None:
        self._file.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
