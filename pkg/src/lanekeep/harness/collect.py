"""Demonstration collection: expert-driven runs written as PNG frames + manifest."""

from __future__ import annotations

from pathlib import Path

from ..camera.pngio import save_gray_png
from ..camera.render import CameraConfig
from ..dataset.manifest import Dataset, ManifestWriter, Sample, load_manifest
from ..expert import ExpertParams
from ..vehicle import VehicleParams
from .drivers import ExpertDriver
from .loop import Scenario, run_closed_loop


class DatasetSink:
    """Writes one PNG frame plus one manifest row per tick."""

    def __init__(self, out_dir, expedition_id: str):
        self.out_dir = Path(out_dir)
        self.expedition_id = expedition_id
        self.frames_dir = self.out_dir / "frames" / expedition_id
        self.frames_dir.mkdir(parents=True, exist_ok=True)
        self.writer = ManifestWriter(self.out_dir / "manifest.csv")
        self.samples: list[Sample] = []
        self._i = 0

    def add(self, frame, swa: float, speed: float, t: float) -> None:
        path = self.frames_dir / f"{self._i:06d}.png"
        save_gray_png(frame, path)
        self.writer.add(path, swa, speed, t, self.expedition_id)
        self.samples.append(
            Sample(frame_path=path, swa=swa, speed=speed, timestamp=t, expedition_id=self.expedition_id)
        )
        self._i += 1

    def close(self) -> None:
        self.writer.close()


def collect(
    sc: Scenario,
    expert: ExpertParams,
    out_dir,
    vehicle: VehicleParams = VehicleParams(),
    camera: CameraConfig = CameraConfig(),
    expedition_id: str | None = None,
) -> Dataset:
    """Run the noisy expert closed loop and append the demonstration to out_dir.

    The recorded SWA is the curvature actually applied (noise included) mapped
    through the bicycle model. Returns the newly collected samples; the full
    dataset lives in out_dir/manifest.csv.
    """
    expedition_id = expedition_id or f"{sc.name}-{sc.seed}"
    sink = DatasetSink(out_dir, expedition_id)
    try:
        run_closed_loop(
            sc,
            ExpertDriver(expert, vehicle),
            vehicle=vehicle,
            camera=camera,
            sink=sink,
        )
    finally:
        sink.close()
    return Dataset(samples=tuple(sink.samples), manifest_path=Path(out_dir) / "manifest.csv")


def load_collected(out_dir) -> Dataset:
    return load_manifest(Path(out_dir) / "manifest.csv")
