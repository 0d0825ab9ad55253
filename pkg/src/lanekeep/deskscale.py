"""Desk-scale experiment recipe: collection legs, evaluation road, recovery runs.

Full-scale training data (millions of real frames) is out of reach on a
desktop, so the standard desk corpus is ~62k synthetic frames collected by the
noisy lane-centering expert over mixed highway and country roads, with varied
lanes, speeds, and initial offsets so the dataset contains the mild corrective
behavior regular driving produces. The held-out evaluation road never appears
in collection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .camera.render import CameraConfig
from .dataset.manifest import Dataset, load_manifest
from .expert import ExpertParams
from .geometry.roads import make_straight, make_wavy
from .harness.collect import collect
from .harness.loop import FaultEvent, Scenario
from .vehicle import VehicleParams

# 320x240 renders: markings resolve identically after preprocessing, frames are
# ~4x cheaper to draw and store than 640x480.
DESK_CAMERA = CameraConfig(image_width=320, image_height=240)

# (kind, road seed, speed m/s, lane, start_y m, start_psi rad, noise_std 1/m).
# The near-noiseless straight leg reproduces the overrepresented straight-ahead
# driving that motivates histogram pruning; the offset starts seed the corpus
# with the mild corrective maneuvers regular driving contains.
COLLECT_LEGS = (
    ("straight", 10, 27.78, 0, 0.0, 0.0, 0.0002),
    ("highway", 11, 27.78, 0, 0.0, 0.0, 0.003),
    ("highway", 12, 25.00, 1, 0.5, 0.0, 0.003),
    ("country", 13, 16.00, 0, -0.5, 0.0, 0.003),
    ("country", 14, 19.44, 1, 0.8, 0.0, 0.003),
    ("country", 15, 13.90, 0, -0.8, 0.02, 0.003),
    ("highway", 16, 22.00, 1, 0.0, 0.03, 0.003),
)
# The six wavy legs alone exceed 60k samples; the straight leg is on top.
LEG_DURATION_S = 520.0
EVAL_ROAD_SEED = 99
EVAL_SPEED = 19.44  # 70 km/h
EVAL_DISTANCE_M = 5000.0


def leg_scenario(index: int) -> Scenario:
    kind, seed, speed, lane, start_y, start_psi, _ = COLLECT_LEGS[index]
    length = LEG_DURATION_S * speed + 200.0
    if kind == "straight":
        road = make_straight(length, lane_count=2)
    else:
        road = make_wavy(length, kind, seed=seed)
    return Scenario(
        road=road,
        lane_index=lane,
        speed=speed,
        duration=LEG_DURATION_S,
        seed=seed,
        name=f"{kind}{seed}",
        start_y_off=start_y,
        start_psi_err=start_psi,
    )


def collect_corpus(
    out_dir,
    camera: CameraConfig = DESK_CAMERA,
    vehicle: VehicleParams = VehicleParams(),
    progress=None,
) -> Dataset:
    """Collect every leg into out_dir; returns the merged dataset (~73k samples)."""
    for i, leg in enumerate(COLLECT_LEGS):
        sc = leg_scenario(i)
        collect(sc, ExpertParams(noise_std=leg[6]), out_dir, vehicle=vehicle, camera=camera)
        if progress is not None:
            progress(i + 1, len(COLLECT_LEGS), sc.name)
    return load_manifest(Path(out_dir) / "manifest.csv")


def desk_prune_cap(n_samples: int, full_scale_cap: int = 10_000, full_scale_n: float = 2.5e6) -> int:
    """Bin cap scaled from the full-scale rule to the desk corpus size."""
    return max(1, math.ceil(full_scale_cap * n_samples / full_scale_n))


def eval_scenario(distance_m: float = EVAL_DISTANCE_M, seed: int = 0) -> Scenario:
    road = make_wavy(distance_m + 400.0, "country", seed=EVAL_ROAD_SEED)
    return Scenario(
        road=road,
        lane_index=0,
        speed=EVAL_SPEED,
        duration=distance_m / EVAL_SPEED,
        seed=seed,
        name="eval-country",
    )


@dataclass(frozen=True)
class RecoveryTrial:
    scenario: Scenario
    fault: FaultEvent


def recovery_trial(trial: int) -> RecoveryTrial:
    """Straight-road fault-injection run; trials differ in render noise and a
    small initial offset."""
    road = make_straight(1500.0)
    sc = Scenario(
        road=road,
        lane_index=0,
        speed=EVAL_SPEED,
        duration=40.0,
        seed=1000 + trial,
        name=f"recovery{trial}",
        start_y_off=0.02 * (trial - 2),
    )
    return RecoveryTrial(sc, FaultEvent(t_start=2.0, duration=0.5, swa_override=1.5))
