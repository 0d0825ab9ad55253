"""Scripted demonstration drivers.

The lane-centering expert combines the road curvature a lookahead distance
ahead with proportional feedback on lateral offset and heading error, plus
seeded Gaussian curvature noise; it stands in for the human demonstrator.
The optimal driver applies the true lane-center curvature with no feedback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry.centerline import Centerline, LanePose, curvature_at, lane_center_offset
from .vehicle import VehicleParams

# Feedback gains are chosen so the closed loop stays well damped at 50-100 km/h
# even with the optional gamma = 0.1 action smoother in the loop (the smoother
# adds ~0.5 s of lag; stability needs k_psi > k_y * v * dt / gamma).
DEFAULT_K_Y = 0.02
DEFAULT_K_PSI = 0.4


@dataclass(frozen=True)
class ExpertParams:
    lookahead: float = 12.0        # meters ahead for the feedforward curvature
    k_y: float = DEFAULT_K_Y       # 1/m per meter of lateral offset
    k_psi: float = DEFAULT_K_PSI   # 1/m per radian of heading error
    noise_std: float = 0.002       # 1/m curvature noise
    seed: int = 0

    def __post_init__(self):
        if self.k_y < 0 or self.k_psi < 0:
            raise ValueError("gains must be >= 0")
        if self.lookahead <= 0:
            raise ValueError("lookahead must be > 0")


def expert_action(
    pose: LanePose,
    road: Centerline,
    p: ExpertParams,
    rng: np.random.Generator | None = None,
    vehicle: VehicleParams = VehicleParams(),
) -> float:
    """Curvature command of the lane-centering expert.

    Noise is drawn from `rng` (one stream per collection run); with rng=None
    the action is noise free.
    """
    s_ahead = min(pose.s + p.lookahead, road.total_length)
    kappa = curvature_at(road, s_ahead) - p.k_y * pose.y_off - p.k_psi * pose.psi_err
    if rng is not None and p.noise_std > 0:
        kappa += rng.normal(0.0, p.noise_std)
    limit = vehicle.max_kappa
    return min(max(kappa, -limit), limit)


def optimal_action(road: Centerline, s: float, lane_index: int = 0) -> float:
    """True lane-center curvature at arc length s.

    A lane center offset y from the road centerline follows an offset curve
    whose curvature is kappa / (1 - kappa * y).
    """
    kappa = curvature_at(road, s)
    y_lane = lane_center_offset(road, lane_index)
    return kappa / (1.0 - kappa * y_lane)
