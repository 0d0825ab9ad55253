"""Kinematic bicycle model: SWA <-> curvature conversion and forward simulation.

The steering action used throughout the package is path curvature 1/r. With
wheelbase L and front wheel angle alpha = swa / steering_ratio, the rear-axle
path curvature is tan(alpha) / L. Positive curvature and positive SWA turn left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 2.9        # L, meters
    steering_ratio: float = 16.0  # SWA per front-wheel angle
    max_swa: float = 9.0          # radians
    width: float = 2.0            # meters
    max_alpha: float = 0.6        # radians, front-wheel lock

    def __post_init__(self):
        if self.wheelbase <= 0:
            raise ValueError("wheelbase must be > 0")
        if self.steering_ratio < 1.0:
            raise ValueError("steering_ratio must be >= 1")
        if self.width <= 0:
            raise ValueError("width must be > 0")
        if not 0 < self.max_alpha < math.pi / 2:
            raise ValueError("max_alpha must be in (0, pi/2)")

    @property
    def max_kappa(self) -> float:
        """Mechanical curvature limit tan(max_alpha) / L."""
        return math.tan(self.max_alpha) / self.wheelbase


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0    # heading, radians (not wrapped; continuous)
    v: float = 0.0      # m/s, >= 0
    kappa: float = 0.0  # current path curvature, 1/m

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("speed must be >= 0")


def swa_to_curvature(swa: float, p: VehicleParams) -> float:
    """Steering wheel angle (radians) to path curvature (1/m)."""
    if abs(swa) > p.max_swa + 1e-12:
        raise ValueError(f"|swa|={abs(swa):.3f} exceeds max_swa={p.max_swa}")
    alpha = min(max(swa / p.steering_ratio, -p.max_alpha), p.max_alpha)
    return math.tan(alpha) / p.wheelbase


def curvature_to_swa(kappa: float, p: VehicleParams) -> float:
    """Inverse of swa_to_curvature on the mechanically reachable domain."""
    if abs(kappa) > p.max_kappa + 1e-12:
        raise ValueError(f"|kappa|={abs(kappa):.4f} exceeds the mechanical limit {p.max_kappa:.4f}")
    return p.steering_ratio * math.atan(kappa * p.wheelbase)


def step(state: VehicleState, kappa_cmd: float, dt: float, p: VehicleParams) -> VehicleState:
    """Advance one tick at constant speed with midpoint-heading integration.

    Heading change per step is exactly v * kappa_cmd * dt; the position update
    uses the midpoint heading, giving O(dt^2) global position error.
    """
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"dt={dt} outside (0, 0.1]")
    if abs(kappa_cmd) > p.max_kappa + 1e-12:
        raise ValueError(f"|kappa_cmd|={abs(kappa_cmd):.4f} exceeds the mechanical limit")
    dpsi = state.v * kappa_cmd * dt
    psi_mid = state.psi + 0.5 * dpsi
    return replace(
        state,
        x=state.x + state.v * math.cos(psi_mid) * dt,
        y=state.y + state.v * math.sin(psi_mid) * dt,
        psi=state.psi + dpsi,
        kappa=kappa_cmd,
    )
