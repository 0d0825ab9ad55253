"""Closed-loop simulation: render -> act -> (smooth) -> fault -> step -> log."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..camera.render import CameraConfig, render
from ..errors import VehicleLostError
from ..geometry.centerline import (
    Centerline,
    LanePose,
    heading_at,
    lane_center_offset,
    localize,
    point_at,
)
from ..metrics import marking_distances
from ..policy.smoothing import SmootherState, smooth
from ..vehicle import VehicleParams, VehicleState, curvature_to_swa, step, swa_to_curvature
from .trajlog import (
    TERMINATION_COMPLETED,
    TERMINATION_END_OF_ROAD,
    TERMINATION_LOST,
    LogBuilder,
    TrajectoryLog,
)

# Stop this far short of the road end rather than driving off the geometry.
END_MARGIN = 1.0


@dataclass(frozen=True)
class Scenario:
    road: Centerline
    lane_index: int = 0
    speed: float = 19.44      # m/s (70 km/h)
    duration: float = 60.0    # seconds
    tick_dt: float = 0.05     # 20 Hz
    seed: int = 0
    name: str = "scenario"
    start_s: float = 0.0
    start_y_off: float = 0.0
    start_psi_err: float = 0.0

    def __post_init__(self):
        if self.tick_dt <= 0:
            raise ValueError("tick_dt must be > 0")
        if self.speed <= 0:
            raise ValueError("speed must be > 0")
        if self.duration < 0:
            raise ValueError("duration must be >= 0")


@dataclass(frozen=True)
class FaultEvent:
    t_start: float
    duration: float
    swa_override: float  # radians, applied verbatim while active

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("fault duration must be > 0")

    def active(self, t: float) -> bool:
        return self.t_start <= t < self.t_start + self.duration


@dataclass(frozen=True)
class TickView:
    """Everything a driver may look at on one tick."""

    t: float
    state: VehicleState
    pose: LanePose
    road: Centerline
    lane_index: int
    dt: float
    frame: np.ndarray | None
    rng: np.random.Generator


def initial_state(sc: Scenario) -> VehicleState:
    theta = heading_at(sc.road, sc.start_s)
    base = point_at(sc.road, sc.start_s)
    lateral = lane_center_offset(sc.road, sc.lane_index) + sc.start_y_off
    normal = np.array([-math.sin(theta), math.cos(theta)])
    pos = base + lateral * normal
    return VehicleState(
        x=float(pos[0]), y=float(pos[1]), psi=theta + sc.start_psi_err, v=sc.speed
    )


def frame_seed(scenario_seed: int, tick: int) -> int:
    # Distinct per (scenario, tick); plain affine mixing is plenty here.
    return scenario_seed * 1_000_003 + tick


def run_closed_loop(
    sc: Scenario,
    driver,
    faults: tuple[FaultEvent, ...] = (),
    smoother: SmootherState | None = None,
    vehicle: VehicleParams = VehicleParams(),
    camera: CameraConfig = CameraConfig(),
    sink=None,
) -> TrajectoryLog:
    """Run a scenario to completion, early loss of the vehicle, or road end.

    `driver` is called with a TickView and returns a curvature command.
    Rendering happens only when the driver needs frames or a collection sink
    is attached. Identical inputs and seeds give bit-identical logs.
    """
    rng = np.random.default_rng(sc.seed)
    need_frame = bool(getattr(driver, "needs_frame", False)) or sink is not None
    n_ticks = int(round(sc.duration / sc.tick_dt))
    state = initial_state(sc)
    log = LogBuilder(sc.tick_dt)
    reason = TERMINATION_COMPLETED
    smoother_state = smoother

    for i in range(n_ticks):
        t = i * sc.tick_dt
        try:
            pose = localize(sc.road, state.x, state.y, state.psi, sc.lane_index)
        except VehicleLostError:
            reason = TERMINATION_LOST
            break
        if pose.s >= sc.road.total_length - (sc.speed * sc.tick_dt + END_MARGIN):
            reason = TERMINATION_END_OF_ROAD
            break

        frame = None
        if need_frame:
            frame = render(sc.road, state, sc.lane_index, camera, seed=frame_seed(sc.seed, i))
        view = TickView(
            t=t, state=state, pose=pose, road=sc.road, lane_index=sc.lane_index,
            dt=sc.tick_dt, frame=frame, rng=rng,
        )
        action = float(driver(view))
        if smoother_state is not None:
            action, smoother_state = smooth(smoother_state, action)

        fault_now = any(f.active(t) for f in faults)
        if fault_now:
            swa = next(f.swa_override for f in faults if f.active(t))
            kappa_cmd = swa_to_curvature(swa, vehicle)
        else:
            kappa_cmd = min(max(action, -vehicle.max_kappa), vehicle.max_kappa)
            swa = curvature_to_swa(kappa_cmd, vehicle)

        d_l, d_r = marking_distances(pose.y_off, sc.road.lane_width, vehicle.width)
        log.add(
            t=t, x=state.x, y=state.y, psi=state.psi, v=state.v,
            kappa_cmd=kappa_cmd, swa=swa, y_off=pose.y_off,
            d_l=float(d_l), d_r=float(d_r),
            a_lat=state.v**2 * abs(kappa_cmd), fault=fault_now,
        )
        if sink is not None:
            sink.add(frame=frame, swa=swa, speed=state.v, t=t)
        state = step(state, kappa_cmd, sc.tick_dt, vehicle)

    return log.build(reason)
