"""Drivers for the closed loop: learned policy, scripted expert, optimal."""

from __future__ import annotations

from ..expert import ExpertParams, expert_action, optimal_action
from ..nn.network import Network
from ..policy.architecture import infer
from ..vehicle import VehicleParams
from .loop import TickView


class PolicyDriver:
    """Runs the trained CNN on the rendered frame."""

    needs_frame = True

    def __init__(self, net: Network):
        self.net = net

    def __call__(self, view: TickView) -> float:
        return infer(self.net, view.frame)


class ExpertDriver:
    """Lane-centering expert; draws its curvature noise from the run's stream."""

    needs_frame = False

    def __init__(self, params: ExpertParams = ExpertParams(), vehicle: VehicleParams = VehicleParams()):
        self.params = params
        self.vehicle = vehicle

    def __call__(self, view: TickView) -> float:
        return expert_action(view.pose, view.road, self.params, rng=view.rng, vehicle=self.vehicle)


class OptimalDriver:
    """Applies the true lane-center curvature, sampled half a tick ahead to
    match the midpoint integrator; no feedback."""

    needs_frame = False

    def __call__(self, view: TickView) -> float:
        s_mid = min(view.pose.s + view.state.v * view.dt / 2.0, view.road.total_length)
        return optimal_action(view.road, s_mid, view.lane_index)
