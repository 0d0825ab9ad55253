from .collect import collect
from .drivers import ExpertDriver, OptimalDriver, PolicyDriver
from .loop import FaultEvent, Scenario, TickView, run_closed_loop
from .trajlog import TrajectoryLog

__all__ = [
    "ExpertDriver",
    "FaultEvent",
    "OptimalDriver",
    "PolicyDriver",
    "Scenario",
    "TickView",
    "TrajectoryLog",
    "collect",
    "run_closed_loop",
]
