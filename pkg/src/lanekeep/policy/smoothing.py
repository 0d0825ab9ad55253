"""Exponentially decaying average of inferred steering actions.

a_bar_t = gamma * a_t + (1 - gamma) * a_bar_{t-1}. Off by default in the
harness; gamma ~ 0.1 trades responsiveness for trajectory smoothness.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SmootherState:
    gamma: float = 0.1
    a_bar: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma={self.gamma} outside (0, 1]")


def smooth(st: SmootherState, a: float) -> tuple[float, SmootherState]:
    a_bar = st.gamma * a + (1.0 - st.gamma) * st.a_bar
    return a_bar, replace(st, a_bar=a_bar)
