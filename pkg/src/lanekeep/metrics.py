"""Lane positioning penalty, discomfort level, and trajectory reports.

The positioning penalty for a vehicle-to-marking distance d with penalty
region width w and shape beta is

    1                      if d < 0   (marking crossed)
    (beta*w)^(d/w) - beta*d  if 0 <= d <= w
    0                      if d > w

The discomfort level of a lateral acceleration or jerk magnitude x with
comfort threshold g is x^2/g^2 below g and (5/6 + x^2/(6 g^2))^6 above;
both branches equal 1 at x = g.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import MisalignedLogsError


@dataclass(frozen=True)
class PenaltyConfig:
    w: float = 0.4     # penalty region width, meters (both sides)
    beta: float = 0.5  # shape parameter

    def __post_init__(self):
        if self.w < 0:
            raise ValueError("penalty width must be >= 0")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")


@dataclass(frozen=True)
class ComfortConfig:
    g: float = 1.8  # comfort threshold, m/s^2 for acceleration, m/s^3 for jerk

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("comfort threshold must be > 0")


def marking_distances(y_off: float, lane_width: float, vehicle_width: float):
    """Distances from the vehicle edges to the (left, right) lane markings.

    Negative means the marking is crossed. y_off is positive toward the left
    marking.
    """
    if vehicle_width >= lane_width:
        raise ValueError("vehicle wider than the lane")
    margin = (lane_width - vehicle_width) / 2.0
    return margin - np.asarray(y_off), margin + np.asarray(y_off)


def lane_penalty(d, cfg: PenaltyConfig):
    """Positioning penalty in [0, 1] for marking distance(s) d."""
    d_arr = np.asarray(d, dtype=np.float64)
    if cfg.w == 0.0:
        out = np.where(d_arr < 0.0, 1.0, 0.0)
    else:
        dc = np.clip(d_arr, 0.0, cfg.w)
        mid = np.power(cfg.beta * cfg.w, dc / cfg.w) - cfg.beta * dc
        out = np.where(d_arr < 0.0, 1.0, np.where(d_arr > cfg.w, 0.0, mid))
    return float(out) if np.isscalar(d) else out


def discomfort(x, cfg: ComfortConfig):
    """Discomfort level of acceleration/jerk magnitude(s) x >= 0."""
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr < 0.0):
        raise ValueError("discomfort takes magnitudes; pass |x|")
    r2 = np.square(x_arr / cfg.g)
    out = np.where(x_arr < cfg.g, r2, np.power(5.0 / 6.0 + r2 / 6.0, 6))
    return float(out) if np.isscalar(x) else out


def lateral_accel(v: float, kappa):
    """Lateral acceleration magnitude v^2 * |kappa|."""
    if np.any(np.asarray(v) < 0):
        raise ValueError("speed must be >= 0")
    result = np.asarray(v) ** 2 * np.abs(kappa)
    return float(result) if np.isscalar(kappa) and np.isscalar(v) else result


def jerk_series(accel, dt: float, smooth_window: int = 5) -> np.ndarray:
    """Finite-difference jerk of a signed lateral-acceleration series.

    A centered moving average of `smooth_window` samples (odd; 1 disables it)
    pre-filters the acceleration, then central differences are taken with
    one-sided differences at the endpoints.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    a = np.asarray(accel, dtype=np.float64)
    if a.ndim != 1 or len(a) < 2:
        raise ValueError("need at least 2 acceleration samples")
    if smooth_window < 1 or smooth_window % 2 == 0:
        raise ValueError("smooth_window must be a positive odd integer")
    if smooth_window > 1:
        pad = smooth_window // 2
        padded = np.concatenate([np.full(pad, a[0]), a, np.full(pad, a[-1])])
        a = np.convolve(padded, np.full(smooth_window, 1.0 / smooth_window), mode="valid")
    jerk = np.empty_like(a)
    jerk[1:-1] = (a[2:] - a[:-2]) / (2.0 * dt)
    jerk[0] = (a[1] - a[0]) / dt
    jerk[-1] = (a[-1] - a[-2]) / dt
    return jerk


@dataclass(frozen=True)
class MetricsReport:
    n_ticks: int
    good_position_fraction: float
    mean_lane_penalty: float
    max_lane_penalty: float
    mean_accel_discomfort: float
    mean_jerk_discomfort: float
    accel_discomfort_ratio: float | None  # policy / optimal; None without a baseline
    jerk_discomfort_ratio: float | None
    near_marking_fraction: float  # fraction of ticks within 0.5 m of either marking
    penalty_w: float
    penalty_beta: float
    comfort_g: float
    jerk_filter_window: int

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return 1.0 if num == 0.0 else math.inf
    return num / den


def _comfort_means(log, ccfg: ComfortConfig, jerk_window: int) -> tuple[float, float]:
    signed_accel = log.v**2 * log.kappa_cmd
    mean_acc = float(np.mean(discomfort(np.abs(signed_accel), ccfg)))
    jerk = jerk_series(signed_accel, log.dt, smooth_window=jerk_window)
    mean_jerk = float(np.mean(discomfort(np.abs(jerk), ccfg)))
    return mean_acc, mean_jerk


def evaluate(
    log,
    optimal_log=None,
    pcfg: PenaltyConfig = PenaltyConfig(),
    ccfg: ComfortConfig = ComfortConfig(),
    jerk_window: int = 5,
) -> MetricsReport:
    """Aggregate a closed-loop trajectory log into a MetricsReport.

    With `optimal_log` present (same road, same speed, same tick count) the
    report includes the relative discomfort ratios policy / optimal.
    """
    if len(log.t) < 2:
        raise MisalignedLogsError("log too short to evaluate")
    if optimal_log is not None:
        if len(optimal_log.t) != len(log.t):
            raise MisalignedLogsError(
                f"log lengths differ: {len(log.t)} vs {len(optimal_log.t)}"
            )
        if abs(optimal_log.dt - log.dt) > 1e-12:
            raise MisalignedLogsError("logs have different tick rates")

    penalty = np.maximum(lane_penalty(log.d_l, pcfg), lane_penalty(log.d_r, pcfg))
    mean_acc, mean_jerk = _comfort_means(log, ccfg, jerk_window)
    acc_ratio = jerk_ratio = None
    if optimal_log is not None:
        opt_acc, opt_jerk = _comfort_means(optimal_log, ccfg, jerk_window)
        acc_ratio = _ratio(mean_acc, opt_acc)
        jerk_ratio = _ratio(mean_jerk, opt_jerk)
    return MetricsReport(
        n_ticks=len(log.t),
        good_position_fraction=float(np.mean(penalty == 0.0)),
        mean_lane_penalty=float(np.mean(penalty)),
        max_lane_penalty=float(np.max(penalty)),
        mean_accel_discomfort=mean_acc,
        mean_jerk_discomfort=mean_jerk,
        accel_discomfort_ratio=acc_ratio,
        jerk_discomfort_ratio=jerk_ratio,
        near_marking_fraction=float(np.mean(np.minimum(log.d_l, log.d_r) < 0.5)),
        penalty_w=pcfg.w,
        penalty_beta=pcfg.beta,
        comfort_g=ccfg.g,
        jerk_filter_window=jerk_window,
    )
