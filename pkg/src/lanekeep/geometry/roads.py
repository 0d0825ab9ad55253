"""Synthetic road generators used for data collection and evaluation."""

from __future__ import annotations

import math

import numpy as np

from ..errors import GeometryError
from .centerline import Centerline, make_centerline, resample_centerline

# Curvature presets: (amplitude 1/m, base wavelength m). "highway" is long and
# gentle, "country" is winding; s-profiles are sums of three seeded sinusoids.
WAVY_PRESETS = {
    "highway": (0.0022, 900.0),
    "country": (0.005, 280.0),
}


def _cumtrapz(f: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty(len(f))
    out[0] = 0.0
    np.cumsum((f[1:] + f[:-1]) * (0.5 * dx), out=out[1:])
    return out


def road_from_curvature(
    kappa: np.ndarray,
    length: float,
    ds: float = 1.0,
    lane_count: int = 1,
    lane_width: float = 3.75,
    fine_step: float = 0.25,
) -> Centerline:
    """Integrate a curvature profile kappa(s) into a centerline.

    `kappa` is either a callable of s or an array sampled at `fine_step`.
    """
    s = np.arange(0.0, length + fine_step * 0.5, fine_step)
    k = kappa(s) if callable(kappa) else np.asarray(kappa, dtype=np.float64)
    if len(k) != len(s):
        raise GeometryError(f"curvature profile has {len(k)} samples, expected {len(s)}")
    psi = _cumtrapz(k, fine_step)
    x = _cumtrapz(np.cos(psi), fine_step)
    y = _cumtrapz(np.sin(psi), fine_step)
    c = make_centerline(np.column_stack([x, y]), lane_count=lane_count, lane_width=lane_width)
    return resample_centerline(c, ds)


def make_straight(
    length: float, ds: float = 1.0, lane_count: int = 1, lane_width: float = 3.75
) -> Centerline:
    n = max(1, int(round(length / ds)))
    x = np.linspace(0.0, length, n + 1)
    pts = np.column_stack([x, np.zeros_like(x)])
    return make_centerline(pts, lane_count=lane_count, lane_width=lane_width)


def make_circle(
    radius: float,
    arc: float | None = None,
    ds: float = 1.0,
    left: bool = True,
    lane_count: int = 1,
    lane_width: float = 3.75,
) -> Centerline:
    """Circle road starting at the origin heading +x; `arc` defaults to a full lap."""
    if radius <= 0:
        raise GeometryError("radius must be > 0")
    if arc is None:
        arc = 2.0 * math.pi * radius
    n = max(2, int(round(arc / ds)))
    theta = np.linspace(0.0, arc / radius, n + 1)
    sign = 1.0 if left else -1.0
    x = radius * np.sin(theta)
    y = sign * radius * (1.0 - np.cos(theta))
    return make_centerline(np.column_stack([x, y]), lane_count=lane_count, lane_width=lane_width)


def make_clothoid(
    length: float,
    kappa0: float,
    kappa1: float,
    ds: float = 1.0,
    lane_count: int = 1,
    lane_width: float = 3.75,
) -> Centerline:
    """Road whose curvature varies linearly from kappa0 to kappa1 over `length`."""
    return road_from_curvature(
        lambda s: kappa0 + (kappa1 - kappa0) * s / length,
        length,
        ds=ds,
        lane_count=lane_count,
        lane_width=lane_width,
    )


def make_wavy(
    length: float,
    kind: str = "country",
    seed: int = 0,
    amplitude: float | None = None,
    wavelength: float | None = None,
    ds: float = 1.0,
    lane_count: int = 2,
    lane_width: float = 3.75,
) -> Centerline:
    """Seeded road with a three-sinusoid curvature profile ("highway" or "country")."""
    if kind not in WAVY_PRESETS:
        raise GeometryError(f"unknown road kind {kind!r}; choose from {sorted(WAVY_PRESETS)}")
    amp0, wl0 = WAVY_PRESETS[kind]
    amp = amplitude if amplitude is not None else amp0
    wl = wavelength if wavelength is not None else wl0
    rng = np.random.default_rng(seed)
    parts = []
    for weight, wl_frac in ((1.0, 1.0), (0.5, 1.0 / 2.3), (0.25, 1.0 / 4.7)):
        a = amp * weight * rng.uniform(0.8, 1.2)
        lam = wl * wl_frac
        phase = rng.uniform(0.0, 2.0 * math.pi)
        parts.append((a, 2.0 * math.pi / lam, phase))

    def kappa(s):
        k = np.zeros_like(s)
        for a, omega, phase in parts:
            k += a * np.sin(omega * s + phase)
        return k

    return road_from_curvature(kappa, length, ds=ds, lane_count=lane_count, lane_width=lane_width)
