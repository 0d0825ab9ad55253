"""Synthetic grayscale front-view rendering of the road scene.

Deliberately minimal: a flat road plane in mid-gray with Gaussian texture
noise, near-white lane markings (solid outer, 3 m / 9 m dashed inner),
and a vertical sky gradient above the horizon. Lane markings are projected
through a pinhole camera and rasterized as filled quads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from ..errors import FrameError
from ..geometry.centerline import Centerline, localize, point_at
from ..vehicle import VehicleState

ROAD_GRAY = 90.0
MARKING_GRAY = 230
SKY_TOP = 180.0
SKY_HORIZON = 120.0
MARKING_WIDTH = 0.15   # meters
DASH_ON = 3.0          # meters painted ...
DASH_PERIOD = 12.0     # ... out of every 12
NEAR_PLANE = 0.5       # meters, quads closer than this are skipped
DRAW_BEHIND = 5.0      # meters of marking drawn behind the vehicle
DRAW_AHEAD = 220.0     # meters of marking drawn ahead
SEGMENT_DS = 2.0       # meters per marking quad


@dataclass(frozen=True)
class CameraConfig:
    image_width: int = 640
    image_height: int = 480
    height_above_road: float = 1.4  # meters
    pitch: float = -0.03            # radians, negative looks down
    horizontal_fov: float = 1.05    # radians
    mount_forward: float = 2.0      # meters ahead of the rear axle
    noise_sigma: float = 4.0        # gray levels of road texture noise

    def __post_init__(self):
        if self.image_width <= 0 or self.image_height <= 0:
            raise FrameError("image dimensions must be positive")
        if not 0.0 < self.horizontal_fov < math.pi:
            raise FrameError("horizontal_fov must be in (0, pi)")

    @property
    def focal_px(self) -> float:
        return (self.image_width / 2.0) / math.tan(self.horizontal_fov / 2.0)


def _marking_offsets(c: Centerline) -> list[tuple[float, bool]]:
    """(lateral offset, dashed) for every marking; outer markings are solid."""
    n = c.lane_count
    return [((i - n / 2.0) * c.lane_width, 0 < i < n) for i in range(n + 1)]


def _segment_breaks(s0: float, s1: float, dashed: bool) -> np.ndarray:
    base = np.arange(s0, s1, SEGMENT_DS)
    pieces = [base, [s1]]
    if dashed:
        k0 = math.floor(s0 / DASH_PERIOD)
        k1 = math.ceil(s1 / DASH_PERIOD) + 1
        edges = np.array([k * DASH_PERIOD + d for k in range(k0, k1) for d in (0.0, DASH_ON)])
        pieces.append(edges[(edges > s0) & (edges < s1)])
    return np.unique(np.concatenate(pieces))


def _marking_polygons(c: Centerline, state: VehicleState, s_v: float, cfg: CameraConfig):
    """Project marking edge polylines into the image; yields 4-corner quads."""
    psi, phi = state.psi, cfg.pitch
    cam_pos = np.array(
        [
            state.x + cfg.mount_forward * math.cos(psi),
            state.y + cfg.mount_forward * math.sin(psi),
            cfg.height_above_road,
        ]
    )
    right = np.array([math.sin(psi), -math.cos(psi), 0.0])
    forward = np.array([math.cos(phi) * math.cos(psi), math.cos(phi) * math.sin(psi), math.sin(phi)])
    down = np.cross(forward, right)
    rot = np.stack([right, down, forward])  # world -> camera

    f = cfg.focal_px
    cx = (cfg.image_width - 1) / 2.0
    cy = (cfg.image_height - 1) / 2.0

    s0 = max(0.0, s_v - DRAW_BEHIND)
    s1 = min(c.total_length, s_v + DRAW_AHEAD)
    half = MARKING_WIDTH / 2.0
    quads = []
    for offset, dashed in _marking_offsets(c):
        s = _segment_breaks(s0, s1, dashed)
        if len(s) < 2:
            continue
        centers = point_at(c, s)
        theta = np.interp(s, c.arc_length, c.heading)
        normal = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
        uv = []
        ok = []
        for edge in (offset - half, offset + half):
            pts = centers + edge * normal
            rel = np.column_stack([pts[:, 0], pts[:, 1], np.zeros(len(pts))]) - cam_pos
            cam = rel @ rot.T
            z = cam[:, 2]
            valid = z > NEAR_PLANE
            z_safe = np.where(valid, z, 1.0)
            uv.append(
                np.stack([cx + f * cam[:, 0] / z_safe, cy + f * cam[:, 1] / z_safe], axis=1)
            )
            ok.append(valid)
        visible = ok[0] & ok[1]
        mid = 0.5 * (s[1:] + s[:-1])
        drawn = np.ones(len(mid), dtype=bool) if not dashed else (mid % DASH_PERIOD) < DASH_ON
        for i in np.nonzero(drawn & visible[:-1] & visible[1:])[0]:
            quads.append(
                [
                    tuple(uv[0][i]),
                    tuple(uv[0][i + 1]),
                    tuple(uv[1][i + 1]),
                    tuple(uv[1][i]),
                ]
            )
    return quads


def _base_image(cfg: CameraConfig, rng: np.random.Generator | None) -> np.ndarray:
    h, w = cfg.image_height, cfg.image_width
    # First image row whose ray points below the horizon.
    v_h = (h - 1) / 2.0 + cfg.focal_px * math.tan(cfg.pitch)
    horizon = min(max(int(math.floor(v_h)) + 1, 0), h)
    img = np.empty((h, w), dtype=np.float64)
    if horizon > 0:
        ramp = np.linspace(SKY_TOP, SKY_HORIZON, num=horizon)
        img[:horizon] = ramp[:, None]
    img[horizon:] = ROAD_GRAY
    if rng is not None and cfg.noise_sigma > 0 and horizon < h:
        img[horizon:] += rng.normal(0.0, cfg.noise_sigma, size=(h - horizon, w))
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def render_with_mask(
    c: Centerline,
    state: VehicleState,
    lane_index: int,
    cfg: CameraConfig,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Render a frame plus a boolean mask of lane-marking pixels."""
    pose = localize(c, state.x, state.y, state.psi, lane_index)  # raises when lost
    rng = np.random.default_rng(seed) if cfg.noise_sigma > 0 else None
    quads = _marking_polygons(c, state, pose.s, cfg)

    frame = Image.fromarray(_base_image(cfg, rng), mode="L")
    mask = Image.new("L", frame.size, 0)
    draw_f = ImageDraw.Draw(frame)
    draw_m = ImageDraw.Draw(mask)
    for quad in quads:
        draw_f.polygon(quad, fill=MARKING_GRAY)
        draw_m.polygon(quad, fill=255)
    return np.asarray(frame, dtype=np.uint8), np.asarray(mask) > 0


def render(
    c: Centerline,
    state: VehicleState,
    lane_index: int,
    cfg: CameraConfig,
    seed: int = 0,
) -> np.ndarray:
    """Render the camera view for a vehicle pose; deterministic per seed."""
    frame, _ = render_with_mask(c, state, lane_index, cfg, seed=seed)
    return frame
