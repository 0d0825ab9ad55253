"""Road centerline: construction, lat/lon projection, resampling, curvature, localization.

Conventions used throughout the package:

* world frame is x-east / y-north, headings are radians counter-clockwise from +x;
* positive curvature turns left, positive lateral offset points toward the left
  lane marking;
* curvature at a point is the central finite difference of the polyline heading,
  kappa_i = (psi_{i+1} - psi_{i-1}) / (s_{i+1} - s_{i-1}), with unwrapped angles.
  This is the single curvature definition used everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError, VehicleLostError

EARTH_RADIUS_M = 6_371_000.0

# Sanity bound for road-like geometry; tighter than any drivable curve we generate.
MAX_ROAD_CURVATURE = 0.2


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = (angle + math.pi) % (2.0 * math.pi) - math.pi
    if wrapped == -math.pi:
        return math.pi
    return wrapped


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise GeometryError(f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise GeometryError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class LanePose:
    """Vehicle position expressed relative to a lane of the road."""

    s: float        # meters along the centerline
    y_off: float    # lateral offset from the lane center, positive toward left marking
    psi_err: float  # heading error vs the road tangent, wrapped to (-pi, pi]


@dataclass(frozen=True)
class Centerline:
    """Arc-length parameterized road geometry. Immutable after construction."""

    points: np.ndarray      # (N, 2) float64 meters
    arc_length: np.ndarray  # (N,) cumulative meters, strictly increasing
    heading: np.ndarray     # (N,) radians, unwrapped
    curvature: np.ndarray   # (N,) 1/m, signed, positive = left turn
    lane_count: int = 1
    lane_width: float = 3.75

    @property
    def total_length(self) -> float:
        return float(self.arc_length[-1])


def _headings_and_curvature(points: np.ndarray, arc: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(points)
    psi = np.empty(n)
    if n == 2:
        d = points[1] - points[0]
        psi[:] = math.atan2(d[1], d[0])
        return psi, np.zeros(n)
    fwd = points[2:] - points[:-2]
    psi[1:-1] = np.arctan2(fwd[:, 1], fwd[:, 0])
    d0 = points[1] - points[0]
    dn = points[-1] - points[-2]
    chord0 = math.atan2(d0[1], d0[0])
    chordn = math.atan2(dn[1], dn[0])
    # A chord's heading matches the tangent at the chord midpoint, so the
    # one-sided endpoint headings carry a kappa * chord / 2 bias; remove it
    # using a local curvature estimate from the unbiased interior headings.
    if n >= 4:
        k_start = wrap_angle(psi[2] - psi[1]) / (arc[2] - arc[1])
        k_end = wrap_angle(psi[-2] - psi[-3]) / (arc[-2] - arc[-3])
    else:
        k_start = k_end = wrap_angle(chordn - chord0) / ((arc[2] - arc[0]) / 2.0)
    psi[0] = chord0 - k_start * (arc[1] - arc[0]) / 2.0
    psi[-1] = chordn + k_end * (arc[-1] - arc[-2]) / 2.0
    psi = np.unwrap(psi)
    kappa = np.empty(n)
    kappa[1:-1] = (psi[2:] - psi[:-2]) / (arc[2:] - arc[:-2])
    kappa[0] = kappa[1]
    kappa[-1] = kappa[-2]
    return psi, kappa


def make_centerline(
    points: np.ndarray,
    lane_count: int = 1,
    lane_width: float = 3.75,
) -> Centerline:
    """Build a Centerline from (N, 2) xy points, computing arc length and curvature."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError(f"expected (N, 2) points, got shape {pts.shape}")
    if len(pts) < 2:
        raise GeometryError("a centerline needs at least 2 points")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("non-finite coordinates in centerline points")
    if lane_count < 1:
        raise GeometryError("lane_count must be >= 1")
    if lane_width <= 0:
        raise GeometryError("lane_width must be > 0")

    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    if np.any(seg <= 0.0):
        i = int(np.argmin(seg))
        raise GeometryError(f"duplicate consecutive points at index {i} (zero spacing)")
    arc = np.concatenate(([0.0], np.cumsum(seg)))
    psi, kappa = _headings_and_curvature(pts, arc)
    if np.max(np.abs(kappa)) > MAX_ROAD_CURVATURE:
        raise GeometryError(
            f"curvature {np.max(np.abs(kappa)):.3f} 1/m exceeds the road-like bound "
            f"{MAX_ROAD_CURVATURE} 1/m"
        )
    for arr in (pts, arc, psi, kappa):
        arr.setflags(write=False)
    return Centerline(pts, arc, psi, kappa, lane_count=int(lane_count), lane_width=float(lane_width))


def project_latlon(points, origin: GeoPoint) -> np.ndarray:
    """Local equirectangular projection of GeoPoints to xy meters around origin."""
    lat = np.array([p.lat for p in points], dtype=np.float64)
    lon = np.array([p.lon for p in points], dtype=np.float64)
    lat0 = math.radians(origin.lat)
    x = EARTH_RADIUS_M * np.radians(lon - origin.lon) * math.cos(lat0)
    y = EARTH_RADIUS_M * np.radians(lat - origin.lat)
    return np.column_stack([x, y])


def latlon_from_xy(xy: np.ndarray, origin: GeoPoint) -> list[GeoPoint]:
    """Inverse of project_latlon; useful for generating import fixtures."""
    xy = np.asarray(xy, dtype=np.float64)
    lat0 = math.radians(origin.lat)
    lat = origin.lat + np.degrees(xy[:, 1] / EARTH_RADIUS_M)
    lon = origin.lon + np.degrees(xy[:, 0] / (EARTH_RADIUS_M * math.cos(lat0)))
    return [GeoPoint(float(la), float(lo)) for la, lo in zip(lat, lon)]


def import_latlon(
    points,
    origin: GeoPoint,
    lane_count: int = 1,
    lane_width: float = 3.75,
) -> Centerline:
    """Project lat/lon waypoints to a local xy Centerline."""
    if len(points) < 3:
        raise GeometryError(f"need at least 3 points, got {len(points)}")
    xy = project_latlon(points, origin)
    seg = np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))
    if np.any(seg <= 0.0):
        i = int(np.argmin(seg))
        raise GeometryError(f"duplicate consecutive points at index {i} (zero spacing)")
    if np.any(seg >= 1000.0):
        i = int(np.argmax(seg))
        raise GeometryError(f"consecutive points {seg[i]:.0f} m apart at index {i} (max 1 km)")
    return make_centerline(xy, lane_count=lane_count, lane_width=lane_width)


def resample_centerline(c: Centerline, ds: float) -> Centerline:
    """Resample to uniform arc-length spacing via linear interpolation.

    The actual spacing is total_length / round(total_length / ds) so that both
    endpoints are kept and the total length is preserved.
    """
    if ds <= 0:
        raise GeometryError("ds must be > 0")
    length = c.total_length
    if ds > length:
        raise GeometryError(f"ds={ds} exceeds the total length {length:.3f} m")
    n_seg = max(1, int(round(length / ds)))
    s_new = np.linspace(0.0, length, n_seg + 1)
    # Already uniform at this spacing (to within a sliver of ds): resampling
    # would only shuffle sub-micrometer noise, so keep the points; this makes
    # repeated resampling exactly idempotent.
    if len(c.points) == n_seg + 1 and np.abs(c.arc_length - s_new).max() < ds * 1e-4:
        return c
    x = np.interp(s_new, c.arc_length, c.points[:, 0])
    y = np.interp(s_new, c.arc_length, c.points[:, 1])
    return make_centerline(
        np.column_stack([x, y]), lane_count=c.lane_count, lane_width=c.lane_width
    )


def _check_s(c: Centerline, s: float) -> float:
    length = c.total_length
    if s < -1e-9 or s > length + 1e-9:
        raise GeometryError(f"s={s} outside [0, {length:.3f}]")
    return min(max(s, 0.0), length)


def curvature_at(c: Centerline, s: float) -> float:
    """Signed curvature at arc length s (linear interpolation of per-point values)."""
    s = _check_s(c, s)
    return float(np.interp(s, c.arc_length, c.curvature))


def heading_at(c: Centerline, s: float) -> float:
    """Road tangent heading at arc length s (radians, unwrapped)."""
    s = _check_s(c, s)
    return float(np.interp(s, c.arc_length, c.heading))


def point_at(c: Centerline, s) -> np.ndarray:
    """Centerline point(s) at arc length(s) s; accepts scalars or arrays."""
    s = np.minimum(np.maximum(s, 0.0), c.total_length)
    x = np.interp(s, c.arc_length, c.points[:, 0])
    y = np.interp(s, c.arc_length, c.points[:, 1])
    return np.stack([x, y], axis=-1)


def lane_center_offset(c: Centerline, lane_index: int) -> float:
    """Signed lateral offset of a lane center from the centerline (positive = left)."""
    if not 0 <= lane_index < c.lane_count:
        raise GeometryError(f"lane_index {lane_index} outside [0, {c.lane_count})")
    return (lane_index - (c.lane_count - 1) / 2.0) * c.lane_width


def _project_to_polyline(c: Centerline, p: np.ndarray) -> tuple[float, float]:
    """Project p onto the polyline; returns (s, squared distance)."""
    pts = c.points
    d2 = np.square(pts[:, 0] - p[0]) + np.square(pts[:, 1] - p[1])
    i = int(np.argmin(d2))
    best_s = float(c.arc_length[i])
    best_d2 = float(d2[i])
    for a, b in ((i - 1, i), (i, i + 1)):
        if a < 0 or b >= len(pts):
            continue
        ab = pts[b] - pts[a]
        seg_len2 = float(ab @ ab)
        t = float(np.clip((p - pts[a]) @ ab / seg_len2, 0.0, 1.0))
        q = pts[a] + t * ab
        dq2 = float((p - q) @ (p - q))
        if dq2 < best_d2:
            best_d2 = dq2
            best_s = float(c.arc_length[a] + t * math.sqrt(seg_len2))
    return best_s, best_d2


def localize(c: Centerline, x: float, y: float, psi: float, lane_index: int) -> LanePose:
    """Locate a vehicle pose relative to the center of lane `lane_index`.

    Raises VehicleLostError when the pose is farther than 2 * lane_width from
    every lane center.
    """
    if not 0 <= lane_index < c.lane_count:
        raise GeometryError(f"lane_index {lane_index} outside [0, {c.lane_count})")
    p = np.array([x, y], dtype=np.float64)
    s, _ = _project_to_polyline(c, p)
    # Newton refinement against the interpolated tangent field: the chord
    # projection is biased by ~y_off * kappa * ds / 2 on curved roads.
    length = c.total_length
    for _ in range(3):
        theta = heading_at(c, s)
        q = point_at(c, s)
        along = float((p - q) @ np.array([math.cos(theta), math.sin(theta)]))
        s = min(max(s + along, 0.0), length)
        if abs(along) < 1e-12:
            break
    theta = heading_at(c, s)
    q = point_at(c, s)
    normal = np.array([-math.sin(theta), math.cos(theta)])
    lateral = float((p - q) @ normal)

    offsets = [lane_center_offset(c, j) for j in range(c.lane_count)]
    if min(abs(lateral - o) for o in offsets) > 2.0 * c.lane_width:
        raise VehicleLostError(
            f"pose ({x:.1f}, {y:.1f}) farther than {2 * c.lane_width:.2f} m from every lane center"
        )
    y_off = lateral - offsets[lane_index]
    return LanePose(s=s, y_off=y_off, psi_err=wrap_angle(psi - theta))
