"""Road file format: JSON, either xy meters or lat/lon waypoints.

Schema:
    {"format": "lanekeep-road-v1", "lane_count": int, "lane_width_m": float,
     "points": [{"x": ..., "y": ...} | {"lat": ..., "lon": ...}]}

All points must use the same coordinate kind; mixed files are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import GeometryError
from .centerline import Centerline, GeoPoint, import_latlon, make_centerline, resample_centerline

ROAD_FORMAT = "lanekeep-road-v1"


def save_road(c: Centerline, path) -> None:
    doc = {
        "format": ROAD_FORMAT,
        "lane_count": c.lane_count,
        "lane_width_m": c.lane_width,
        "points": [{"x": float(x), "y": float(y)} for x, y in c.points],
    }
    Path(path).write_text(json.dumps(doc))


def load_road(path, ds: float | None = None) -> Centerline:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise GeometryError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(doc, dict) or doc.get("format") != ROAD_FORMAT:
        raise GeometryError(f"{path}: missing or unsupported road format (want {ROAD_FORMAT!r})")
    points = doc.get("points")
    if not isinstance(points, list) or not points:
        raise GeometryError(f"{path}: empty or missing points")
    lane_count = int(doc.get("lane_count", 1))
    lane_width = float(doc.get("lane_width_m", 3.75))

    kinds = {frozenset(p.keys()) for p in points}
    if kinds == {frozenset(("x", "y"))}:
        xy = np.array([[p["x"], p["y"]] for p in points], dtype=np.float64)
        road = make_centerline(xy, lane_count=lane_count, lane_width=lane_width)
    elif kinds == {frozenset(("lat", "lon"))}:
        geo = [GeoPoint(float(p["lat"]), float(p["lon"])) for p in points]
        road = import_latlon(geo, origin=geo[0], lane_count=lane_count, lane_width=lane_width)
    else:
        raise GeometryError(
            f"{path}: points must all be {{x,y}} or all {{lat,lon}}; got mixed/unknown keys"
        )
    if ds is not None:
        road = resample_centerline(road, ds)
    return road
