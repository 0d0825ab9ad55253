from .centerline import (
    Centerline,
    GeoPoint,
    LanePose,
    curvature_at,
    heading_at,
    import_latlon,
    lane_center_offset,
    latlon_from_xy,
    localize,
    make_centerline,
    point_at,
    resample_centerline,
    wrap_angle,
)
from .roadfile import load_road, save_road
from .roads import make_circle, make_clothoid, make_straight, make_wavy, road_from_curvature

__all__ = [
    "Centerline",
    "GeoPoint",
    "LanePose",
    "curvature_at",
    "heading_at",
    "import_latlon",
    "lane_center_offset",
    "latlon_from_xy",
    "load_road",
    "localize",
    "make_centerline",
    "make_circle",
    "make_clothoid",
    "make_straight",
    "make_wavy",
    "point_at",
    "resample_centerline",
    "road_from_curvature",
    "save_road",
    "wrap_angle",
]
