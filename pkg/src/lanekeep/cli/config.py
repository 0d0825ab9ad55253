"""Run-config file: INI sections with a fixed, typed key set.

Example:

    [vehicle]
    wheelbase_m = 2.9
    steering_ratio = 16.0

    [scenario]
    road = roads/country.json
    speed_mps = 19.44

Unknown sections or keys are rejected. Paths are resolved relative to the
config file and must exist at parse time. Command-line flags override config
values, which override built-in defaults.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from ..errors import ConfigError

_PATH = object()  # sentinel type: string checked for existence

SCHEMA: dict[str, dict[str, type | object]] = {
    "vehicle": {
        "wheelbase_m": float,
        "steering_ratio": float,
        "max_swa_rad": float,
        "width_m": float,
        "max_alpha_rad": float,
    },
    "camera": {
        "image_width": int,
        "image_height": int,
        "height_above_road_m": float,
        "pitch_rad": float,
        "horizontal_fov_rad": float,
        "mount_forward_m": float,
        "noise_sigma": float,
    },
    "expert": {
        "lookahead_m": float,
        "k_y": float,
        "k_psi": float,
        "noise_std": float,
        "seed": int,
    },
    "train": {
        "batches": int,
        "batch": int,
        "lr": float,
        "seed": int,
        "keep_prob": float,
    },
    "penalty": {"w_m": float, "beta": float},
    "comfort": {"g": float},
    "scenario": {
        "road": _PATH,
        "lane_index": int,
        "speed_mps": float,
        "duration_s": float,
        "tick_dt_s": float,
        "seed": int,
    },
}


def load_config(path) -> dict[str, dict]:
    """Parse and validate a run-config file into {section: {key: typed value}}."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from e

    out: dict[str, dict] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        keys = SCHEMA[section]
        out[section] = {}
        for key, raw in parser.items(section):
            if key not in keys:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            kind = keys[key]
            if kind is _PATH:
                resolved = (path.parent / raw).resolve()
                if not resolved.exists():
                    raise ConfigError(f"{path}: [{section}] {key} = {raw}: path does not exist")
                out[section][key] = resolved
            else:
                try:
                    out[section][key] = kind(raw)
                except ValueError as e:
                    raise ConfigError(
                        f"{path}: [{section}] {key} = {raw!r} is not a valid {kind.__name__}"
                    ) from e
    return out


def merged(flag_value, cfg: dict[str, dict], section: str, key: str, default):
    """Flag > config > default precedence for one setting."""
    if flag_value is not None:
        return flag_value
    return cfg.get(section, {}).get(key, default)
