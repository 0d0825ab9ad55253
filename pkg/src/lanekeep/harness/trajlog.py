"""Per-tick record of a closed-loop run, with CSV serialization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

COLUMNS = ("t", "x", "y", "psi", "v", "kappa_cmd", "swa", "y_off", "d_l", "d_r", "a_lat", "fault")

TERMINATION_COMPLETED = "completed"
TERMINATION_LOST = "vehicle_lost"
TERMINATION_END_OF_ROAD = "end_of_road"


@dataclass(frozen=True)
class TrajectoryLog:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    v: np.ndarray
    kappa_cmd: np.ndarray
    swa: np.ndarray
    y_off: np.ndarray
    d_l: np.ndarray
    d_r: np.ndarray
    a_lat: np.ndarray
    fault: np.ndarray  # bool per tick
    dt: float
    termination_reason: str = TERMINATION_COMPLETED

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(COLUMNS)
            for i in range(len(self.t)):
                row = [
                    f"{float(getattr(self, col)[i]):.9g}" for col in COLUMNS[:-1]
                ]
                row.append("1" if self.fault[i] else "0")
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "TrajectoryLog":
        cols: dict[str, list[float]] = {c: [] for c in COLUMNS}
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or tuple(reader.fieldnames) != COLUMNS:
                raise ValueError(f"{path}: bad trajectory header {reader.fieldnames}")
            for row in reader:
                for c in COLUMNS:
                    cols[c].append(float(row[c]))
        t = np.array(cols["t"])
        dt = float(t[1] - t[0]) if len(t) >= 2 else math.nan
        return cls(
            t=t,
            x=np.array(cols["x"]),
            y=np.array(cols["y"]),
            psi=np.array(cols["psi"]),
            v=np.array(cols["v"]),
            kappa_cmd=np.array(cols["kappa_cmd"]),
            swa=np.array(cols["swa"]),
            y_off=np.array(cols["y_off"]),
            d_l=np.array(cols["d_l"]),
            d_r=np.array(cols["d_r"]),
            a_lat=np.array(cols["a_lat"]),
            fault=np.array(cols["fault"], dtype=bool),
            dt=dt,
        )


class LogBuilder:
    def __init__(self, dt: float):
        self.dt = dt
        self.rows: dict[str, list] = {c: [] for c in COLUMNS}

    def add(self, **values) -> None:
        for c in COLUMNS:
            self.rows[c].append(values[c])

    def build(self, termination_reason: str) -> TrajectoryLog:
        arrays = {c: np.asarray(self.rows[c], dtype=np.float64) for c in COLUMNS[:-1]}
        arrays["fault"] = np.asarray(self.rows["fault"], dtype=bool)
        return TrajectoryLog(dt=self.dt, termination_reason=termination_reason, **arrays)
