"""File formats: sensor logs (JSON lines) and trajectory tables (CSV).

Sensor logs hold one frame per line as a JSON object with keys
``t, angles, velocities, torques, gyro, accel``; matrices are nested lists
indexed ``[leg][joint]``.  Trajectory tables hold one row per timestamp
with the same column layout for ground truth and estimates:
``t, x, y, z, qx, qy, qz, qw, vx, vy, vz,
foot{i}_x, foot{i}_y, foot{i}_z ..., contact{i} ...``.

All floats are written via ``repr`` (shortest exact round-trip), so
write -> read -> write is byte-identical.  Readers are strict: malformed
content raises SchemaError and non-increasing timestamps raise
OrderingError, both naming the offending line.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import OrderingError, SchemaError
from .estimator import SensorFrame

_FRAME_KEYS = ("t", "angles", "velocities", "torques", "gyro", "accel")


def write_sensor_log(path: str | Path, frames: list[SensorFrame]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for f in frames:
            record = {
                "t": f.timestamp,
                "angles": f.joint_angles.tolist(),
                "velocities": f.joint_velocities.tolist(),
                "torques": f.joint_torques.tolist(),
                "gyro": f.gyro.tolist(),
                "accel": f.accel.tolist(),
            }
            fh.write(json.dumps(record) + "\n")


def _frame_from_record(record: dict, where: str) -> SensorFrame:
    if not isinstance(record, dict):
        raise SchemaError(f"{where}: expected a JSON object, got {type(record).__name__}")
    missing = [k for k in _FRAME_KEYS if k not in record]
    extra = [k for k in record if k not in _FRAME_KEYS]
    if missing or extra:
        raise SchemaError(f"{where}: missing keys {missing}, unexpected keys {extra}")
    try:
        angles = np.asarray(record["angles"], dtype=float)
        velocities = np.asarray(record["velocities"], dtype=float)
        torques = np.asarray(record["torques"], dtype=float)
        gyro = np.asarray(record["gyro"], dtype=float)
        accel = np.asarray(record["accel"], dtype=float)
        frame = SensorFrame(
            timestamp=float(record["t"]),
            joint_angles=angles,
            joint_velocities=velocities,
            joint_torques=torques,
            gyro=gyro,
            accel=accel,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc
    return frame


def read_sensor_log(path: str | Path) -> list[SensorFrame]:
    frames: list[SensorFrame] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{where}: invalid JSON: {exc}") from exc
            frame = _frame_from_record(record, where)
            if frames:
                if frame.joint_angles.shape != frames[0].joint_angles.shape:
                    raise SchemaError(
                        f"{where}: joint array shape {frame.joint_angles.shape} does not "
                        f"match first frame {frames[0].joint_angles.shape}"
                    )
                if frame.timestamp <= frames[-1].timestamp:
                    raise OrderingError(
                        f"{where}: timestamp {frame.timestamp!r} does not increase past "
                        f"{frames[-1].timestamp!r}"
                    )
            frames.append(frame)
    if not frames:
        raise SchemaError(f"{path}: sensor log holds no frames")
    return frames


@dataclass
class TrajectoryTable:
    """Pose/velocity/foot trajectory on a shared schema for truth and estimates."""

    t: np.ndarray  # (k,)
    r: np.ndarray  # (k, 3)
    q: np.ndarray  # (k, 4) vector-first
    v: np.ndarray  # (k, 3)
    foot_pos: np.ndarray  # (k, n_legs, 3)
    contact: np.ndarray  # (k, n_legs) floats (truth flags become 0.0/1.0)

    @property
    def n_legs(self) -> int:
        return self.foot_pos.shape[1]

    @classmethod
    def from_truth(cls, truth) -> "TrajectoryTable":
        return cls(
            t=np.asarray(truth.t, dtype=float),
            r=np.asarray(truth.r, dtype=float),
            q=np.asarray(truth.q, dtype=float),
            v=np.asarray(truth.v, dtype=float),
            foot_pos=np.asarray(truth.foot_pos, dtype=float),
            contact=np.asarray(truth.contact, dtype=float),
        )


def _trajectory_header(n_legs: int) -> list[str]:
    cols = ["t", "x", "y", "z", "qx", "qy", "qz", "qw", "vx", "vy", "vz"]
    for i in range(n_legs):
        cols += [f"foot{i}_x", f"foot{i}_y", f"foot{i}_z"]
    cols += [f"contact{i}" for i in range(n_legs)]
    return cols


def write_trajectory(path: str | Path, table: TrajectoryTable) -> None:
    n = table.n_legs
    k = table.t.shape[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(_trajectory_header(n)) + "\n")
        for row in range(k):
            vals = [
                table.t[row],
                *table.r[row],
                *table.q[row],
                *table.v[row],
                *table.foot_pos[row].reshape(-1),
                *table.contact[row],
            ]
            fh.write(",".join(repr(float(v)) for v in vals) + "\n")


def read_trajectory(path: str | Path) -> TrajectoryTable:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty trajectory file") from None
        base = 11
        n_cols = len(header)
        n_legs = (n_cols - base) // 4
        if n_legs < 0 or header != _trajectory_header(n_legs):
            raise SchemaError(f"{path}:1: unrecognized trajectory header {header!r}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != n_cols:
                raise SchemaError(
                    f"{path}:{lineno}: expected {n_cols} columns, got {len(rec)}"
                )
            try:
                rows.append([float(v) for v in rec])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            if len(rows) > 1 and rows[-1][0] <= rows[-2][0]:
                raise OrderingError(
                    f"{path}:{lineno}: timestamp {rows[-1][0]!r} does not increase past "
                    f"{rows[-2][0]!r}"
                )
    if not rows:
        raise SchemaError(f"{path}: trajectory file holds no rows")
    data = np.asarray(rows, dtype=float)
    k = data.shape[0]
    return TrajectoryTable(
        t=data[:, 0],
        r=data[:, 1:4],
        q=data[:, 4:8],
        v=data[:, 8:11],
        foot_pos=data[:, 11:11 + 3 * n_legs].reshape(k, n_legs, 3),
        contact=data[:, 11 + 3 * n_legs:],
    )
