"""Trajectory error metrics.

Estimates and ground truth share one world frame by construction (both
start at the origin with the same heading), so errors are plain
differences — no alignment step.  Drift is the final position error as a
percentage of the true path length.  Reports serialize to JSON with
``repr`` floats, so write -> read returns an identical report.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .logio import TrajectoryTable
from .spatial import quat_normalize


def path_length(positions: np.ndarray) -> float:
    """Sum of straight-line segment lengths along a (k, 3) position track."""
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[0] < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pos, axis=0), axis=1).sum())


def interp_positions(t_query: np.ndarray, t: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Linear per-axis interpolation of (k, 3) positions onto query times."""
    return np.stack([np.interp(t_query, t, r[:, a]) for a in range(3)], axis=1)


def slerp(t_query: np.ndarray, t: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Spherical interpolation of (k, 4) unit quaternions onto query times."""
    t_query = np.atleast_1d(np.asarray(t_query, dtype=float))
    idx = np.clip(np.searchsorted(t, t_query, side="right") - 1, 0, len(t) - 2)
    q0 = q[idx]
    q1 = q[idx + 1].copy()
    w = (t_query - t[idx]) / (t[idx + 1] - t[idx])
    w = np.clip(w, 0.0, 1.0)[:, None]
    dot = np.sum(q0 * q1, axis=1, keepdims=True)
    q1[dot[:, 0] < 0.0] *= -1.0
    dot = np.abs(np.clip(dot, -1.0, 1.0))
    theta = np.arccos(dot)
    small = theta[:, 0] < 1e-8
    sin_theta = np.where(small[:, None], 1.0, np.sin(theta))
    c0 = np.where(small[:, None], 1.0 - w, np.sin((1.0 - w) * theta) / sin_theta)
    c1 = np.where(small[:, None], w, np.sin(w * theta) / sin_theta)
    return quat_normalize(c0 * q0 + c1 * q1)


@dataclass(frozen=True)
class DriftReport:
    """Summary of one estimate-vs-truth comparison.

    All fields are plain floats/ints, so two reports compare equal exactly
    after a JSON round trip.
    """

    duration: float
    n_samples: int
    path_length: float
    final_error_x: float
    final_error_y: float
    final_error_z: float
    final_error_norm: float
    drift_percent: float
    max_error_norm: float
    rms_error: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DriftReport":
        fields = set(cls.__dataclass_fields__)
        missing = fields - set(data)
        extra = set(data) - fields
        if missing or extra:
            raise SchemaError(
                f"drift report: missing keys {sorted(missing)}, unexpected {sorted(extra)}"
            )
        return cls(**{k: (int(v) if k == "n_samples" else float(v)) for k, v in data.items()})


def drift_report(estimate: TrajectoryTable, truth: TrajectoryTable) -> DriftReport:
    """Compare an estimated trajectory against ground truth.

    Truth positions are interpolated onto the estimate's timestamps; the
    drift percentage is the final error norm over the true path length.
    """
    truth_r = interp_positions(estimate.t, truth.t, truth.r)
    err = estimate.r - truth_r
    norms = np.linalg.norm(err, axis=1)
    length = path_length(truth.r)
    final = err[-1]
    final_norm = float(norms[-1])
    drift = float("inf") if length == 0.0 else 100.0 * final_norm / length
    return DriftReport(
        duration=float(estimate.t[-1] - estimate.t[0]),
        n_samples=int(estimate.t.shape[0]),
        path_length=length,
        final_error_x=float(final[0]),
        final_error_y=float(final[1]),
        final_error_z=float(final[2]),
        final_error_norm=final_norm,
        drift_percent=drift,
        max_error_norm=float(norms.max()),
        rms_error=float(np.sqrt(np.mean(norms**2))),
    )


def write_report(path: str | Path, report: DriftReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


def read_report(path: str | Path) -> DriftReport:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    return DriftReport.from_dict(data)


def comparison_table(reports: dict[str, DriftReport]) -> str:
    """Fixed-width text table of several drift reports, keyed by name."""
    headers = ["name", "path m", "final err m", "drift %", "max err m", "rms m"]
    rows = [
        [
            name,
            f"{r.path_length:.3f}",
            f"{r.final_error_norm:.4f}",
            f"{r.drift_percent:.3f}",
            f"{r.max_error_norm:.4f}",
            f"{r.rms_error:.4f}",
        ]
        for name, r in reports.items()
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    def fmt(row):
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines += [fmt(row) for row in rows]
    return "\n".join(lines)
