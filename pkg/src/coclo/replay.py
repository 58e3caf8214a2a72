"""Run the filter over recorded sensor logs.

``replay_frames`` drives the estimator over in-memory frames and collects
the posterior means into a TrajectoryTable; ``replay`` is the file-level
wrapper (sensor log in, trajectory CSV out).  Optional external pose fixes
(e.g. a sporadic absolute positioning signal) are fused at their scheduled
times between sensor updates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import srukf
from .estimator import (
    FilterConfig,
    RobotState,
    SensorFrame,
    StateLayout,
    external_pose_update,
    initial_belief,
    load_filter_config,
    step_with_diagnostics,
)
from .kinematics import RobotModel, load_robot_model, reference_hexapod
from .logio import TrajectoryTable, read_sensor_log, write_trajectory


@dataclass(frozen=True)
class ExternalPoseFix:
    """One absolute pose observation to fuse during replay."""

    time: float
    position: np.ndarray  # (3,) world
    quaternion: np.ndarray  # (4,) xyzw
    velocity: np.ndarray | None = None


@dataclass
class ReplayResult:
    trajectory: TrajectoryTable
    states: list[RobotState]
    final_belief: srukf.SqrtBelief
    innovations: list[np.ndarray] = field(default_factory=list)
    gates: list[np.ndarray] = field(default_factory=list)


def replay_frames(
    frames: list[SensorFrame],
    model: RobotModel,
    config: FilterConfig,
    external: list[ExternalPoseFix] | None = None,
    external_noise_sqrt: np.ndarray | None = None,
    keep_diagnostics: bool = False,
) -> ReplayResult:
    """Filter a frame sequence and return the posterior-mean trajectory.

    External fixes are applied once each, after the first sensor frame
    whose timestamp reaches the fix time (their listed order must be
    chronological).  ``external_noise_sqrt`` is required when fixes are
    given; it is the noise factor handed to ``external_pose_update``.
    """
    if not frames:
        raise ValueError("no frames to replay")
    fixes = sorted(external, key=lambda f: f.time) if external else []
    if fixes and external_noise_sqrt is None:
        raise ValueError("external fixes need external_noise_sqrt")
    calib = config.contact_calibration
    layout = StateLayout(model.n_legs)
    belief = initial_belief(frames[0], model, calib, config)
    n = len(frames)
    k_fix = 0
    t = np.empty(n)
    r = np.empty((n, 3))
    q = np.empty((n, 4))
    v = np.empty((n, 3))
    foot_pos = np.empty((n, model.n_legs, 3))
    contact = np.empty((n, model.n_legs))
    states: list[RobotState] = []
    result = ReplayResult(
        trajectory=TrajectoryTable(t=t, r=r, q=q, v=v, foot_pos=foot_pos, contact=contact),
        states=states,
        final_belief=belief,
    )
    prev: SensorFrame | None = None
    for i, frame in enumerate(frames):
        if i > 0:
            out = step_with_diagnostics(belief, frame, prev, model, calib, config)
            belief = out.belief
            if keep_diagnostics:
                result.innovations.append(out.innovation)
                result.gates.append(out.gate)
        while k_fix < len(fixes) and frame.timestamp >= fixes[k_fix].time:
            fix = fixes[k_fix]
            belief = external_pose_update(
                belief,
                (fix.position, fix.quaternion),
                fix.velocity,
                external_noise_sqrt,
                config,
            )
            k_fix += 1
        state = RobotState.from_vector(belief.mean, model.n_legs)
        states.append(state)
        t[i] = frame.timestamp
        r[i] = state.r_w
        q[i] = state.q_wc
        v[i] = state.v_w
        foot_pos[i] = state.foot_pos
        contact[i] = np.clip(state.contact, 0.0, 1.0)
        prev = frame
    result.final_belief = belief
    return result


def replay(
    sensors_path: str | Path,
    out_path: str | Path | None = None,
    model_path: str | Path | None = None,
    config_path: str | Path | None = None,
) -> ReplayResult:
    """File-level replay: sensor log in, trajectory table out.

    Without a model/config path the packaged reference hexapod and default
    filter configuration are used.
    """
    frames = read_sensor_log(sensors_path)
    model = load_robot_model(model_path) if model_path else reference_hexapod()
    config = load_filter_config(config_path) if config_path else FilterConfig()
    result = replay_frames(frames, model, config)
    if out_path is not None:
        write_trajectory(out_path, result.trajectory)
    return result
