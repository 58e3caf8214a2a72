"""Contact-centric leg-odometry filter.

State vector (world frame unless noted), for ``n`` legs:

    [ r(3) | v(3) | q(4, xyzw) | omega(3, body) | bias_gyro(3) |
      bias_accel(3) | foot_1(3) ... foot_n(3) | contact_1 ... contact_n ]

Measurement vector:

    [ gravity(3) | v(3) | omega(3, body) | foot_offset_1(3) ... _n(3) |
      contact_1 ... contact_n ]

where ``gravity = R(q)^T g + bias_accel`` and ``foot_offset_i =
R(q)^T (r - p_i)`` (the CoM-frame vector from foot i to the CoM).  The
prediction integrates position from velocity and attitude from the
bias-corrected angular-rate state; stance feet are held still and swing
feet advance by their leg-derived world velocities.

The observed vector is assembled from one sensor frame: the negated
(averaged) accelerometer reading serves as the gravity-direction
observation, joint sensors give per-leg foot offsets and velocities, a
least-squares fit over stance feet gives the body twist, and joint torques
give contact probabilities.  Per-component gates switch off the gravity
block unless every leg is firmly loaded, and the twist block when support
is insufficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from . import srukf
from .errors import (
    ConfigurationError,
    InsufficientSupportError,
    KinematicSingularityError,
    OrderingError,
)
from .kinematics import (
    JointReading,
    RobotModel,
    body_jacobian,
    foot_force,
    foot_velocity,
    forward_kinematics,
)
from .spatial import (
    quat_conjugate,
    quat_from_axis_angle,
    quat_identity,
    quat_normalize,
    quat_product,
    rotate,
)


class StateLayout:
    """Index map of the state vector for a given leg count."""

    def __init__(self, n_legs: int):
        if n_legs < 1:
            raise ConfigurationError("state layout needs at least one leg")
        self.n_legs = n_legs
        self.r = slice(0, 3)
        self.v = slice(3, 6)
        self.q = slice(6, 10)
        self.omega = slice(10, 13)
        self.bias_gyro = slice(13, 16)
        self.bias_accel = slice(16, 19)
        self._foot0 = 19
        self.feet = slice(19, 19 + 3 * n_legs)
        self.contact = slice(19 + 3 * n_legs, 19 + 4 * n_legs)
        self.dim = 19 + 4 * n_legs

    def foot(self, i: int) -> slice:
        return slice(self._foot0 + 3 * i, self._foot0 + 3 * (i + 1))


class MeasurementLayout:
    """Index map of the measurement vector for a given leg count."""

    def __init__(self, n_legs: int):
        self.n_legs = n_legs
        self.gravity = slice(0, 3)
        self.velocity = slice(3, 6)
        self.omega = slice(6, 9)
        self._fk0 = 9
        self.foot_offsets = slice(9, 9 + 3 * n_legs)
        self.contact = slice(9 + 3 * n_legs, 9 + 4 * n_legs)
        self.dim = 9 + 4 * n_legs

    def foot_offset(self, i: int) -> slice:
        return slice(self._fk0 + 3 * i, self._fk0 + 3 * (i + 1))


@dataclass
class RobotState:
    """Decoded state vector."""

    r_w: np.ndarray
    v_w: np.ndarray
    q_wc: np.ndarray
    omega: np.ndarray
    bias_gyro: np.ndarray
    bias_accel: np.ndarray
    foot_pos: np.ndarray  # (n_legs, 3)
    contact: np.ndarray  # (n_legs,)

    @property
    def n_legs(self) -> int:
        return self.foot_pos.shape[0]

    def to_vector(self) -> np.ndarray:
        lay = StateLayout(self.n_legs)
        x = np.empty(lay.dim)
        x[lay.r] = self.r_w
        x[lay.v] = self.v_w
        x[lay.q] = self.q_wc
        x[lay.omega] = self.omega
        x[lay.bias_gyro] = self.bias_gyro
        x[lay.bias_accel] = self.bias_accel
        x[lay.feet] = self.foot_pos.reshape(-1)
        x[lay.contact] = self.contact
        return x

    @classmethod
    def from_vector(cls, x: np.ndarray, n_legs: int) -> "RobotState":
        lay = StateLayout(n_legs)
        x = np.asarray(x, dtype=float)
        if x.shape != (lay.dim,):
            raise ValueError(f"state vector must have shape ({lay.dim},), got {x.shape}")
        return cls(
            r_w=x[lay.r].copy(),
            v_w=x[lay.v].copy(),
            q_wc=x[lay.q].copy(),
            omega=x[lay.omega].copy(),
            bias_gyro=x[lay.bias_gyro].copy(),
            bias_accel=x[lay.bias_accel].copy(),
            foot_pos=x[lay.feet].reshape(n_legs, 3).copy(),
            contact=x[lay.contact].copy(),
        )

    @classmethod
    def zero(cls, n_legs: int) -> "RobotState":
        return cls(
            r_w=np.zeros(3),
            v_w=np.zeros(3),
            q_wc=quat_identity(),
            omega=np.zeros(3),
            bias_gyro=np.zeros(3),
            bias_accel=np.zeros(3),
            foot_pos=np.zeros((n_legs, 3)),
            contact=np.zeros(n_legs),
        )


@dataclass
class SensorFrame:
    """One synchronized reading of every proprioceptive sensor."""

    timestamp: float
    joint_angles: np.ndarray  # (n_legs, dof)
    joint_velocities: np.ndarray  # (n_legs, dof)
    joint_torques: np.ndarray  # (n_legs, dof)
    gyro: np.ndarray  # (3,) body frame rad/s
    accel: np.ndarray  # (3,) body frame m/s^2 specific force

    def __post_init__(self):
        self.joint_angles = np.asarray(self.joint_angles, dtype=float)
        self.joint_velocities = np.asarray(self.joint_velocities, dtype=float)
        self.joint_torques = np.asarray(self.joint_torques, dtype=float)
        self.gyro = np.asarray(self.gyro, dtype=float)
        self.accel = np.asarray(self.accel, dtype=float)
        shape = self.joint_angles.shape
        if self.joint_velocities.shape != shape or self.joint_torques.shape != shape:
            raise ValueError("joint angle/velocity/torque arrays must share one shape")
        if self.gyro.shape != (3,) or self.accel.shape != (3,):
            raise ValueError("gyro and accel must be 3-vectors")

    @property
    def n_legs(self) -> int:
        return self.joint_angles.shape[0]

    def joint_readings(self, leg: int) -> list[JointReading]:
        return [
            JointReading(angle=a, velocity=v, torque=t)
            for a, v, t in zip(
                self.joint_angles[leg], self.joint_velocities[leg], self.joint_torques[leg]
            )
        ]


@dataclass(frozen=True)
class ContactCalibration:
    """Force envelope mapping stance-force norms to contact probability."""

    f_max: float
    f_min: float

    def __post_init__(self):
        if not (self.f_max > self.f_min >= 0.0):
            raise ConfigurationError(
                f"contact calibration needs f_max > f_min >= 0, got ({self.f_max}, {self.f_min})"
            )


@dataclass
class ProcessNoiseConfig:
    """Per-block process-noise factor diagonal (per step)."""

    position: float = 1e-5
    velocity: float = 2e-3
    orientation: float = 1e-4
    ang_velocity: float = 2e-3
    gyro_bias: float = 1e-6
    accel_bias: float = 1e-5
    foot: float = 5e-3
    contact: float = 5e-2


@dataclass
class MeasurementNoiseConfig:
    """Per-block measurement-noise factor diagonal."""

    gravity: float = 0.12
    velocity: float = 2e-2
    ang_velocity: float = 4e-3
    foot_offset: float = 3e-4
    contact: float = 0.08


@dataclass
class InitialSigmaConfig:
    """Initial belief factor diagonal, per block."""

    position: float = 1e-4
    velocity: float = 1e-2
    orientation: float = 0.02
    ang_velocity: float = 1e-2
    gyro_bias: float = 1e-2
    accel_bias: float = 5e-2
    foot: float = 5e-3
    contact: float = 0.3


@dataclass
class FilterConfig:
    """All tunables of the filter, loadable from a YAML file."""

    alpha: float = 0.1
    beta: float = 2.0
    kappa: float = 0.0
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))
    swing_threshold: float = 0.3
    all_contact_threshold: float = 0.8
    stance_q_scale: float = 1e-2
    swing_q_scale: float = 10.0
    # When true, stance/swing scales are interpreted as covariance-space
    # factors and their square roots are applied to the factor diagonal.
    q_scale_on_covariance: bool = False
    # When true, contact probability uses (|F| - f_min) / (f_max - f_min)
    # instead of |F| / (f_max - f_min).
    contact_affine: bool = False
    process_noise: ProcessNoiseConfig = field(default_factory=ProcessNoiseConfig)
    meas_noise: MeasurementNoiseConfig = field(default_factory=MeasurementNoiseConfig)
    initial_sigma: InitialSigmaConfig = field(default_factory=InitialSigmaConfig)
    contact_calibration: ContactCalibration = field(
        default_factory=lambda: ContactCalibration(f_max=45.0, f_min=5.0)
    )

    def __post_init__(self):
        self.gravity = np.asarray(self.gravity, dtype=float)
        if self.gravity.shape != (3,):
            raise ConfigurationError("gravity must be a 3-vector")
        if not (0.0 <= self.swing_threshold < self.all_contact_threshold <= 1.0):
            raise ConfigurationError(
                "need 0 <= swing_threshold < all_contact_threshold <= 1"
            )

    def process_noise_diag(self, layout: StateLayout) -> np.ndarray:
        p = self.process_noise
        d = np.empty(layout.dim)
        d[layout.r] = p.position
        d[layout.v] = p.velocity
        d[layout.q] = p.orientation
        d[layout.omega] = p.ang_velocity
        d[layout.bias_gyro] = p.gyro_bias
        d[layout.bias_accel] = p.accel_bias
        d[layout.feet] = p.foot
        d[layout.contact] = p.contact
        return d

    def meas_noise_sqrt(self, mlayout: MeasurementLayout) -> np.ndarray:
        m = self.meas_noise
        d = np.empty(mlayout.dim)
        d[mlayout.gravity] = m.gravity
        d[mlayout.velocity] = m.velocity
        d[mlayout.omega] = m.ang_velocity
        d[mlayout.foot_offsets] = m.foot_offset
        d[mlayout.contact] = m.contact
        return np.diag(d)

    def initial_chol(self, layout: StateLayout) -> np.ndarray:
        s = self.initial_sigma
        d = np.empty(layout.dim)
        d[layout.r] = s.position
        d[layout.v] = s.velocity
        d[layout.q] = s.orientation
        d[layout.omega] = s.ang_velocity
        d[layout.bias_gyro] = s.gyro_bias
        d[layout.bias_accel] = s.accel_bias
        d[layout.feet] = s.foot
        d[layout.contact] = s.contact
        return np.diag(d)


def _dataclass_from_dict(cls, data: dict, context: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(f"unknown {context} keys: {sorted(unknown)}")
    return cls(**data)


def filter_config_from_dict(data: dict) -> FilterConfig:
    data = dict(data or {})
    nested = {
        "process_noise": ProcessNoiseConfig,
        "meas_noise": MeasurementNoiseConfig,
        "initial_sigma": InitialSigmaConfig,
        "contact_calibration": ContactCalibration,
    }
    kwargs = {}
    for key, cls in nested.items():
        if key in data:
            kwargs[key] = _dataclass_from_dict(cls, data.pop(key), key)
    allowed = {f.name for f in fields(FilterConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(f"unknown filter config keys: {sorted(unknown)}")
    kwargs.update(data)
    return FilterConfig(**kwargs)


def load_filter_config(path: str | Path) -> FilterConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read filter config {path!r}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"filter config {path!r} is not valid YAML: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError("filter config file must contain a mapping")
    return filter_config_from_dict(data)


# ---------------------------------------------------------------------------
# Models


def process_model_batch(
    X: np.ndarray,
    foot_vel_w: np.ndarray,
    dt: float,
    layout: StateLayout,
    swing_threshold: float,
) -> np.ndarray:
    """Vectorized prediction over stacked state rows.

    Quaternion rows are advanced by the raw Euler increment without
    renormalization; the filter renormalizes posterior means only, so the
    sigma spread keeps full rank in all four quaternion components.
    """
    X = np.asarray(X, dtype=float)
    out = X.copy()
    out[:, layout.r] += X[:, layout.v] * dt
    omega_c = X[:, layout.omega] - X[:, layout.bias_gyro]
    stepq = np.zeros(X.shape[:1] + (4,))
    stepq[:, :3] = omega_c * dt
    out[:, layout.q] = X[:, layout.q] + 0.5 * quat_product(X[:, layout.q], stepq)
    swing = X[:, layout.contact] < swing_threshold  # (k, n_legs)
    feet = out[:, layout.feet].reshape(X.shape[0], layout.n_legs, 3)
    feet += swing[:, :, None] * foot_vel_w[None, :, :] * dt
    out[:, layout.feet] = feet.reshape(X.shape[0], -1)
    return out


def process_model(
    state: RobotState,
    foot_vel_w: np.ndarray,
    dt: float,
    swing_threshold: float = 0.3,
) -> RobotState:
    """One prediction step for a single state.

    ``foot_vel_w`` holds per-leg world-frame foot velocities (already
    rotated by the caller); feet whose contact entry is below
    ``swing_threshold`` advance by them, all other feet stay put.
    """
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    foot_vel_w = np.asarray(foot_vel_w, dtype=float)
    if foot_vel_w.shape != (state.n_legs, 3):
        raise ValueError(f"foot_vel_w must be ({state.n_legs}, 3)")
    lay = StateLayout(state.n_legs)
    row = process_model_batch(
        state.to_vector()[None, :], foot_vel_w, dt, lay, swing_threshold
    )[0]
    return RobotState.from_vector(row, state.n_legs)


def measurement_model_batch(
    X: np.ndarray, layout: StateLayout, mlayout: MeasurementLayout, gravity: np.ndarray
) -> np.ndarray:
    """Vectorized measurement function over stacked state rows."""
    X = np.asarray(X, dtype=float)
    k = X.shape[0]
    qn = quat_normalize(X[:, layout.q])
    qc = quat_conjugate(qn)
    Z = np.empty((k, mlayout.dim))
    Z[:, mlayout.gravity] = rotate(qc, gravity[None, :]) + X[:, layout.bias_accel]
    Z[:, mlayout.velocity] = X[:, layout.v]
    Z[:, mlayout.omega] = X[:, layout.omega]
    feet = X[:, layout.feet].reshape(k, layout.n_legs, 3)
    d = X[:, layout.r][:, None, :] - feet  # r - p_i, world frame
    Z[:, mlayout.foot_offsets] = rotate(qc[:, None, :], d).reshape(k, -1)
    Z[:, mlayout.contact] = X[:, layout.contact]
    return Z


def measurement_model(state: RobotState, config: FilterConfig) -> np.ndarray:
    """Predicted measurement for a single state."""
    lay = StateLayout(state.n_legs)
    mlay = MeasurementLayout(state.n_legs)
    return measurement_model_batch(state.to_vector()[None, :], lay, mlay, config.gravity)[0]


def body_twist_ls(
    stance: Sequence[tuple[np.ndarray, np.ndarray]],
) -> tuple[np.ndarray, np.ndarray, float]:
    """Solve for the body twist from stance-foot offsets and velocities.

    Each entry is ``(r_i, pdot_i)``: the CoM-frame foot offset and the
    CoM-frame velocity of that foot relative to the body.  A foot that is
    stationary in the world moves at ``-(v + omega x r_i)`` relative to the
    body, so the stacked system is ``[I, -skew(r_i)] @ [v; omega] = -pdot_i``.
    Returns ``(v, omega, residual_norm)`` in the CoM frame.
    """
    if len(stance) < 2:
        raise InsufficientSupportError(
            f"body twist needs at least 2 stance feet, got {len(stance)}"
        )
    m = len(stance)
    A = np.zeros((3 * m, 6))
    b = np.empty(3 * m)
    for i, (r_i, pdot_i) in enumerate(stance):
        r_i = np.asarray(r_i, dtype=float)
        pdot_i = np.asarray(pdot_i, dtype=float)
        if r_i.shape != (3,) or pdot_i.shape != (3,):
            raise ValueError("stance entries must be pairs of 3-vectors")
        rows = slice(3 * i, 3 * i + 3)
        A[rows, :3] = np.eye(3)
        # -skew(r_i), written out to keep the stack assembly obvious
        A[rows, 3:] = -np.array(
            [
                [0.0, -r_i[2], r_i[1]],
                [r_i[2], 0.0, -r_i[0]],
                [-r_i[1], r_i[0], 0.0],
            ]
        )
        b[rows] = -pdot_i
    sol, residual, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < 6:
        raise InsufficientSupportError(
            f"stance geometry is degenerate (stack rank {rank} < 6)"
        )
    res_norm = float(np.sqrt(residual[0])) if residual.size else float(
        np.linalg.norm(A @ sol - b)
    )
    return sol[:3], sol[3:], res_norm


def contact_probability(
    force: np.ndarray, calib: ContactCalibration, affine: bool = False
) -> float:
    """Map a foot-force vector to a contact probability in [0, 1]."""
    norm = float(np.linalg.norm(np.asarray(force, dtype=float)))
    span = calib.f_max - calib.f_min
    raw = (norm - calib.f_min) / span if affine else norm / span
    return float(np.clip(raw, 0.0, 1.0))


def calibrate_contact(frames: Sequence[SensorFrame], model: RobotModel) -> ContactCalibration:
    """Estimate force thresholds from a recorded log.

    Computes per-leg foot-force norms over every frame, splits them into
    loaded and unloaded populations at 20 % of the 95th-percentile force,
    and returns ``f_max`` as the 95th percentile of the loaded population
    and ``f_min`` as its 5th percentile scaled to sit just above the
    unloaded noise floor.
    """
    norms: list[float] = []
    for frame in frames:
        _check_frame_shape(frame, model)
        for i, chain in enumerate(model.legs):
            try:
                force_c = foot_force(chain, frame.joint_angles[i], frame.joint_torques[i])
            except KinematicSingularityError:
                continue
            norms.append(float(np.linalg.norm(force_c)))
    values = np.asarray(norms, dtype=float)
    if values.size == 0:
        raise ConfigurationError("no usable torque samples for contact calibration")
    peak = float(np.percentile(values, 95))
    if peak <= 0.0:
        raise ConfigurationError("all foot forces are zero; cannot calibrate contact")
    loaded = values[values > 0.2 * peak]
    unloaded = values[values <= 0.2 * peak]
    f_max = float(np.percentile(loaded, 95))
    floor = float(np.percentile(unloaded, 95)) if unloaded.size else 0.05 * f_max
    f_min = max(floor, 0.02 * f_max)
    if f_min >= f_max:
        f_min = 0.05 * f_max
    return ContactCalibration(f_max=f_max, f_min=f_min)


def adapt_process_noise(
    config: FilterConfig, contact: np.ndarray, layout: StateLayout
) -> np.ndarray:
    """Process-noise factor with per-foot stance/swing scaling.

    Feet loaded at or above ``all_contact_threshold`` get their factor
    entries shrunk by ``stance_q_scale``; feet below ``swing_threshold``
    get them inflated by ``swing_q_scale``; everything else keeps the base
    diagonal.
    """
    contact = np.asarray(contact, dtype=float)
    if contact.shape != (layout.n_legs,):
        raise ValueError(f"contact must have shape ({layout.n_legs},)")
    d = config.process_noise_diag(layout)
    stance_scale = config.stance_q_scale
    swing_scale = config.swing_q_scale
    if config.q_scale_on_covariance:
        stance_scale = np.sqrt(stance_scale)
        swing_scale = np.sqrt(swing_scale)
    for i in range(layout.n_legs):
        if contact[i] >= config.all_contact_threshold:
            d[layout.foot(i)] *= stance_scale
        elif contact[i] < config.swing_threshold:
            d[layout.foot(i)] *= swing_scale
    return np.diag(d)


def _check_frame_shape(frame: SensorFrame, model: RobotModel) -> None:
    if frame.joint_angles.shape != (model.n_legs, model.dof):
        raise ValueError(
            f"frame joint arrays have shape {frame.joint_angles.shape}, "
            f"model expects ({model.n_legs}, {model.dof})"
        )


def build_measurement(
    frame: SensorFrame,
    prev_frame: SensorFrame | None,
    state: RobotState,
    model: RobotModel,
    calib: ContactCalibration,
    config: FilterConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the observed vector and gate mask from one sensor frame.

    Blocks:

    * gravity: negated mean of the current and previous accelerometer
      readings.  A static accelerometer reads the negative body-frame
      gravity (specific force), so the negation makes the observation
      comparable with the model's ``R(q)^T g + bias`` block; the estimated
      accelerometer bias consequently tracks the negated sensor bias.
      Gated on only when every leg is loaded at or above
      ``all_contact_threshold`` (impact transients cluster at touchdowns,
      which only happen while some leg is unloaded).
    * velocity / omega: least-squares body twist over firmly loaded legs,
      velocity rotated into the world frame with the current attitude
      estimate, omega averaged 50/50 with the bias-corrected gyro.  Gated
      off entirely when support is insufficient.
    * foot offsets: ``-t_cf`` per leg from forward kinematics (the
      CoM-frame foot-to-CoM vector, matching the model block's sign).
    * contact: per-leg probability from joint torques; a leg at a singular
      configuration has its contact component gated off.
    """
    _check_frame_shape(frame, model)
    mlay = MeasurementLayout(model.n_legs)
    observed = np.zeros(mlay.dim)
    gate = np.ones(mlay.dim, dtype=bool)

    accel = frame.accel if prev_frame is None else 0.5 * (frame.accel + prev_frame.accel)
    observed[mlay.gravity] = -accel

    qn = quat_normalize(state.q_wc)
    probs = np.zeros(model.n_legs)
    singular = np.zeros(model.n_legs, dtype=bool)
    stance: list[tuple[np.ndarray, np.ndarray]] = []
    for i, chain in enumerate(model.legs):
        fk = forward_kinematics(chain, frame.joint_angles[i])
        observed[mlay.foot_offset(i)] = -fk.translation
        try:
            force_c = foot_force(chain, frame.joint_angles[i], frame.joint_torques[i])
        except KinematicSingularityError:
            singular[i] = True
            gate[mlay.contact.start + i] = False
            continue
        probs[i] = contact_probability(force_c, calib, config.contact_affine)
        if probs[i] >= config.all_contact_threshold:
            pdot_c = fk.rotation @ (
                body_jacobian(chain, frame.joint_angles[i]) @ frame.joint_velocities[i]
            )
            stance.append((fk.translation, pdot_c))
    observed[mlay.contact] = probs

    try:
        v_c, omega_ls, _ = body_twist_ls(stance)
    except InsufficientSupportError:
        gate[mlay.velocity] = False
        gate[mlay.omega] = False
    else:
        observed[mlay.velocity] = rotate(qn, v_c)
        observed[mlay.omega] = 0.5 * omega_ls + 0.5 * (frame.gyro - state.bias_gyro)

    all_loaded = not np.any(singular) and bool(
        np.all(probs >= config.all_contact_threshold)
    )
    if not all_loaded:
        gate[mlay.gravity] = False
    return observed, gate


def _tilt_from_accel(accel: np.ndarray) -> np.ndarray:
    """Minimal rotation aligning the measured gravity with world -z.

    A static accelerometer reads the negated body-frame gravity, so the
    body-frame gravity direction is ``-accel``.  Returns the quaternion of
    the smallest rotation carrying it onto (0, 0, -1); identity when the
    reading is degenerate (near zero norm).
    """
    norm = np.linalg.norm(accel)
    if norm < 1e-6:
        return quat_identity()
    g_body = -accel / norm
    g_world = np.array([0.0, 0.0, -1.0])
    axis = np.cross(g_body, g_world)
    axis_norm = np.linalg.norm(axis)
    dot = float(np.clip(np.dot(g_body, g_world), -1.0, 1.0))
    if axis_norm < 1e-12:
        if dot > 0.0:
            return quat_identity()
        return quat_from_axis_angle(np.array([1.0, 0.0, 0.0]), np.pi)
    return quat_from_axis_angle(axis / axis_norm, np.arctan2(axis_norm, dot))


def initial_belief(
    frame: SensorFrame,
    model: RobotModel,
    calib: ContactCalibration,
    config: FilterConfig,
) -> srukf.SqrtBelief:
    """Belief anchored at the first frame.

    The world frame is defined by the initial body pose: position zero,
    zero yaw.  Roll/pitch are tilt-aligned to the first accelerometer
    sample (assumed near-static), so starts on a slope begin with the
    right attitude; on level ground the alignment is exactly identity.
    Feet come from forward kinematics rotated by that attitude, contact
    from the first torque reading.
    """
    _check_frame_shape(frame, model)
    state = RobotState.zero(model.n_legs)
    state.q_wc = _tilt_from_accel(frame.accel)
    for i, chain in enumerate(model.legs):
        fk = forward_kinematics(chain, frame.joint_angles[i])
        state.foot_pos[i] = rotate(state.q_wc, fk.translation)
        try:
            force_c = foot_force(chain, frame.joint_angles[i], frame.joint_torques[i])
        except KinematicSingularityError:
            state.contact[i] = 0.0
        else:
            state.contact[i] = contact_probability(force_c, calib, config.contact_affine)
    lay = StateLayout(model.n_legs)
    return srukf.SqrtBelief(mean=state.to_vector(), chol=config.initial_chol(lay))


@dataclass(frozen=True)
class StepResult:
    """Posterior belief plus the diagnostics of one filter step."""

    belief: srukf.SqrtBelief
    observed: np.ndarray
    innovation: np.ndarray  # gated: masked components are exactly 0.0
    gate: np.ndarray
    dt: float


def _posterior_cleanup(belief: srukf.SqrtBelief, layout: StateLayout) -> srukf.SqrtBelief:
    mean = belief.mean.copy()
    mean[layout.q] = quat_normalize(mean[layout.q])
    mean[layout.contact] = np.clip(mean[layout.contact], 0.0, 1.0)
    return srukf.SqrtBelief(mean=mean, chol=belief.chol)


def step_with_diagnostics(
    belief: srukf.SqrtBelief,
    frame: SensorFrame,
    prev_frame: SensorFrame | None,
    model: RobotModel,
    calib: ContactCalibration,
    config: FilterConfig,
) -> StepResult:
    """One predict/update cycle of the filter.

    ``prev_frame`` is the frame the belief was last updated with (None for
    the very first frame, in which case prediction is skipped).  Frame
    timestamps must be strictly increasing.
    """
    _check_frame_shape(frame, model)
    lay = StateLayout(model.n_legs)
    mlay = MeasurementLayout(model.n_legs)
    if belief.dim != lay.dim:
        raise ValueError(f"belief dim {belief.dim} does not match layout dim {lay.dim}")

    if prev_frame is None:
        dt = 0.0
        predicted = belief
    else:
        dt = frame.timestamp - prev_frame.timestamp
        if dt <= 0.0:
            raise OrderingError(
                f"frame timestamps must strictly increase "
                f"({prev_frame.timestamp!r} -> {frame.timestamp!r})"
            )
        prior = RobotState.from_vector(belief.mean, model.n_legs)
        qn = quat_normalize(prior.q_wc)
        omega = prior.omega - prior.bias_gyro
        foot_vel_w = np.empty((model.n_legs, 3))
        for i, chain in enumerate(model.legs):
            # world velocity of the foot: body translation plus rotation
            # sweep plus the leg's own articulation.  Swing arcs decelerate
            # hard, so the leg term averages both frames (trapezoid) rather
            # than sampling the interval end.
            vel_c = 0.5 * (
                foot_velocity(chain, prev_frame.joint_angles[i],
                              prev_frame.joint_velocities[i])
                + foot_velocity(chain, frame.joint_angles[i], frame.joint_velocities[i])
            )
            t_cf = forward_kinematics(chain, frame.joint_angles[i]).translation
            foot_vel_w[i] = prior.v_w + rotate(qn, np.cross(omega, t_cf) + vel_c)
        q_sqrt = adapt_process_noise(config, np.clip(prior.contact, 0.0, 1.0), lay)
        predicted = srukf.predict(
            belief,
            lambda X: process_model_batch(X, foot_vel_w, dt, lay, config.swing_threshold),
            q_sqrt,
            alpha=config.alpha,
            beta=config.beta,
            kappa=config.kappa,
        )

    pred_state = RobotState.from_vector(predicted.mean, model.n_legs)
    observed, gate = build_measurement(frame, prev_frame, pred_state, model, calib, config)
    posterior, innovation = srukf.update(
        predicted,
        lambda X: measurement_model_batch(X, lay, mlay, config.gravity),
        config.meas_noise_sqrt(mlay),
        observed,
        gate,
        alpha=config.alpha,
        beta=config.beta,
        kappa=config.kappa,
    )
    posterior = _posterior_cleanup(posterior, lay)
    return StepResult(
        belief=posterior, observed=observed, innovation=innovation, gate=gate, dt=dt
    )


def step(
    belief: srukf.SqrtBelief,
    frame: SensorFrame,
    prev_frame: SensorFrame | None,
    model: RobotModel,
    calib: ContactCalibration,
    config: FilterConfig,
) -> srukf.SqrtBelief:
    """One filter step; see ``step_with_diagnostics`` for the mechanics."""
    return step_with_diagnostics(belief, frame, prev_frame, model, calib, config).belief


def external_pose_update(
    belief: srukf.SqrtBelief,
    pose: tuple[np.ndarray, np.ndarray],
    velocity: np.ndarray | None,
    pose_noise_sqrt: np.ndarray,
    config: FilterConfig | None = None,
) -> srukf.SqrtBelief:
    """Fuse an external absolute pose (and optional velocity) estimate.

    ``pose`` is ``(position, quaternion)`` in the filter's world frame.
    The quaternion is observed directly in its four components after sign
    alignment with the current estimate.  ``pose_noise_sqrt`` is the
    measurement-noise factor: a full matrix or a diagonal vector over the
    stacked [position(3), quaternion(4), velocity(3)?] measurement.
    """
    if config is None:
        config = FilterConfig()
    n_legs = (belief.dim - 19) // 4
    lay = StateLayout(n_legs)
    if lay.dim != belief.dim:
        raise ValueError(f"belief dim {belief.dim} does not fit any leg count")

    position, orientation = pose
    position = np.asarray(position, dtype=float)
    orientation = quat_normalize(np.asarray(orientation, dtype=float))
    if position.shape != (3,) or orientation.shape != (4,):
        raise ValueError("pose must be a (3-vector, 4-quaternion) pair")
    if float(orientation @ belief.mean[lay.q]) < 0.0:
        orientation = -orientation

    sel = [lay.r, lay.q] + ([lay.v] if velocity is not None else [])
    idx = np.concatenate([np.arange(s.start, s.stop) for s in sel])
    observed = np.concatenate(
        [position, orientation] + ([np.asarray(velocity, dtype=float)] if velocity is not None else [])
    )
    m = idx.size
    noise = np.asarray(pose_noise_sqrt, dtype=float)
    if noise.ndim == 1:
        noise = np.diag(noise)
    if noise.shape != (m, m):
        raise ValueError(f"pose_noise_sqrt must cover {m} components, got {noise.shape}")

    posterior, _ = srukf.update(
        belief,
        lambda X: X[:, idx],
        noise,
        observed,
        gate=None,
        alpha=config.alpha,
        beta=config.beta,
        kappa=config.kappa,
    )
    return _posterior_cleanup(posterior, lay)
