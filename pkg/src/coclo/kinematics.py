"""Fixed-base serial-chain kinematics for the legs.

Each leg is described in the body (CoM) frame by a mount pose plus a list
of revolute joints.  Joint ``i`` rotates about its axis (a unit vector in
the frame left by the previous transform) and is followed by a rigid link
offset to the next joint; a final ``foot_offset`` reaches the foot center.
The chain for angles ``a`` is therefore

    T_cf = mount * Rot(axis_0, a_0) * Trans(offset_0) * ... * Trans(foot_offset)

``forward_kinematics`` returns that pose, ``body_jacobian`` the 3 x dof
positional Jacobian expressed in the *foot* frame, and ``foot_velocity`` /
``foot_force`` the CoM-frame velocity and contact-force maps built on it.
Rotation into the world frame is the caller's business.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigurationError, KinematicSingularityError
from .spatial import skew

# Condition number above which foot_force refuses to invert the Jacobian.
SINGULARITY_COND_LIMIT = 1e8


@dataclass
class JointReading:
    """One joint's sensor triple."""

    angle: float
    velocity: float
    torque: float


@dataclass(frozen=True)
class FootFrame:
    """Pose of the foot center in the CoM frame."""

    rotation: np.ndarray  # (3, 3), CoM <- foot
    translation: np.ndarray  # (3,), foot center in CoM coordinates


@dataclass(frozen=True)
class LegChain:
    """Geometry of one leg: mount pose, joint axes, link offsets."""

    name: str
    mount_rotation: np.ndarray  # (3, 3)
    mount_translation: np.ndarray  # (3,)
    joint_axes: np.ndarray  # (dof, 3), unit vectors
    link_offsets: np.ndarray  # (dof, 3), joint i -> joint i+1 (last: -> foot_offset origin)
    foot_offset: np.ndarray  # (3,), last joint frame -> foot center

    def __post_init__(self):
        axes = np.asarray(self.joint_axes, dtype=float)
        if axes.ndim != 2 or axes.shape[1] != 3 or axes.shape[0] < 1:
            raise ConfigurationError(f"leg {self.name!r}: joint_axes must be (dof>=1, 3)")
        norms = np.linalg.norm(axes, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ConfigurationError(f"leg {self.name!r}: joint axes must be unit vectors")
        if np.asarray(self.link_offsets).shape != axes.shape:
            raise ConfigurationError(f"leg {self.name!r}: link_offsets shape must match joint_axes")

    @property
    def dof(self) -> int:
        return self.joint_axes.shape[0]


@dataclass(frozen=True)
class RobotModel:
    """A set of legs sharing one body frame."""

    name: str
    legs: tuple[LegChain, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.legs) < 1:
            raise ConfigurationError("robot model needs at least one leg")
        dofs = {leg.dof for leg in self.legs}
        if len(dofs) != 1:
            raise ConfigurationError("all legs must share the same dof")

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @property
    def dof(self) -> int:
        return self.legs[0].dof


def _axis_angle_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues formula for a rotation about a unit axis."""
    c, s = np.cos(angle), np.sin(angle)
    K = skew(axis)
    return c * np.eye(3) + s * K + (1.0 - c) * np.outer(axis, axis)


def forward_kinematics(chain: LegChain, angles: np.ndarray) -> FootFrame:
    """Pose of the foot center in the CoM frame for the given joint angles."""
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (chain.dof,):
        raise ValueError(f"expected {chain.dof} joint angles, got shape {angles.shape}")
    R = np.array(chain.mount_rotation, dtype=float)
    t = np.array(chain.mount_translation, dtype=float)
    for axis, offset, a in zip(chain.joint_axes, chain.link_offsets, angles):
        R = R @ _axis_angle_matrix(axis, a)
        t = t + R @ offset
    t = t + R @ chain.foot_offset
    return FootFrame(rotation=R, translation=t)


def _joint_frames(chain: LegChain, angles: np.ndarray):
    """Per-joint (axis in CoM frame, joint origin in CoM frame) plus final pose."""
    R = np.array(chain.mount_rotation, dtype=float)
    t = np.array(chain.mount_translation, dtype=float)
    axes_c = np.empty((chain.dof, 3))
    origins_c = np.empty((chain.dof, 3))
    for i, (axis, offset, a) in enumerate(zip(chain.joint_axes, chain.link_offsets, angles)):
        axes_c[i] = R @ axis
        origins_c[i] = t
        R = R @ _axis_angle_matrix(axis, a)
        t = t + R @ offset
    t = t + R @ chain.foot_offset
    return axes_c, origins_c, R, t


def body_jacobian(chain: LegChain, angles: np.ndarray) -> np.ndarray:
    """Positional Jacobian of the foot center, expressed in the foot frame.

    Columns map joint rates to the foot-frame linear velocity of the foot
    center relative to the body.  The CoM-frame velocity is recovered as
    ``R_cf @ body_jacobian(...) @ qdot`` (see ``foot_velocity``).
    """
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (chain.dof,):
        raise ValueError(f"expected {chain.dof} joint angles, got shape {angles.shape}")
    axes_c, origins_c, R_cf, t_cf = _joint_frames(chain, angles)
    J_com = np.cross(axes_c, t_cf[None, :] - origins_c).T  # (3, dof) in CoM frame
    return R_cf.T @ J_com


def foot_velocity(chain: LegChain, angles: np.ndarray, velocities: np.ndarray) -> np.ndarray:
    """CoM-frame velocity of the foot center relative to the body."""
    velocities = np.asarray(velocities, dtype=float)
    if velocities.shape != (chain.dof,):
        raise ValueError(f"expected {chain.dof} joint velocities, got shape {velocities.shape}")
    fk = forward_kinematics(chain, angles)
    return fk.rotation @ (body_jacobian(chain, angles) @ velocities)


def foot_force(chain: LegChain, angles: np.ndarray, torques: np.ndarray) -> np.ndarray:
    """CoM-frame contact force implied by the joint torques.

    Solves tau = J^T F through the foot-frame Jacobian and rotates the
    result into the CoM frame.  Raises KinematicSingularityError when the
    Jacobian condition number exceeds ``SINGULARITY_COND_LIMIT``; world
    rotation is applied by the caller.
    """
    torques = np.asarray(torques, dtype=float)
    if torques.shape != (chain.dof,):
        raise ValueError(f"expected {chain.dof} joint torques, got shape {torques.shape}")
    J = body_jacobian(chain, angles)
    if J.shape[0] != J.shape[1]:
        raise ConfigurationError(
            f"leg {chain.name!r}: force recovery needs a square Jacobian (dof == 3)"
        )
    cond = np.linalg.cond(J)
    if not np.isfinite(cond) or cond > SINGULARITY_COND_LIMIT:
        raise KinematicSingularityError(
            f"leg {chain.name!r} Jacobian is singular (cond={cond:.3e})"
        )
    fk = forward_kinematics(chain, angles)
    return fk.rotation @ np.linalg.solve(J.T, torques)


def _rpy_matrix(rpy) -> np.ndarray:
    """Intrinsic roll-pitch-yaw (x, then y, then z) to a rotation matrix."""
    r, p, y = (float(v) for v in rpy)
    Rx = _axis_angle_matrix(np.array([1.0, 0.0, 0.0]), r)
    Ry = _axis_angle_matrix(np.array([0.0, 1.0, 0.0]), p)
    Rz = _axis_angle_matrix(np.array([0.0, 0.0, 1.0]), y)
    return Rz @ Ry @ Rx


def _leg_from_dict(entry: dict) -> LegChain:
    try:
        mount = entry.get("mount", {})
        joints = entry["joints"]
        axes = np.array([j["axis"] for j in joints], dtype=float)
        offsets = np.array([j["offset"] for j in joints], dtype=float)
        return LegChain(
            name=str(entry.get("name", "leg")),
            mount_rotation=_rpy_matrix(mount.get("rpy", (0.0, 0.0, 0.0))),
            mount_translation=np.array(mount.get("translation", (0.0, 0.0, 0.0)), dtype=float),
            joint_axes=axes,
            link_offsets=offsets,
            foot_offset=np.array(entry.get("foot_offset", (0.0, 0.0, 0.0)), dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad leg description: {exc}") from exc


def robot_model_from_dict(data: dict) -> RobotModel:
    if not isinstance(data, dict) or "legs" not in data:
        raise ConfigurationError("robot model file must contain a 'legs' list")
    legs = tuple(_leg_from_dict(item) for item in data["legs"])
    return RobotModel(name=str(data.get("name", "robot")), legs=legs)


def load_robot_model(path: str | Path) -> RobotModel:
    """Load a robot model from a YAML description file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read robot model {path!r}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"robot model {path!r} is not valid YAML: {exc}") from exc
    return robot_model_from_dict(data)


def reference_hexapod() -> RobotModel:
    """The hexapod model shipped with the package (see models/hexapod.yaml)."""
    from importlib.resources import files

    path = files("coclo").joinpath("models/hexapod.yaml")
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    return robot_model_from_dict(data)
