"""Contact-centric leg odometry for walking robots.

A square-root unscented Kalman filter that fuses joint encoders, joint
velocities, joint torques, and a low-grade IMU into body pose, velocity,
foot positions, and per-leg contact state — plus a kinematic walking
simulator, drift metrics, and file-based replay tooling to validate it.
"""

from .errors import (
    CocloError,
    ConfigurationError,
    InsufficientSupportError,
    KinematicSingularityError,
    NumericalError,
    OrderingError,
    SchemaError,
)
from .estimator import (
    ContactCalibration,
    FilterConfig,
    RobotState,
    SensorFrame,
    StateLayout,
    body_twist_ls,
    calibrate_contact,
    contact_probability,
    external_pose_update,
    initial_belief,
    load_filter_config,
    step,
    step_with_diagnostics,
)
from .kinematics import (
    LegChain,
    RobotModel,
    body_jacobian,
    foot_force,
    foot_velocity,
    forward_kinematics,
    load_robot_model,
    reference_hexapod,
)
from .logio import (
    TrajectoryTable,
    read_sensor_log,
    read_trajectory,
    write_sensor_log,
    write_trajectory,
)
from .metrics import DriftReport, drift_report, path_length, read_report, write_report
from .replay import ExternalPoseFix, ReplayResult, replay, replay_frames
from .simulator import (
    GaitParams,
    NoiseSpec,
    SimTrace,
    TerrainProfile,
    inject_impact_noise,
    recommended_duration,
    simulate,
)
from .srukf import SqrtBelief

__version__ = "0.1.0"

__all__ = [
    "CocloError",
    "ConfigurationError",
    "ContactCalibration",
    "DriftReport",
    "ExternalPoseFix",
    "FilterConfig",
    "GaitParams",
    "InsufficientSupportError",
    "KinematicSingularityError",
    "LegChain",
    "NoiseSpec",
    "NumericalError",
    "OrderingError",
    "ReplayResult",
    "RobotModel",
    "RobotState",
    "SchemaError",
    "SensorFrame",
    "SimTrace",
    "SqrtBelief",
    "StateLayout",
    "TerrainProfile",
    "TrajectoryTable",
    "body_jacobian",
    "body_twist_ls",
    "calibrate_contact",
    "contact_probability",
    "drift_report",
    "external_pose_update",
    "foot_force",
    "foot_velocity",
    "forward_kinematics",
    "initial_belief",
    "inject_impact_noise",
    "load_filter_config",
    "load_robot_model",
    "path_length",
    "read_report",
    "read_sensor_log",
    "read_trajectory",
    "recommended_duration",
    "reference_hexapod",
    "replay",
    "replay_frames",
    "simulate",
    "step",
    "step_with_diagnostics",
    "write_report",
    "write_sensor_log",
    "write_trajectory",
]
