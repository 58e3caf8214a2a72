"""IMU-only dead reckoning, the reference point for fusion gains.

Integrates gyro into orientation and accelerometer (gravity-compensated
through that orientation) twice into velocity and position.  No leg data,
no bias estimation: exactly the open-loop drift a fused estimator has to
beat.
"""

from __future__ import annotations

import numpy as np

from .estimator import SensorFrame
from .logio import TrajectoryTable
from .spatial import quat_identity, quat_integrate, rotate

GRAVITY_W = np.array([0.0, 0.0, -9.81])


def dead_reckon(
    frames: list[SensorFrame],
    q0: np.ndarray | None = None,
    r0: np.ndarray | None = None,
    v0: np.ndarray | None = None,
    gravity: np.ndarray = GRAVITY_W,
) -> TrajectoryTable:
    """Integrate the IMU channels of a sensor log into a trajectory.

    The accelerometer is treated as specific force: world acceleration is
    ``rotate(q, accel) + gravity``.  Orientation starts at ``q0`` (default
    identity), position/velocity at ``r0``/``v0`` (default zero).  Returns
    a TrajectoryTable with zero foot positions and contacts, so it shares
    the trajectory schema with estimator output.
    """
    k = len(frames)
    n_legs = frames[0].joint_angles.shape[0] if k else 0
    t = np.array([f.timestamp for f in frames])
    r = np.zeros((k, 3))
    v = np.zeros((k, 3))
    q = np.zeros((k, 4))
    r[0] = np.zeros(3) if r0 is None else np.asarray(r0, dtype=float)
    v[0] = np.zeros(3) if v0 is None else np.asarray(v0, dtype=float)
    q[0] = quat_identity() if q0 is None else np.asarray(q0, dtype=float)
    for i in range(1, k):
        dt = t[i] - t[i - 1]
        a_w = rotate(q[i - 1], frames[i - 1].accel) + gravity
        r[i] = r[i - 1] + v[i - 1] * dt + 0.5 * a_w * dt * dt
        v[i] = v[i - 1] + a_w * dt
        q[i] = quat_integrate(q[i - 1], frames[i - 1].gyro, dt)
    return TrajectoryTable(
        t=t,
        r=r,
        q=q,
        v=v,
        foot_pos=np.zeros((k, n_legs, 3)),
        contact=np.zeros((k, n_legs)),
    )
