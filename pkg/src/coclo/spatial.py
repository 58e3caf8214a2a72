"""Quaternion and small spatial-algebra helpers.

Conventions (these differ between libraries, so they are spelled out here
and everything else in the package relies on them):

* Quaternions are stored vector-first: ``q = [qx, qy, qz, qw]`` with the
  scalar part last.  The identity rotation is ``(0, 0, 0, 1)``.
* ``quat_product(q, p)`` is the Hamilton product ``q * p`` in that layout,
  so ``quat_to_rotmat(quat_product(q, p)) == quat_to_rotmat(q) @ quat_to_rotmat(p)``.
* A unit quaternion ``q`` represents the rotation taking body-frame vectors
  into the world frame: ``v_world = rotate(q, v_body)``.
* Angular velocity used by ``quat_integrate`` is expressed in the body frame.

All functions broadcast over leading axes, so a stack of quaternions with
shape ``(k, 4)`` works wherever a single ``(4,)`` quaternion does.
"""

from __future__ import annotations

import numpy as np

QUAT_IDENTITY = np.array([0.0, 0.0, 0.0, 1.0])

# rotate() refuses quaternions whose norm strays further than this from 1.
UNIT_NORM_TOL = 1e-6


def quat_identity() -> np.ndarray:
    """Return the identity quaternion (0, 0, 0, 1)."""
    return QUAT_IDENTITY.copy()


def quat_product(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Hamilton product q * p for vector-first quaternions.

    Composition order matches rotation-matrix composition: the result
    rotates by ``p`` first, then by ``q``.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    qv, qw = q[..., :3], q[..., 3:4]
    pv, pw = p[..., :3], p[..., 3:4]
    out = np.empty(np.broadcast_shapes(q.shape, p.shape))
    out[..., :3] = qw * pv + pw * qv + np.cross(qv, pv)
    out[..., 3] = (qw * pw)[..., 0] - np.sum(qv * pv, axis=-1)
    return out


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    """Conjugate (inverse for unit quaternions)."""
    q = np.asarray(q, dtype=float)
    out = q.copy()
    out[..., :3] *= -1.0
    return out


def quat_norm(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.linalg.norm(q, axis=-1)


def quat_normalize(q: np.ndarray) -> np.ndarray:
    """Scale q to unit norm.  Raises ValueError on (near-)zero quaternions."""
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(n < 1e-12):
        raise ValueError("cannot normalize a zero-norm quaternion")
    return q / n


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    """Unit quaternion for a rotation of ``angle`` radians about ``axis``."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n < 1e-12:
        raise ValueError("rotation axis must be nonzero")
    half = 0.5 * angle
    out = np.empty(4)
    out[:3] = (np.sin(half) / n) * axis
    out[3] = np.cos(half)
    return out


def quat_integrate(q: np.ndarray, omega: np.ndarray, dt: float) -> np.ndarray:
    """One explicit-Euler step of the attitude kinematics, renormalized.

    Computes ``q + 0.5 * q * [omega * dt; 0]`` with the Hamilton product and
    rescales the result to unit norm.  ``omega`` is the body-frame angular
    velocity in rad/s.  The renormalization keeps the error of repeated
    steps bounded to O(|omega|^3 dt^2) per step in angle.
    """
    q = np.asarray(q, dtype=float)
    omega = np.asarray(omega, dtype=float)
    step = np.zeros(np.broadcast_shapes(q.shape, omega.shape[:-1] + (4,)))
    step[..., :3] = omega * dt
    return quat_normalize(q + 0.5 * quat_product(q, step))


def rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector(s) ``v`` by unit quaternion(s) ``q``.

    Rejects quaternions whose norm deviates from 1 by more than
    ``UNIT_NORM_TOL``; callers holding unnormalized quaternions must
    normalize explicitly so that silent scaling bugs cannot hide here.
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    err = np.abs(np.linalg.norm(q, axis=-1) - 1.0)
    if np.any(err > UNIT_NORM_TOL):
        raise ValueError(
            f"rotate() requires unit quaternions (norm error {float(np.max(err)):.3e} "
            f"exceeds {UNIT_NORM_TOL:.0e})"
        )
    qv, qw = q[..., :3], q[..., 3:4]
    # v' = v + 2 qw (qv x v) + 2 qv x (qv x v)
    t = 2.0 * np.cross(qv, v)
    return v + qw * t + np.cross(qv, t)


def quat_to_rotmat(q: np.ndarray) -> np.ndarray:
    """3x3 rotation matrix for a unit quaternion (body-to-world)."""
    q = np.asarray(q, dtype=float)
    x, y, z, w = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    out = np.empty(q.shape[:-1] + (3, 3))
    out[..., 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    out[..., 0, 1] = 2.0 * (x * y - w * z)
    out[..., 0, 2] = 2.0 * (x * z + w * y)
    out[..., 1, 0] = 2.0 * (x * y + w * z)
    out[..., 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    out[..., 1, 2] = 2.0 * (y * z - w * x)
    out[..., 2, 0] = 2.0 * (x * z - w * y)
    out[..., 2, 1] = 2.0 * (y * z + w * x)
    out[..., 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return out


def skew(r: np.ndarray) -> np.ndarray:
    """Skew-symmetric cross-product matrix: skew(r) @ v == cross(r, v)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape[:-1] + (3, 3))
    out[..., 0, 1] = -r[..., 2]
    out[..., 0, 2] = r[..., 1]
    out[..., 1, 0] = r[..., 2]
    out[..., 1, 2] = -r[..., 0]
    out[..., 2, 0] = -r[..., 1]
    out[..., 2, 1] = r[..., 0]
    return out
