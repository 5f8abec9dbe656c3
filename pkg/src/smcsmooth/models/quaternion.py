"""Unit-quaternion kinematics (Hamilton convention, scalar-first).

Quaternions represent body-to-navigation rotations.  Every operation that
can drift the norm renormalizes its output.  All functions accept a single
quaternion (4,) or a batch (n, 4) and broadcast accordingly.
"""

from __future__ import annotations

import numpy as np

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

_SMALL_ANGLE = 1e-8


def _batched(q):
    q = np.asarray(q, dtype=float)
    single = q.ndim == 1
    return (q[None, :] if single else q), single


def quaternion_normalize(q):
    q, single = _batched(q)
    norm = np.linalg.norm(q, axis=1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("cannot normalize a zero quaternion")
    out = q / norm
    return out[0] if single else out


def quaternion_product(qa, qb):
    """Hamilton product qa * qb, renormalized."""
    qa, single_a = _batched(qa)
    qb, single_b = _batched(qb)
    w1, x1, y1, z1 = qa[:, 0], qa[:, 1], qa[:, 2], qa[:, 3]
    w2, x2, y2, z2 = qb[:, 0], qb[:, 1], qb[:, 2], qb[:, 3]
    out = np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=1,
    )
    out = quaternion_normalize(out)
    return out[0] if single_a and single_b else out


def quaternion_conjugate(q):
    q, single = _batched(q)
    out = q * np.array([1.0, -1.0, -1.0, -1.0])
    return out[0] if single else out


def quaternion_exp(w, half_dt: float = 1.0):
    """Unit quaternion exp(half_dt * w) for rotation vectors w (n, 3) or (3,).

    Below a rotation angle of 1e-8 the sinc factor is evaluated by series
    expansion to avoid cancellation.
    """
    w, single = _batched(np.asarray(w, dtype=float))
    v = half_dt * w
    angle = np.linalg.norm(v, axis=1)
    small = angle < _SMALL_ANGLE
    sinc = np.where(small, 1.0 - angle**2 / 6.0, np.sin(angle) / np.where(angle == 0, 1.0, angle))
    out = np.empty((w.shape[0], 4))
    out[:, 0] = np.cos(angle)
    out[:, 1:] = v * sinc[:, None]
    out = quaternion_normalize(out)
    return out[0] if single else out


def quaternion_log(q):
    """Rotation vector v with exp(v) = q (inverse of quaternion_exp with
    half_dt = 1); returns (n, 3) or (3,)."""
    q, single = _batched(q)
    q = quaternion_normalize(q)
    # Fix the sign so the scalar part is nonnegative (shortest rotation).
    q = np.where(q[:, :1] < 0, -q, q)
    sin_angle = np.linalg.norm(q[:, 1:], axis=1)
    angle = np.arctan2(sin_angle, q[:, 0])
    small = angle < _SMALL_ANGLE
    factor = np.where(
        small, 1.0 + angle**2 / 6.0, angle / np.where(sin_angle == 0, 1.0, sin_angle)
    )
    out = q[:, 1:] * factor[:, None]
    return out[0] if single else out


def quaternion_to_rotation_matrix(q):
    """Rotation matrices R(q); (n, 3, 3) for batched input, (3, 3) otherwise."""
    q, single = _batched(q)
    q = quaternion_normalize(np.atleast_2d(q))
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    R = np.empty((q.shape[0], 3, 3))
    R[:, 0, 0] = 1 - 2 * (y**2 + z**2)
    R[:, 0, 1] = 2 * (x * y - w * z)
    R[:, 0, 2] = 2 * (x * z + w * y)
    R[:, 1, 0] = 2 * (x * y + w * z)
    R[:, 1, 1] = 1 - 2 * (x**2 + z**2)
    R[:, 1, 2] = 2 * (y * z - w * x)
    R[:, 2, 0] = 2 * (x * z - w * y)
    R[:, 2, 1] = 2 * (y * z + w * x)
    R[:, 2, 2] = 1 - 2 * (x**2 + y**2)
    return R[0] if single else R


def quaternion_to_euler(q):
    """Roll, pitch, yaw (ZYX convention) in radians; (n, 3) or (3,)."""
    q, single = _batched(q)
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    roll = np.arctan2(2 * (w * x + y * z), 1 - 2 * (x**2 + y**2))
    pitch = np.arcsin(np.clip(2 * (w * y - z * x), -1.0, 1.0))
    yaw = np.arctan2(2 * (w * z + x * y), 1 - 2 * (y**2 + z**2))
    out = np.stack([roll, pitch, yaw], axis=1)
    return out[0] if single else out
