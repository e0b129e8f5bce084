"""Axis-angle / quaternion / rigid-transform helpers used throughout the package.

Conventions: axis-angle vectors are (..., 3) with angle = vector norm in
radians; quaternions are (w, x, y, z); rigid transforms are 4x4 row-major
acting on column vectors.
"""

import numpy as np


def axis_angle_to_matrix(aa):
    """Rodrigues formula, vectorized over leading dims.

    Args:
        aa: (..., 3) axis-angle, radians.
    Returns:
        (..., 3, 3) rotation matrices. Exactly identity for zero vectors.
    """
    aa = np.asarray(aa, dtype=np.float64)
    theta = np.linalg.norm(aa, axis=-1)
    out = np.broadcast_to(np.eye(3), aa.shape[:-1] + (3, 3)).copy()
    nz = theta > 0.0
    if not np.any(nz):
        return out
    axis = aa[nz] / theta[nz][..., None]
    x, y, z = axis[..., 0], axis[..., 1], axis[..., 2]
    zero = np.zeros_like(x)
    k = np.stack([zero, -z, y, z, zero, -x, -y, x, zero], axis=-1).reshape(-1, 3, 3)
    s = np.sin(theta[nz])[..., None, None]
    c = np.cos(theta[nz])[..., None, None]
    out[nz] = np.eye(3) + s * k + (1.0 - c) * (k @ k)
    return out


def axis_angle_to_quat(aa):
    """(..., 3) axis-angle -> (..., 4) unit quaternion (w, x, y, z)."""
    aa = np.asarray(aa, dtype=np.float64)
    theta = np.linalg.norm(aa, axis=-1, keepdims=True)
    half = 0.5 * theta
    # sin(t/2)/t -> 1/2 as t -> 0
    small = theta < 1e-12
    scale = np.where(small, 0.5, np.sin(half) / np.where(small, 1.0, theta))
    return np.concatenate([np.cos(half), aa * scale], axis=-1)


def quat_to_axis_angle(q):
    """(..., 4) quaternion -> (..., 3) axis-angle with norm in [0, pi]."""
    q = np.asarray(q, dtype=np.float64)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    # canonicalize to w >= 0 so the angle lands in [0, pi]
    q = np.where(q[..., :1] < 0.0, -q, q)
    v = q[..., 1:]
    vn = np.linalg.norm(v, axis=-1, keepdims=True)
    angle = 2.0 * np.arctan2(vn, q[..., :1])
    small = vn < 1e-12
    return np.where(small, 0.0, v * (angle / np.where(small, 1.0, vn)))


def quat_slerp(qa, qb, t):
    """Spherical linear interpolation between two quaternion arrays.

    Takes the shorter great-circle arc; falls back to normalized lerp when
    the quaternions are nearly parallel.
    """
    qa = np.asarray(qa, dtype=np.float64)
    qb = np.asarray(qb, dtype=np.float64)
    qa = qa / np.linalg.norm(qa, axis=-1, keepdims=True)
    qb = qb / np.linalg.norm(qb, axis=-1, keepdims=True)
    dot = np.sum(qa * qb, axis=-1, keepdims=True)
    qb = np.where(dot < 0.0, -qb, qb)
    dot = np.abs(dot)
    omega = np.arccos(np.clip(dot, -1.0, 1.0))
    sin_omega = np.sin(omega)
    near = sin_omega < 1e-9
    wa = np.where(near, 1.0 - t, np.sin((1.0 - t) * omega) / np.where(near, 1.0, sin_omega))
    wb = np.where(near, t, np.sin(t * omega) / np.where(near, 1.0, sin_omega))
    out = wa * qa + wb * qb
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def canonicalize_axis_angle(aa):
    """Reduce axis-angle norms into [0, pi] by flipping the axis where needed.

    Preserves the rotation matrix (same element of SO(3)).
    """
    aa = np.asarray(aa, dtype=np.float64)
    theta = np.linalg.norm(aa, axis=-1, keepdims=True)
    red = np.mod(theta, 2.0 * np.pi)
    scale = np.where(theta > 0.0, red / np.where(theta > 0.0, theta, 1.0), 0.0)
    out = aa * scale
    flip = red > np.pi
    flip_scale = np.where(red > 0.0, (red - 2.0 * np.pi) / np.where(red > 0.0, red, 1.0), 0.0)
    return np.where(flip, out * flip_scale, out)


def make_transform(rotation, translation):
    """3x3 rotation + 3-vector -> 4x4 homogeneous transform."""
    t = np.eye(4)
    t[:3, :3] = rotation
    t[:3, 3] = translation
    return t


def invert_rigid(transform):
    """Inverse of a rigid 4x4 transform (R^T, -R^T t)."""
    r = transform[:3, :3]
    out = np.eye(4)
    out[:3, :3] = r.T
    out[:3, 3] = -r.T @ transform[:3, 3]
    return out


def apply_transform(transform, points):
    """Apply a 4x4 transform to (..., 3) points."""
    points = np.asarray(points, dtype=np.float64)
    return points @ transform[:3, :3].T + transform[:3, 3]


def is_rotation(r, tol=1e-6):
    """True when r is orthonormal with determinant +1 within tol."""
    r = np.asarray(r, dtype=np.float64)
    return (np.allclose(r.T @ r, np.eye(3), atol=tol)
            and abs(np.linalg.det(r) - 1.0) <= tol)
