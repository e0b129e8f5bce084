"""Parametric hand forward pass: shape blendshapes, kinematics, linear blend
skinning, keypoint export, and forearm attachment at the wrist frame.

All functions are pure over immutable assets; outputs are float64 arrays in
meters. The skin-matrix recursion is arranged so that a zero pose reproduces
the shaped template bit-for-bit (each per-joint factor is exactly the
identity when its rotation is).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFinitePose, RingCountMismatch
from .objmesh import TriMesh
from .rotation import axis_angle_to_matrix, canonicalize_axis_angle, make_transform


@dataclass
class HandShape:
    """Blendshape coefficients, bounded to a sane range for bank-drawn shapes."""
    beta: np.ndarray

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.beta)):
            raise ValueError("hand shape coefficients must be finite")
        if np.any(np.abs(self.beta) > 5.0):
            raise ValueError("hand shape coefficient magnitude exceeds 5")


@dataclass
class HandPose:
    global_orient: np.ndarray = field(default_factory=lambda: np.zeros(3))
    joint_rotations: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    global_translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.global_orient = np.asarray(self.global_orient, dtype=np.float64).reshape(3)
        self.joint_rotations = np.asarray(self.joint_rotations, dtype=np.float64).reshape(-1, 3)
        self.global_translation = np.asarray(self.global_translation, dtype=np.float64).reshape(3)

    def canonicalized(self):
        """Same rotations with every axis-angle norm reduced into [0, pi]."""
        return HandPose(canonicalize_axis_angle(self.global_orient),
                        canonicalize_axis_angle(self.joint_rotations),
                        self.global_translation.copy())

    def flat(self):
        """(J*3,) axis-angle row: global orient followed by joint rotations."""
        return np.concatenate([self.global_orient, self.joint_rotations.reshape(-1)])


def pose_from_flat(theta, translation=(0.0, 0.0, 0.0)):
    """Build a HandPose from a (J*3,) bank/grasp row (no translation stored)."""
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    return HandPose(theta[:3], theta[3:].reshape(-1, 3), np.asarray(translation))


@dataclass
class PosedHand:
    vertices: np.ndarray     # (V, 3) world meters
    joints: np.ndarray       # (J, 3)
    wrist_frame: np.ndarray  # (4, 4) world-from-wrist


def shaped_template(model, shape):
    """Template plus the linear combination of shape blendshapes.

    Returns (V, 3) float64. A zero coefficient vector returns the template
    exactly.
    """
    beta = shape.beta
    if beta.shape[0] != model.n_shape_params:
        raise DimensionMismatch(
            f"shape has {beta.shape[0]} coefficients, model expects {model.n_shape_params}")
    verts = model.template_vertices.astype(np.float64)
    if beta.shape[0]:
        blend = model.shape_blendshapes.astype(np.float64)
        verts = verts + np.einsum("b,bvc->vc", beta, blend)
    return verts


def _topological_order(parent):
    order = []
    done = set()
    pending = list(range(len(parent)))
    while pending:
        progressed = False
        rest = []
        for j in pending:
            p = int(parent[j])
            if p < 0 or p in done:
                order.append(j)
                done.add(j)
                progressed = True
            else:
                rest.append(j)
        pending = rest
        if not progressed:
            raise ValueError("kinematic tree is not a forest")
    return order


def pose_mesh(model, shape, pose, use_pose_correctives=False):
    """Full forward pass: blendshapes -> kinematic chain -> skinning -> global.

    The global orient/translation act about the world origin after
    articulation; the wrist frame is the root joint's world transform.

    Raises:
        DimensionMismatch: wrong beta length or joint-rotation count.
        NonFinitePose: NaN/inf in the pose.
    """
    nj = model.n_joints
    if pose.joint_rotations.shape != (nj - 1, 3):
        raise DimensionMismatch(
            f"pose has {pose.joint_rotations.shape[0]} joint rotations, "
            f"model expects {nj - 1}")
    if not (np.all(np.isfinite(pose.joint_rotations))
            and np.all(np.isfinite(pose.global_orient))
            and np.all(np.isfinite(pose.global_translation))):
        raise NonFinitePose("pose contains non-finite values")

    v_shaped = shaped_template(model, shape)
    j_rest = model.joint_regressor.astype(np.float64) @ v_shaped

    rot = np.empty((nj, 3, 3))
    rot[0] = np.eye(3)
    rot[1:] = axis_angle_to_matrix(pose.joint_rotations)

    if use_pose_correctives and model.pose_blendshapes.size:
        coeffs = (rot[1:] - np.eye(3)).reshape(-1)
        if coeffs.shape[0] != model.pose_blendshapes.shape[0]:
            raise DimensionMismatch(
                f"model carries {model.pose_blendshapes.shape[0]} pose correctives, "
                f"expected {(nj - 1) * 9}")
        v_shaped = v_shaped + np.einsum(
            "p,pvc->vc", coeffs, model.pose_blendshapes.astype(np.float64))

    global_t = make_transform(axis_angle_to_matrix(pose.global_orient),
                              pose.global_translation)

    # skin matrices map rest-space to world; per-joint factor [R | j - R j]
    # is exactly the identity when R is, so a zero pose is lossless
    skin_mats = np.empty((nj, 4, 4))
    for j in _topological_order(model.parent):
        b = np.eye(4)
        b[:3, :3] = rot[j]
        b[:3, 3] = j_rest[j] - rot[j] @ j_rest[j]
        p = int(model.parent[j])
        skin_mats[j] = (global_t if p < 0 else skin_mats[p]) @ b

    weights = model.skinning_weights.astype(np.float64)
    per_vert = np.einsum("vj,jab->vab", weights, skin_mats)
    vertices = np.einsum("vab,vb->va", per_vert[:, :3, :3], v_shaped) + per_vert[:, :3, 3]
    joints = np.einsum("jab,jb->ja", skin_mats[:, :3, :3], j_rest) + skin_mats[:, :3, 3]

    root = int(np.flatnonzero(model.parent < 0)[0])
    wrist_frame = skin_mats[root] @ make_transform(np.eye(3), j_rest[root])
    return PosedHand(vertices=vertices, joints=joints, wrist_frame=wrist_frame)


def export_keypoints(model, posed):
    """Annotation keypoints: skeleton joints followed by fingertip vertices."""
    tips = posed.vertices[model.fingertip_vertices]
    return np.concatenate([posed.joints, tips], axis=0)


# ---------------------------------------------------------------------------
# forearm attachment

def _ring_frame(ring_pts, away_from):
    """Centroid, outward unit normal, and in-plane radial directions of a ring.

    The normal is flipped, if needed, to point away from ``away_from``
    (the hand interior), making the construction rigid-equivariant.
    """
    c = ring_pts.mean(axis=0)
    rel = ring_pts - c
    n = np.zeros(3)
    for k in range(len(rel)):
        n += np.cross(rel[k], rel[(k + 1) % len(rel)])
    n /= np.linalg.norm(n)
    if n @ (away_from - c) > 0.0:
        n = -n
    radial = rel - np.outer(rel @ n, n)
    return c, n, radial


def make_procedural_forearm(socket_ring_pts, away_from, length=0.22,
                            proximal_radius=None, distal_radius=None, segments=5):
    """Tapered tube extruded from the (posed) wrist ring, open at the socket end.

    The socket ring copies the wrist-ring vertices exactly unless an explicit
    proximal radius is given, in which case it is circularized to that radius.
    Returns a TriMesh with cylindrical UVs; vertex 0..n-1 is the socket ring.
    """
    ring_pts = np.asarray(socket_ring_pts, dtype=np.float64)
    n = len(ring_pts)
    c, axis, radial = _ring_frame(ring_pts, np.asarray(away_from, dtype=np.float64))
    mean_radius = float(np.linalg.norm(radial, axis=1).mean())

    if proximal_radius is None:
        socket = ring_pts.copy()
        prox = mean_radius
    else:
        prox = float(proximal_radius)
        unit = radial / np.linalg.norm(radial, axis=1, keepdims=True)
        socket = c + prox * unit
    dist = float(distal_radius) if distal_radius is not None else 0.85 * prox

    socket_radial = socket - c
    verts = []
    uv = []
    for s in range(segments + 1):
        f = s / segments
        scale = (1.0 - f) + f * (dist / prox)
        ring = c + f * length * axis + scale * socket_radial
        verts.extend(ring)
        uv.extend([(k / n, f) for k in range(n)])
    faces = []
    for s in range(segments):
        a = s * n
        b = (s + 1) * n
        for k in range(n):
            k1 = (k + 1) % n
            faces.append((a + k, a + k1, b + k1))
            faces.append((a + k, b + k1, b + k))
    end_center = len(verts)
    verts.append(c + length * axis)
    uv.append((0.5, 1.0))
    top = segments * n
    for k in range(n):
        faces.append((top + k, top + (k + 1) % n, end_center))
    return TriMesh(np.asarray(verts), np.asarray(faces, dtype=np.int32),
                   np.asarray(uv))


def attach_forearm(model, hand, forearm_mesh=None, socket_ring=None, **params):
    """Attach a forearm at the posed wrist ring.

    With no ``forearm_mesh`` a procedural tapered tube is generated in world
    space directly from the posed ring (socket coincides with the wrist ring).
    A supplied mesh must name its socket ring vertex ids; it is rigidly moved
    so its socket frame lands on the wrist ring frame.

    Returns the forearm TriMesh (a separate scene node; no weld to the hand).
    """
    ring_ids = model.wrist_ring
    ring_pts = hand.vertices[ring_ids]
    interior = hand.vertices.mean(axis=0)

    if forearm_mesh is None:
        return make_procedural_forearm(ring_pts, interior, **params)

    if socket_ring is None or len(socket_ring) != len(ring_ids):
        got = 0 if socket_ring is None else len(socket_ring)
        raise RingCountMismatch(
            f"socket ring has {got} vertices, wrist ring has {len(ring_ids)}")
    mesh = forearm_mesh.copy()
    src_pts = np.asarray(mesh.vertices[np.asarray(socket_ring)], dtype=np.float64)
    # socket normal points away from the forearm body; wrist normal away from the hand
    c_src, n_src, _ = _ring_frame(src_pts, mesh.vertices.mean(axis=0))
    c_dst, n_dst, _ = _ring_frame(ring_pts, interior)
    f_src = _frame_matrix(c_src, -n_src, src_pts[0] - c_src)
    f_dst = _frame_matrix(c_dst, n_dst, ring_pts[0] - c_dst)
    t = f_dst @ np.linalg.inv(f_src)
    mesh.vertices = mesh.vertices @ t[:3, :3].T + t[:3, 3]
    return mesh


def _frame_matrix(origin, z_dir, x_hint):
    z = z_dir / np.linalg.norm(z_dir)
    x = x_hint - (x_hint @ z) * z
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    m = np.eye(4)
    m[:3, 0], m[:3, 1], m[:3, 2], m[:3, 3] = x, y, z, origin
    return m
