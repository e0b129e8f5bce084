import numpy as np
import pytest

from handsynth import HandPose, HandShape, attach_forearm, pose_mesh, shaped_template
from handsynth.errors import DimensionMismatch, NonFinitePose, RingCountMismatch
from handsynth.hand import make_procedural_forearm, pose_from_flat
from handsynth.rotation import axis_angle_to_matrix, axis_angle_to_quat, quat_to_axis_angle


def _zero_pose(model):
    return HandPose(joint_rotations=np.zeros((model.n_joints - 1, 3)))


def _random_pose(model, rng, scale=0.5):
    return HandPose(global_orient=rng.normal(0, scale, 3),
                    joint_rotations=rng.normal(0, scale, (model.n_joints - 1, 3)),
                    global_translation=rng.normal(0, 0.1, 3))


def _compose_rigid(rot_aa, trans, pose):
    """Fold an extra world rigid motion (R, t) into a pose's global transform."""
    r = axis_angle_to_matrix(rot_aa)
    r0 = axis_angle_to_matrix(pose.global_orient)
    qa = axis_angle_to_quat(np.asarray(rot_aa, dtype=np.float64))
    qb = axis_angle_to_quat(pose.global_orient)
    w = qa[0] * qb[0] - qa[1:] @ qb[1:]
    xyz = qa[0] * qb[1:] + qb[0] * qa[1:] + np.cross(qa[1:], qb[1:])
    combined = quat_to_axis_angle(np.concatenate([[w], xyz]))
    assert np.allclose(axis_angle_to_matrix(combined), r @ r0, atol=1e-12)
    return HandPose(combined, pose.joint_rotations.copy(),
                    r @ pose.global_translation + np.asarray(trans))


# ---------------------------------------------------------------------------
# shaped_template

def test_zero_beta_is_template(toy_model):
    out = shaped_template(toy_model, HandShape(np.zeros(2)))
    assert np.array_equal(out, toy_model.template_vertices.astype(np.float64))


def test_unit_beta_adds_one_blendshape(toy_model):
    out = shaped_template(toy_model, HandShape([1.0, 0.0]))
    expect = (toy_model.template_vertices.astype(np.float64)
              + toy_model.shape_blendshapes[0].astype(np.float64))
    assert np.array_equal(out, expect)


def test_shape_linearity_oracle(toy_model):
    a, b = 0.7, -1.3
    t = toy_model.template_vertices.astype(np.float64)
    d1 = shaped_template(toy_model, HandShape([1.0, 0.0])) - t
    d2 = shaped_template(toy_model, HandShape([0.0, 1.0])) - t
    combined = shaped_template(toy_model, HandShape([a, b]))
    assert np.abs(combined - (a * d1 + b * d2 + t)).max() < 1e-7


def test_shape_dimension_mismatch(toy_model):
    with pytest.raises(DimensionMismatch):
        shaped_template(toy_model, HandShape([0.0, 0.0, 0.0]))


def test_shape_bound_enforced():
    with pytest.raises(ValueError):
        HandShape([6.0, 0.0])
    with pytest.raises(ValueError):
        HandShape([np.nan, 0.0])


# ---------------------------------------------------------------------------
# pose_mesh

def test_zero_pose_returns_template_bitwise(toy_model):
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)), _zero_pose(toy_model))
    assert np.array_equal(posed.vertices, toy_model.template_vertices.astype(np.float64))


def test_near_zero_pose_close_to_template(toy_model):
    pose = HandPose(joint_rotations=np.full((toy_model.n_joints - 1, 3), 1e-12))
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)), pose)
    assert np.abs(posed.vertices
                  - toy_model.template_vertices.astype(np.float64)).max() < 1e-9


def test_translation_equivariance(toy_model, rng):
    pose = _random_pose(toy_model, rng)
    base = pose_mesh(toy_model, HandShape([0.5, -0.5]), pose)
    t = np.array([0.03, -0.02, 0.11])
    moved = pose_mesh(toy_model, HandShape([0.5, -0.5]),
                      HandPose(pose.global_orient, pose.joint_rotations,
                               pose.global_translation + t))
    assert np.abs(moved.vertices - (base.vertices + t)).max() < 1e-12
    assert np.abs(moved.joints - (base.joints + t)).max() < 1e-12


def test_pure_global_orient_rotates_template(toy_model):
    aa = np.array([0.3, -1.1, 0.7])
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)),
                      HandPose(global_orient=aa,
                               joint_rotations=np.zeros((toy_model.n_joints - 1, 3))))
    oracle = toy_model.template_vertices.astype(np.float64) @ axis_angle_to_matrix(aa).T
    assert np.abs(posed.vertices - oracle).max() < 1e-7


def test_rigid_equivariance_full_pass(toy_model, rng):
    for _ in range(5):
        pose = _random_pose(toy_model, rng)
        base = pose_mesh(toy_model, HandShape([0.3, 0.8]), pose)
        aa = rng.normal(0, 1.0, 3)
        t = rng.normal(0, 0.2, 3)
        r = axis_angle_to_matrix(aa)
        composed = pose_mesh(toy_model, HandShape([0.3, 0.8]),
                             _compose_rigid(aa, t, pose))
        assert np.abs(composed.vertices - (base.vertices @ r.T + t)).max() < 1e-7
        assert np.abs(composed.joints - (base.joints @ r.T + t)).max() < 1e-7


def test_partition_of_unity_under_common_rigid(toy_model, rng):
    """All joint transforms equal to one rigid G -> G applied to the shaped
    template, exact to machine precision."""
    shape = HandShape([1.2, -0.7])
    aa = np.array([0.4, 0.2, -0.9])
    t = np.array([0.05, -0.01, 0.2])
    posed = pose_mesh(toy_model, shape,
                      HandPose(global_orient=aa,
                               joint_rotations=np.zeros((toy_model.n_joints - 1, 3)),
                               global_translation=t))
    expect = shaped_template(toy_model, shape) @ axis_angle_to_matrix(aa).T + t
    assert np.abs(posed.vertices - expect).max() < 1e-12


def test_joint_regression_linearity(toy_model, rng):
    reg = toy_model.joint_regressor.astype(np.float64)
    v1 = rng.normal(0, 0.1, (toy_model.n_vertices, 3))
    v2 = rng.normal(0, 0.1, (toy_model.n_vertices, 3))
    alpha = 0.37
    lhs = reg @ (alpha * v1 + (1 - alpha) * v2)
    rhs = alpha * (reg @ v1) + (1 - alpha) * (reg @ v2)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_root_joint_matches_wrist_frame(toy_model, rng):
    posed = pose_mesh(toy_model, HandShape([0.5, 0.5]), _random_pose(toy_model, rng))
    assert np.abs(posed.joints[0] - posed.wrist_frame[:3, 3]).max() < 1e-9
    r = posed.wrist_frame[:3, :3]
    assert np.allclose(r.T @ r, np.eye(3), atol=1e-9)


def test_pose_validation(toy_model):
    with pytest.raises(DimensionMismatch):
        pose_mesh(toy_model, HandShape(np.zeros(2)),
                  HandPose(joint_rotations=np.zeros((3, 3))))
    bad = HandPose(joint_rotations=np.zeros((toy_model.n_joints - 1, 3)))
    bad.joint_rotations[2, 1] = np.inf
    with pytest.raises(NonFinitePose):
        pose_mesh(toy_model, HandShape(np.zeros(2)), bad)


def test_pose_correctives_zero_pose_still_template(toy_model):
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)), _zero_pose(toy_model),
                      use_pose_correctives=True)
    assert np.array_equal(posed.vertices, toy_model.template_vertices.astype(np.float64))


def test_pose_correctives_change_posed_mesh(toy_model, rng):
    pose = _random_pose(toy_model, rng)
    off = pose_mesh(toy_model, HandShape(np.zeros(2)), pose)
    on = pose_mesh(toy_model, HandShape(np.zeros(2)), pose, use_pose_correctives=True)
    assert np.abs(on.vertices - off.vertices).max() > 0


# ---------------------------------------------------------------------------
# forearm attachment

def test_forearm_socket_coincides_with_wrist_ring(toy_model, rng):
    posed = pose_mesh(toy_model, HandShape([0.5, -1.0]), _random_pose(toy_model, rng))
    forearm = attach_forearm(toy_model, posed)
    ring = posed.vertices[toy_model.wrist_ring]
    n = len(toy_model.wrist_ring)
    assert np.abs(forearm.vertices[:n] - ring).max() < 2e-3


def test_forearm_axis_at_canonical_pose(toy_model):
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)), _zero_pose(toy_model))
    forearm = attach_forearm(toy_model, posed)
    n = len(toy_model.wrist_ring)
    socket_c = forearm.vertices[:n].mean(axis=0)
    far_c = forearm.vertices[-1]
    axis = (far_c - socket_c) / np.linalg.norm(far_c - socket_c)
    # wrist frame is the identity at rest; the arm extends along -y, away
    # from the fingers
    assert np.allclose(axis, [0.0, -1.0, 0.0], atol=1e-9)


def test_forearm_rigid_equivariance(toy_model, rng):
    pose = _random_pose(toy_model, rng)
    base = pose_mesh(toy_model, HandShape([0.2, 0.2]), pose)
    fa_base = attach_forearm(toy_model, base)
    aa = rng.normal(0, 1.0, 3)
    t = rng.normal(0, 0.2, 3)
    r = axis_angle_to_matrix(aa)
    moved = pose_mesh(toy_model, HandShape([0.2, 0.2]), _compose_rigid(aa, t, pose))
    fa_moved = attach_forearm(toy_model, moved)
    assert np.abs(fa_moved.vertices - (fa_base.vertices @ r.T + t)).max() < 1e-7


def test_forearm_explicit_radius_circle(toy_model):
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)), _zero_pose(toy_model))
    forearm = attach_forearm(toy_model, posed, proximal_radius=0.035)
    n = len(toy_model.wrist_ring)
    socket = forearm.vertices[:n]
    center = socket.mean(axis=0)
    radii = np.linalg.norm(socket - center, axis=1)
    assert np.abs(radii - 0.035).max() < 1e-6


def test_forearm_ring_count_mismatch(toy_model, rng):
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)), _zero_pose(toy_model))
    donor = make_procedural_forearm(posed.vertices[toy_model.wrist_ring],
                                    posed.vertices.mean(axis=0))
    with pytest.raises(RingCountMismatch):
        attach_forearm(toy_model, posed, forearm_mesh=donor, socket_ring=[0, 1, 2])


def test_forearm_mesh_socket_alignment(toy_model):
    posed = pose_mesh(toy_model, HandShape(np.zeros(2)), _zero_pose(toy_model))
    n = len(toy_model.wrist_ring)
    donor = make_procedural_forearm(posed.vertices[toy_model.wrist_ring],
                                    posed.vertices.mean(axis=0))
    # displace the donor arbitrarily; attachment must bring its socket back
    donor.vertices = donor.vertices @ axis_angle_to_matrix([0.3, 1.0, -0.2]).T + [1, 2, 3]
    placed = attach_forearm(toy_model, posed, forearm_mesh=donor,
                            socket_ring=list(range(n)))
    ring = posed.vertices[toy_model.wrist_ring]
    assert np.abs(placed.vertices[:n] - ring).max() < 2e-3


def test_flat_roundtrip(toy_model, rng):
    pose = _random_pose(toy_model, rng)
    again = pose_from_flat(pose.flat(), pose.global_translation)
    assert np.array_equal(again.global_orient, pose.global_orient)
    assert np.array_equal(again.joint_rotations, pose.joint_rotations)
