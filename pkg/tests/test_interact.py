import math

import numpy as np
import pytest

from handsynth import assemble_interaction_scene, load_object_mesh, place_object
from handsynth.assets import GraspRecord
from handsynth.errors import DegenerateMesh, ParseError, UnresolvedReference
from handsynth.render import rasterize
from handsynth.rotation import axis_angle_to_matrix, make_transform
from handsynth.sampling import LightSpec, look_at_camera

AMBIENT = [LightSpec("ambient", np.ones(3), 0.6)]

CUBE_OBJ = """v -0.5 -0.5 -0.5
v -0.5 -0.5 0.5
v -0.5 0.5 -0.5
v -0.5 0.5 0.5
v 0.5 -0.5 -0.5
v 0.5 -0.5 0.5
v 0.5 0.5 -0.5
v 0.5 0.5 0.5
f 1 2 4 3
f 5 7 8 6
f 1 5 6 2
f 3 4 8 7
f 1 3 7 5
f 2 6 8 4
"""


def test_unit_cube_fixture(tmp_path):
    path = tmp_path / "cube.obj"
    path.write_text(CUBE_OBJ)
    mesh = load_object_mesh(str(path))
    assert len(mesh.vertices) == 8
    assert len(mesh.faces) == 12
    assert mesh.uv is None


def test_quads_split_two_to_one(tmp_path):
    path = tmp_path / "quads.obj"
    path.write_text(CUBE_OBJ)
    mesh = load_object_mesh(str(path))
    assert len(mesh.faces) == 2 * CUBE_OBJ.count("f ")


def test_empty_obj(tmp_path):
    path = tmp_path / "empty.obj"
    path.write_text("")
    with pytest.raises(DegenerateMesh):
        load_object_mesh(str(path))


def test_malformed_obj(tmp_path):
    path = tmp_path / "bad.obj"
    path.write_text("v 0 0 zero\nf 1 2 3\n")
    with pytest.raises(ParseError):
        load_object_mesh(str(path))


def test_obj_with_uv_splits_conflicts(tmp_path):
    path = tmp_path / "uv.obj"
    path.write_text(
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\n"
        "vt 0 0\nvt 1 0\nvt 0 1\nvt 1 1\n"
        "f 1/1 2/2 3/3\n"
        "f 2/4 4/4 3/3\n")  # vertex 2 reused with a different vt -> split
    mesh = load_object_mesh(str(path))
    assert len(mesh.vertices) == 5
    assert mesh.uv.shape == (5, 2)


def test_identity_grasp_places_object_at_wrist(toy_pack):
    cube = toy_pack.objects["cube"]
    wrist = make_transform(axis_angle_to_matrix([0.2, 0.4, -0.1]), [0.1, 0.2, 0.3])
    placed = place_object(cube, wrist, np.eye(4))
    expect = cube.vertices @ wrist[:3, :3].T + wrist[:3, 3]
    assert np.abs(placed.vertices - expect).max() < 1e-12


def test_object_follows_hand_rigidly(toy_pack, toy_model):
    grasp = toy_pack.grasp_pack[0]
    theta = grasp.hand_pose.copy().astype(np.float64)
    theta[:3] = 0.0  # zero global orient as the reference
    base_nodes, base_posed = assemble_interaction_scene(
        toy_model, toy_pack, GraspRecord(grasp.hand_shape, theta,
                                         grasp.object_mesh_ref,
                                         grasp.object_to_wrist),
        toy_pack.texture_bank[0])
    aa = np.array([0.7, -0.3, 0.2])
    theta_rot = theta.copy()
    theta_rot[:3] = aa
    rot_nodes, rot_posed = assemble_interaction_scene(
        toy_model, toy_pack, GraspRecord(grasp.hand_shape, theta_rot,
                                         grasp.object_mesh_ref,
                                         grasp.object_to_wrist),
        toy_pack.texture_bank[0])
    # global orient acts about the origin: object vertices rotate by exactly R
    r = axis_angle_to_matrix(aa)
    assert np.abs(rot_nodes[-1].mesh.vertices
                  - base_nodes[-1].mesh.vertices @ r.T).max() < 1e-9
    # object vertices expressed in the wrist frame are invariant
    def in_wrist(posed, verts):
        inv = np.linalg.inv(posed.wrist_frame)
        return verts @ inv[:3, :3].T + inv[:3, 3]
    assert np.abs(in_wrist(base_posed, base_nodes[-1].mesh.vertices)
                  - in_wrist(rot_posed, rot_nodes[-1].mesh.vertices)).max() < 1e-9


def test_unresolved_object_reference(toy_pack, toy_model):
    grasp = toy_pack.grasp_pack[0]
    bad = GraspRecord(grasp.hand_shape, grasp.hand_pose, "missing-object",
                      grasp.object_to_wrist)
    with pytest.raises(UnresolvedReference):
        assemble_interaction_scene(toy_model, toy_pack, bad, toy_pack.texture_bank[0])


def test_interaction_render_has_hand_and_object(toy_pack, toy_model):
    cam = look_at_camera((0.0, 0.0, 0.45), math.radians(35.0), (128, 128))
    for grasp in toy_pack.grasp_pack:
        nodes, _ = assemble_interaction_scene(toy_model, toy_pack, grasp,
                                              toy_pack.texture_bank[0],
                                              toy_pack.arm_texture_bank[0])
        out = rasterize(nodes, cam, AMBIENT)
        labels = set(np.unique(out.mask))
        assert 1 in labels and 3 in labels


def test_object_occludes_hand(toy_pack, toy_model):
    """Pixels that are hand in the hand-only render become object pixels when
    the grasped object is added: occlusion actually occurs."""
    cam = look_at_camera((0.0, 0.0, 0.45), math.radians(35.0), (128, 128))
    grasp = toy_pack.grasp_pack[0]
    nodes, _ = assemble_interaction_scene(toy_model, toy_pack, grasp,
                                          toy_pack.texture_bank[0],
                                          toy_pack.arm_texture_bank[0])
    with_object = rasterize(nodes, cam, AMBIENT)
    without_object = rasterize(nodes[:-1], cam, AMBIENT)
    switched = (without_object.mask == 1) & (with_object.mask == 3)
    assert switched.sum() >= 1
