"""Hand-object interaction scenes: object placement from grasp records and
joint assembly with the hand/forearm so mutual occlusions render naturally.
"""

import numpy as np

from .errors import UnresolvedReference
from .hand import HandShape, attach_forearm, pose_from_flat, pose_mesh
from .objmesh import TriMesh, load_object_mesh  # re-exported OBJ loader
from .render import (INSTANCE_FOREARM, INSTANCE_HAND, INSTANCE_OBJECT,
                     Material, SceneNode)

__all__ = ["load_object_mesh", "TriMesh", "place_object", "assemble_interaction_scene"]

_OBJECT_ALBEDO = (0.58, 0.44, 0.30)


def place_object(mesh, wrist_frame, object_to_wrist):
    """Rigidly place an object mesh: world = wrist_frame . object_to_wrist."""
    t = np.asarray(wrist_frame, dtype=np.float64) @ np.asarray(object_to_wrist,
                                                               dtype=np.float64)
    placed = mesh.copy()
    placed.vertices = np.asarray(placed.vertices, dtype=np.float64) @ t[:3, :3].T + t[:3, 3]
    return placed


def assemble_interaction_scene(model, pack, grasp, hand_texture, arm_texture=None,
                               include_forearm=True, use_pose_correctives=False):
    """Build scene nodes for one grasp: posed hand (+forearm) and the object.

    The hand is posed from the grasp's shape/pose parameters; the object sits
    at wrist_frame . object_to_wrist. Instance ids: hand=1, forearm=2,
    object=3.

    Returns:
        (scene nodes list, PosedHand).
    """
    if grasp.object_mesh_ref not in pack.objects:
        raise UnresolvedReference(f"object {grasp.object_mesh_ref!r} not in pack")
    shape = HandShape(np.asarray(grasp.hand_shape, dtype=np.float64))
    pose = pose_from_flat(grasp.hand_pose)
    posed = pose_mesh(model, shape, pose, use_pose_correctives=use_pose_correctives)

    nodes = [SceneNode(TriMesh(posed.vertices, model.faces, model.uv.astype(np.float64)),
                       Material(texture=hand_texture), INSTANCE_HAND)]
    if include_forearm:
        forearm = attach_forearm(model, posed)
        nodes.append(SceneNode(forearm, Material(texture=arm_texture), INSTANCE_FOREARM))
    placed = place_object(pack.objects[grasp.object_mesh_ref], posed.wrist_frame,
                          grasp.object_to_wrist)
    nodes.append(SceneNode(placed, Material(texture=None, albedo=_OBJECT_ALBEDO),
                           INSTANCE_OBJECT))
    return nodes, posed
