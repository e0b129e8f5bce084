"""Build the procedural toy asset pack, pose the hand, and render a turntable.

Everything here runs offline with zero downloads: the toy pack stands in for
licensed hand-model and texture assets while exercising the identical code
paths. Output images land in demos/out/.
"""

import math
import os

import numpy as np
from PIL import Image

import handsynth as hs
from handsynth.objmesh import TriMesh
from handsynth.render import INSTANCE_FOREARM, INSTANCE_HAND, Material, SceneNode
from handsynth.sampling import LightSpec, look_at_camera

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

pack, model = hs.make_toy_assets(seed=0)
print(f"toy hand: {model.n_vertices} vertices, {len(model.faces)} faces, "
      f"{model.n_joints} joints, {model.n_shape_params} shape blendshapes")
print(f"banks: {len(pack.pose_bank)} poses, {len(pack.texture_bank)} hand textures, "
      f"{len(pack.background_pack)} backgrounds, {len(pack.grasp_pack)} grasps")

# write the pack to disk and load it back: the on-disk form is the neutral
# container every external asset is converted into
pack_dir = os.path.join(OUT, "toy_pack")
hs.write_asset_pack(pack, pack_dir)
reloaded = hs.load_asset_pack(pack_dir)
print(f"pack round trip ok: {len(reloaded.texture_bank)} textures reloaded")

# pose the hand with a bank pose and attach the forearm
shape = hs.HandShape(pack.shape_bank[3])
pose = hs.pose_from_flat(pack.pose_bank[5])
posed = hs.pose_mesh(model, shape, pose)
forearm = hs.attach_forearm(model, posed)
keypoints = hs.export_keypoints(model, posed)
print(f"posed hand spans {np.ptp(posed.vertices, axis=0).round(3)} m, "
      f"{len(keypoints)} exported keypoints")

nodes = [
    SceneNode(TriMesh(posed.vertices, model.faces, model.uv.astype(np.float64)),
              Material(texture=pack.texture_bank[0]), INSTANCE_HAND),
    SceneNode(forearm, Material(texture=pack.arm_texture_bank[2]), INSTANCE_FOREARM),
]
lights = [LightSpec("ambient", np.array([1.0, 0.95, 0.9]), 0.35),
          LightSpec("point", np.ones(3), 0.9, position=np.array([0.4, -0.3, 0.8])),
          LightSpec("directional", np.array([0.8, 0.85, 1.0]), 0.3,
                    direction=np.array([-0.3, 0.5, -0.8]) / math.sqrt(0.98))]

for i, angle in enumerate(np.linspace(0.0, 2.0 * np.pi, 6, endpoint=False)):
    eye = (0.55 * math.sin(angle), -0.1, 0.55 * math.cos(angle))
    cam = look_at_camera(eye, math.radians(35.0), (320, 320))
    out = hs.rasterize(nodes, cam, lights)
    Image.fromarray((out.rgb * 255).astype(np.uint8)).save(
        os.path.join(OUT, f"turntable_{i}.png"))
print(f"wrote 6 turntable frames to {OUT}")
