"""End-to-end scene generation: sample -> pose -> attach -> render two views
-> composite -> fuse depth -> write, parallel over scenes.

Every scene is a pure function of (config, master seed, scene id), so worker
count and scheduling order never change the produced bytes. A failing scene
removes its partial directory and aborts the run with the scene id and seed
in the message for replay.
"""

import os
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assets import load_asset_pack, make_toy_assets
from .composite import bbox_from_mask, composite_rgb, crop_and_resize, fuse_depth
from .dataset import SampleRecord, write_manifest, write_sample
from .errors import ConfigError
from .hand import HandShape, attach_forearm, export_keypoints, pose_from_flat, pose_mesh
from .interact import place_object
from .objmesh import TriMesh
from .render import (INSTANCE_FOREARM, INSTANCE_HAND, INSTANCE_OBJECT,
                     Material, RenderConfig, SceneNode, project_points, rasterize)
from .rotation import invert_rigid
from .sampling import SamplerConfig, apply_texture_jitter, sample_scene

_OBJECT_ALBEDO = (0.58, 0.44, 0.30)


@dataclass
class GenerationConfig:
    out_dir: str
    n_scenes: int = 4
    seed: int = 0
    branch: str = "single"                      # "single" | "interact"
    assets: dict = field(default_factory=lambda: {"kind": "toy", "seed": 0})
    resolution: tuple = (256, 256)              # (W, H)
    supersample: int = 2
    workers: int = 1
    bbox_pad: int = 0
    store_vertices: bool = True
    use_pose_correctives: bool = False
    sampler: SamplerConfig = None

    def __post_init__(self):
        if self.branch not in ("single", "interact"):
            raise ConfigError(f"branch must be single|interact, got {self.branch!r}")
        if self.n_scenes < 1:
            raise ConfigError("n_scenes must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.sampler is None:
            self.sampler = SamplerConfig(resolution=tuple(self.resolution))
        else:
            self.sampler.resolution = tuple(self.resolution)


def load_pack(assets_cfg):
    """Resolve the config's assets block into (pack, model)."""
    kind = assets_cfg.get("kind")
    if kind == "toy":
        pack, model = make_toy_assets(int(assets_cfg.get("seed", 0)))
    elif kind == "pack":
        pack = load_asset_pack(assets_cfg["path"])
        model = pack.model
    else:
        raise ConfigError(f"assets.kind must be toy|pack, got {kind!r}")
    if model is None:
        raise ConfigError("asset pack carries no hand model")
    return pack, model


def build_scene(pack, model, spec, config):
    """Assemble world-space scene nodes for one SceneSpec.

    Returns (nodes, posed hand). Deterministic given (pack, spec).
    """
    hand_texture = apply_texture_jitter(pack.texture_bank[spec.texture_idx],
                                        spec.hue_shift, spec.sat_scale)
    arm_texture = pack.arm_texture_bank[spec.arm_texture_idx]

    shape = HandShape(spec.beta)
    pose = pose_from_flat(spec.theta)
    posed = pose_mesh(model, shape, pose,
                      use_pose_correctives=config.use_pose_correctives)

    nodes = [SceneNode(TriMesh(posed.vertices, model.faces, model.uv.astype(np.float64)),
                       Material(texture=hand_texture), INSTANCE_HAND)]
    if config.sampler.include_forearm:
        forearm = attach_forearm(model, posed)
        nodes.append(SceneNode(forearm, Material(texture=arm_texture), INSTANCE_FOREARM))
    if spec.grasp_idx is not None:
        grasp = pack.grasp_pack[spec.grasp_idx]
        placed = place_object(pack.objects[grasp.object_mesh_ref], posed.wrist_frame,
                              grasp.object_to_wrist)
        nodes.append(SceneNode(placed, Material(albedo=_OBJECT_ALBEDO), INSTANCE_OBJECT))
    return nodes, posed


def render_view(pack, model, spec, nodes, posed, view, config):
    """Render one camera of a scene and package the annotated SampleRecord."""
    camera = spec.cameras[view]
    fg = rasterize(nodes, camera, spec.lights,
                   RenderConfig(supersample=config.supersample))

    bg = pack.background_pack[spec.background_idx]
    w, h = camera.resolution
    bg_rgb = crop_and_resize(bg.image, spec.crop, w, h, "bilinear")
    bg_depth = crop_and_resize(bg.depth, spec.crop, w, h, "nearest")

    rgb = composite_rgb(fg, bg_rgb)
    depth = fuse_depth(fg, bg_depth)
    bbox = bbox_from_mask(fg.mask, pad=config.bbox_pad)

    keypoints_world = export_keypoints(model, posed)
    cam_from_world = invert_rigid(camera.world_from_camera)
    joints_cam = keypoints_world @ cam_from_world[:3, :3].T + cam_from_world[:3, 3]
    joints_2d = project_points(camera, keypoints_world)[:, :2]
    vertices_cam = None
    if config.store_vertices:
        vertices_cam = posed.vertices @ cam_from_world[:3, :3].T + cam_from_world[:3, 3]

    sample_id = f"scene_{spec.scene_id:08d}/view_{view}"
    sampling_meta = {
        "scene_id": spec.scene_id,
        "view": view,
        "branch": spec.branch,
        "fov_y": camera.fov_y,
        "cam_distance": float(np.linalg.norm(camera.position)),
        "n_lights": len(spec.lights),
        "background_idx": spec.background_idx,
        "background_kind": bg.kind,
        "crop": [spec.crop.x, spec.crop.y, spec.crop.w, spec.crop.h],
        "texture_idx": spec.texture_idx,
        "hue_shift": spec.hue_shift,
        "sat_scale": spec.sat_scale,
        "arm_texture_idx": spec.arm_texture_idx,
        "shape_idx": spec.shape_idx,
        "grasp_idx": spec.grasp_idx,
        "mask_coverage": float((fg.mask > 0).mean()),
    }
    theta = spec.theta
    return SampleRecord(
        sample_id=sample_id,
        rgb=np.clip(np.round(rgb * 255.0), 0, 255).astype(np.uint8),
        depth=depth,
        mask=fg.mask,
        bbox=bbox,
        fx=camera.fx, fy=camera.fy, cx=camera.cx, cy=camera.cy,
        world_from_camera=camera.world_from_camera,
        beta=np.asarray(spec.beta, dtype=np.float64),
        global_orient=theta[:3],
        joint_rotations=theta[3:].reshape(-1, 3),
        translation=np.zeros(3),
        joints_3d=joints_cam,
        joints_2d=joints_2d,
        vertices_3d=vertices_cam,
        sampling=sampling_meta,
    )


def generate_scene(pack, model, config, scene_id):
    """Sample, render, and write both views of one scene; returns sample ids."""
    scene_dir = os.path.join(config.out_dir, f"scene_{scene_id:08d}")
    try:
        spec = sample_scene(pack, config.seed, scene_id, config.sampler,
                            branch=config.branch)
        nodes, posed = build_scene(pack, model, spec, config)
        ids = []
        for view in range(len(spec.cameras)):
            record = render_view(pack, model, spec, nodes, posed, view, config)
            write_sample(record, config.out_dir)
            ids.append(record.sample_id)
        return ids
    except Exception as exc:
        shutil.rmtree(scene_dir, ignore_errors=True)
        raise RuntimeError(
            f"scene {scene_id} failed (master seed {config.seed}; replay with "
            f"this seed and scene id): {exc}") from exc


_WORKER_STATE = {}


def _worker_init(config):
    _WORKER_STATE["config"] = config
    _WORKER_STATE["pack"], _WORKER_STATE["model"] = load_pack(config.assets)


def _worker_run(scene_id):
    return generate_scene(_WORKER_STATE["pack"], _WORKER_STATE["model"],
                          _WORKER_STATE["config"], scene_id)


def generate_dataset(config):
    """Generate the full dataset described by ``config``; returns the manifest."""
    os.makedirs(config.out_dir, exist_ok=True)
    if os.path.isfile(os.path.join(config.out_dir, "manifest.json")):
        raise ConfigError(f"{config.out_dir} already holds a dataset")

    scene_ids = list(range(config.n_scenes))
    if config.workers == 1:
        pack, model = load_pack(config.assets)
        for sid in scene_ids:
            generate_scene(pack, model, config, sid)
    else:
        with ProcessPoolExecutor(max_workers=config.workers,
                                 initializer=_worker_init,
                                 initargs=(config,)) as pool:
            for _ in pool.map(_worker_run, scene_ids):
                pass
    return write_manifest(config.out_dir)


# ---------------------------------------------------------------------------
# dataset statistics

def dataset_stats(dataset_dir):
    """Summaries over the stored per-sample metadata (for the stats command)."""
    from .dataset import load_manifest, read_sample

    manifest = load_manifest(dataset_dir)
    sample_ids = sorted(manifest["samples"])
    views_per_scene = {}
    branches = {}
    light_counts = {}
    fovs = []
    distances = []
    coverages = []
    for sid in sample_ids:
        meta = read_sample(dataset_dir, sid).sampling
        scene = sid.split("/")[0]
        views_per_scene[scene] = views_per_scene.get(scene, 0) + 1
        branches[meta["branch"]] = branches.get(meta["branch"], 0) + 1
        light_counts[meta["n_lights"]] = light_counts.get(meta["n_lights"], 0) + 1
        fovs.append(meta["fov_y"])
        distances.append(meta["cam_distance"])
        coverages.append(meta["mask_coverage"])

    def histogram(values, n_bins=8):
        counts, edges = np.histogram(np.asarray(values), bins=n_bins)
        return [{"lo": float(edges[i]), "hi": float(edges[i + 1]),
                 "count": int(counts[i])} for i in range(n_bins)]

    return {
        "n_scenes": manifest["n_scenes"],
        "n_samples": manifest["n_samples"],
        "views_per_scene": {"min": min(views_per_scene.values()),
                            "max": max(views_per_scene.values())},
        "branches": branches,
        "light_count_histogram": {str(k): light_counts[k] for k in sorted(light_counts)},
        "fov_deg": {"min": float(np.degrees(min(fovs))),
                    "max": float(np.degrees(max(fovs))),
                    "histogram": histogram(np.degrees(fovs))},
        "cam_distance_m": {"min": float(min(distances)),
                           "max": float(max(distances)),
                           "mean": float(np.mean(distances)),
                           "histogram": histogram(distances)},
        "mask_coverage": {"min": float(min(coverages)),
                          "mean": float(np.mean(coverages)),
                          "max": float(max(coverages))},
    }
