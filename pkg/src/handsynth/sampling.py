"""Seeded randomization of every scene factor: shape, pose, texture, camera,
lights, background crop.

Reproducibility model: each scene factor draws from its own RNG stream keyed
by (master_seed, scene_id, factor_tag), so a SceneSpec is a pure function of
(master_seed, scene_id) regardless of worker count or generation order.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyBank, EmptyPool, SourceTooSmall
from .hand import HandPose, HandShape, pose_from_flat
from .rotation import axis_angle_to_quat, quat_slerp, quat_to_axis_angle

# fixed factor tags; never reorder (part of the reproducibility contract)
_FACTOR = {"shape": 1, "pose": 2, "texture": 3, "arm_texture": 4,
           "background": 5, "lights": 6, "camera0": 7, "camera1": 8, "grasp": 9}


def factor_rng(master_seed, scene_id, factor):
    """Independent generator for one scene factor."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=(int(master_seed), int(scene_id), _FACTOR[factor])))


@dataclass
class SamplerConfig:
    resolution: tuple = (256, 256)            # (W, H)
    fov_range: tuple = (math.radians(30.0), math.radians(40.0))
    distance_means: tuple = (0.6, 0.7, 1.0)   # meters
    distance_std: float = 0.1
    distance_floor: float = 0.2
    hue_range: float = 0.08                   # turns
    sat_range: float = 0.3
    vivid_prob: float = 0.3
    pose_source: str = "bank"                 # "bank" | "interpolate"
    include_forearm: bool = True


@dataclass
class CameraSpec:
    fov_y: float
    resolution: tuple                 # (W, H)
    world_from_camera: np.ndarray     # (4, 4)
    fx: float
    fy: float
    cx: float
    cy: float

    @property
    def position(self):
        return self.world_from_camera[:3, 3]


def make_camera(fov_y, resolution, world_from_camera):
    """CameraSpec with intrinsics derived from the vertical field of view."""
    w, h = resolution
    f = (h / 2.0) / math.tan(fov_y / 2.0)
    return CameraSpec(fov_y=float(fov_y), resolution=(int(w), int(h)),
                      world_from_camera=np.asarray(world_from_camera, dtype=np.float64),
                      fx=f, fy=f, cx=w / 2.0, cy=h / 2.0)


def look_at_camera(position, fov_y, resolution, roll=0.0, target=(0.0, 0.0, 0.0)):
    """Camera at ``position`` looking at ``target`` (camera looks down +z)."""
    position = np.asarray(position, dtype=np.float64)
    fwd = np.asarray(target, dtype=np.float64) - position
    fwd = fwd / np.linalg.norm(fwd)
    ref = np.array([0.0, 0.0, 1.0]) if abs(fwd[2]) <= 0.999 else np.array([1.0, 0.0, 0.0])
    x0 = np.cross(ref, fwd)
    x0 /= np.linalg.norm(x0)
    y0 = np.cross(fwd, x0)
    c, s = math.cos(roll), math.sin(roll)
    x = c * x0 + s * y0
    y = -s * x0 + c * y0
    world_from_cam = np.eye(4)
    world_from_cam[:3, 0], world_from_cam[:3, 1], world_from_cam[:3, 2] = x, y, fwd
    world_from_cam[:3, 3] = position
    return make_camera(fov_y, resolution, world_from_cam)


@dataclass
class LightSpec:
    kind: str                 # "ambient" | "point" | "directional" | "spot"
    color: np.ndarray         # RGB in [0, 1]
    intensity: float
    position: Optional[np.ndarray] = None
    direction: Optional[np.ndarray] = None
    cone_angle: Optional[float] = None


@dataclass
class CropRect:
    x: int
    y: int
    w: int
    h: int


@dataclass
class SceneSpec:
    scene_id: int
    seed: int
    branch: str                       # "single" | "interact"
    beta: np.ndarray
    theta: np.ndarray                 # (J*3,) axis-angle row
    shape_idx: Optional[int]
    texture_idx: int
    hue_shift: float
    sat_scale: float
    arm_texture_idx: int
    background_idx: int
    crop: CropRect
    lights: list
    cameras: list                     # exactly 2 CameraSpec
    grasp_idx: Optional[int] = None


# ---------------------------------------------------------------------------
# per-factor samplers

def sample_shape(bank, rng):
    """Uniform draw of one row of the shape bank."""
    if bank is None or len(bank) == 0:
        raise EmptyBank("shape bank is empty")
    idx = int(rng.integers(len(bank)))
    return idx, HandShape(np.asarray(bank[idx], dtype=np.float64))


def interpolate_poses(theta_a, theta_b, t):
    """Blend two (J*3,) pose rows: per-joint quaternion slerp.

    Endpoints are returned exactly (t=0 -> a, t=1 -> b).
    """
    a = np.asarray(theta_a, dtype=np.float64).reshape(-1, 3)
    b = np.asarray(theta_b, dtype=np.float64).reshape(-1, 3)
    if t == 0.0:
        return a.reshape(-1).copy()
    if t == 1.0:
        return b.reshape(-1).copy()
    q = quat_slerp(axis_angle_to_quat(a), axis_angle_to_quat(b), t)
    return quat_to_axis_angle(q).reshape(-1)


def sample_pose(bank, rng, source="bank"):
    """Draw a pose row, or blend two rows at a uniform random parameter."""
    if bank is None or len(bank) == 0:
        raise EmptyBank("pose bank is empty")
    if source == "bank":
        idx = int(rng.integers(len(bank)))
        return pose_from_flat(bank[idx])
    if source == "interpolate":
        if len(bank) < 2:
            raise EmptyBank("pose interpolation needs at least 2 bank entries")
        i, j = rng.integers(len(bank), size=2)
        t = float(rng.uniform())
        return pose_from_flat(interpolate_poses(bank[int(i)], bank[int(j)], t))
    raise ValueError(f"unknown pose source {source!r}")


def sample_camera(rng, config):
    """Random viewpoint: fov ~ U[range], distance from an equal-weight Gaussian
    mixture (resampled below the floor), look-at the origin with uniform roll."""
    fov = float(rng.uniform(*config.fov_range))
    mean = config.distance_means[int(rng.integers(len(config.distance_means)))]
    dist = float(rng.normal(mean, config.distance_std))
    while dist < config.distance_floor:
        dist = float(rng.normal(mean, config.distance_std))
    direction = rng.normal(size=3)
    while np.linalg.norm(direction) < 1e-9:
        direction = rng.normal(size=3)
    direction = direction / np.linalg.norm(direction)
    roll = float(rng.uniform(0.0, 2.0 * np.pi))
    return look_at_camera(dist * direction, fov, config.resolution, roll=roll)


def _vivid_color(rng):
    h = float(rng.uniform())
    s = float(rng.uniform(0.7, 1.0))
    return hsv_to_rgb(np.array([[[h, s, 1.0]]]))[0, 0]


def _warm_white(rng):
    return np.array([1.0, float(rng.uniform(0.88, 0.97)), float(rng.uniform(0.75, 0.92))])


def _unit_vector(rng):
    v = rng.normal(size=3)
    while np.linalg.norm(v) < 1e-9:
        v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def sample_lights(rng, background_mean_rgb, config=None):
    """One ambient light tinted like the background plus 0..4 extra lights."""
    config = config or SamplerConfig()
    mean = np.asarray(background_mean_rgb, dtype=np.float64)
    peak = float(mean.max())
    ambient_color = mean / peak if peak > 0.0 else np.ones(3)
    lights = [LightSpec("ambient", ambient_color, float(rng.uniform(0.2, 0.6)))]
    extra = int(rng.integers(0, 5))
    for _ in range(extra):
        kind = ("point", "directional", "spot")[int(rng.integers(3))]
        color = _vivid_color(rng) if rng.uniform() < config.vivid_prob else _warm_white(rng)
        if kind == "point":
            lights.append(LightSpec(kind, color, float(rng.uniform(0.3, 1.2)),
                                    position=_unit_vector(rng) * float(rng.uniform(0.4, 1.5))))
        elif kind == "directional":
            lights.append(LightSpec(kind, color, float(rng.uniform(0.2, 0.8)),
                                    direction=_unit_vector(rng)))
        else:
            pos = _unit_vector(rng) * float(rng.uniform(0.4, 1.5))
            aim = rng.normal(0.0, 0.05, size=3) - pos
            lights.append(LightSpec(kind, color, float(rng.uniform(0.5, 1.5)),
                                    position=pos, direction=aim / np.linalg.norm(aim),
                                    cone_angle=float(rng.uniform(math.radians(15),
                                                                 math.radians(40)))))
    return lights


def sample_background(pool, rng, resolution):
    """Pick a background and an in-bounds crop matching the render aspect."""
    if not pool:
        raise EmptyPool("background pool is empty")
    idx = int(rng.integers(len(pool)))
    src_h, src_w = pool[idx].image.shape[:2]
    render_w, render_h = resolution
    aspect = render_w / render_h
    h_max = min(src_h, int(math.floor(src_w / aspect)))
    if h_max < 2:
        raise SourceTooSmall(f"background {idx} ({src_w}x{src_h}) too small "
                             f"for aspect {aspect:.3f}")
    h_min = max(2, min(render_h, h_max))
    h = int(rng.integers(h_min, h_max + 1))
    w = max(1, min(src_w, int(round(h * aspect))))
    x = int(rng.integers(0, src_w - w + 1))
    y = int(rng.integers(0, src_h - h + 1))
    return idx, CropRect(x, y, w, h)


# ---------------------------------------------------------------------------
# texture jitter (hue/saturation in HSV space; hue measured in turns)

def rgb_to_hsv(rgb):
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = rgb.max(axis=-1)
    minc = rgb.min(axis=-1)
    delta = maxc - minc
    s = np.where(maxc > 0.0, delta / np.where(maxc > 0.0, maxc, 1.0), 0.0)
    dz = np.where(delta > 0.0, delta, 1.0)
    h = np.select(
        [delta == 0.0, maxc == r, maxc == g],
        [0.0,
         ((g - b) / dz) % 6.0,
         (b - r) / dz + 2.0,
         ],
        default=(r - g) / dz + 4.0) / 6.0
    return np.stack([h % 1.0, s, maxc], axis=-1)


def hsv_to_rgb(hsv):
    hsv = np.asarray(hsv, dtype=np.float64)
    h, s, v = hsv[..., 0] % 1.0, hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(int) % 6
    choices = [np.stack(c, axis=-1) for c in
               [(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)]]
    return np.select([i[..., None] == k for k in range(6)], choices)


def apply_texture_jitter(texture, hue_shift, sat_scale):
    """Shift hue (turns) and scale saturation; identity jitter is bitwise lossless."""
    if hue_shift == 0.0 and sat_scale == 1.0:
        return texture.copy()
    hsv = rgb_to_hsv(texture)
    hsv[..., 0] = (hsv[..., 0] + hue_shift) % 1.0
    hsv[..., 1] = np.clip(hsv[..., 1] * sat_scale, 0.0, 1.0)
    return hsv_to_rgb(hsv).astype(texture.dtype)


def sample_texture_jitter(rng, config):
    hue = float(rng.uniform(-config.hue_range, config.hue_range))
    sat = float(rng.uniform(1.0 - config.sat_range, 1.0 + config.sat_range))
    return hue, sat


def perturb_texture(texture, rng, config=None):
    """Randomized hue/saturation perturbation of a [0,1] RGB texture."""
    config = config or SamplerConfig()
    hue, sat = sample_texture_jitter(rng, config)
    return apply_texture_jitter(texture, hue, sat)


# ---------------------------------------------------------------------------
# whole-scene sampling

def sample_scene(pack, master_seed, scene_id, config=None, branch="single"):
    """Sample the full SceneSpec for one scene id. Pure in (seed, id)."""
    config = config or SamplerConfig()

    grasp_idx = None
    shape_idx = None
    if branch == "interact":
        if not pack.grasp_pack:
            raise EmptyBank("interact branch needs a nonempty grasp pack")
        rng = factor_rng(master_seed, scene_id, "grasp")
        grasp_idx = int(rng.integers(len(pack.grasp_pack)))
        grasp = pack.grasp_pack[grasp_idx]
        beta = np.asarray(grasp.hand_shape, dtype=np.float64)
        theta = np.asarray(grasp.hand_pose, dtype=np.float64)
    elif branch == "single":
        shape_idx, shape = sample_shape(pack.shape_bank, factor_rng(master_seed, scene_id, "shape"))
        beta = shape.beta
        pose = sample_pose(pack.pose_bank, factor_rng(master_seed, scene_id, "pose"),
                           source=config.pose_source)
        theta = pose.flat()
    else:
        raise ValueError(f"unknown branch {branch!r}")

    rng_tex = factor_rng(master_seed, scene_id, "texture")
    if not pack.texture_bank:
        raise EmptyBank("texture bank is empty")
    texture_idx = int(rng_tex.integers(len(pack.texture_bank)))
    hue, sat = sample_texture_jitter(rng_tex, config)

    if not pack.arm_texture_bank:
        raise EmptyBank("arm texture bank is empty")
    arm_idx = int(factor_rng(master_seed, scene_id, "arm_texture")
                  .integers(len(pack.arm_texture_bank)))

    bg_idx, crop = sample_background(pack.background_pack,
                                     factor_rng(master_seed, scene_id, "background"),
                                     config.resolution)
    bg = pack.background_pack[bg_idx]
    crop_mean = bg.image[crop.y:crop.y + crop.h, crop.x:crop.x + crop.w].mean(axis=(0, 1))

    lights = sample_lights(factor_rng(master_seed, scene_id, "lights"), crop_mean, config)
    cameras = [sample_camera(factor_rng(master_seed, scene_id, "camera0"), config),
               sample_camera(factor_rng(master_seed, scene_id, "camera1"), config)]

    return SceneSpec(scene_id=scene_id, seed=master_seed, branch=branch,
                     beta=beta, theta=theta, shape_idx=shape_idx,
                     texture_idx=texture_idx, hue_shift=hue, sat_scale=sat,
                     arm_texture_idx=arm_idx, background_idx=bg_idx, crop=crop,
                     lights=lights, cameras=cameras, grasp_idx=grasp_idx)
