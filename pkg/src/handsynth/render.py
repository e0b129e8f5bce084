"""Reference z-buffered rasterizer: RGB + metric depth + instance mask.

Perspective-correct barycentric interpolation, Lambert diffuse + Blinn-Phong
specular shading, bilinear texture lookup, no back-face culling, no shadows.
RGB is supersampled and box-filtered; depth and mask are sampled at pixel
centers of the base grid so silhouette depths never mix foreground and
background.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BehindCamera, EmptyViewportWarning
from .rotation import invert_rigid

_NEAR = 1e-6  # meters; at or behind this plane a point has no projection

INSTANCE_HAND = 1
INSTANCE_FOREARM = 2
INSTANCE_OBJECT = 3


@dataclass
class Material:
    texture: Optional[np.ndarray] = None      # (Ht, Wt, 3) in [0, 1]
    albedo: tuple = (0.7, 0.7, 0.7)           # used when texture is None
    specular: float = 0.04
    shininess: float = 32.0


@dataclass
class SceneNode:
    mesh: object            # TriMesh
    material: Material
    instance_id: int


@dataclass
class RenderOutput:
    rgb: np.ndarray         # (H, W, 3) float32 in [0, 1]
    depth: np.ndarray       # (H, W) float32 meters, 0 where nothing was hit
    mask: np.ndarray        # (H, W) uint8 instance labels, 0 = background


@dataclass
class RenderConfig:
    supersample: int = 2


def project(camera, point):
    """World point -> (u, v, z_cam) pixels/meters under the pinhole model.

    Raises BehindCamera when the camera-space depth is <= 1e-6 m.
    """
    p = np.asarray(point, dtype=np.float64)
    cam = invert_rigid(camera.world_from_camera)
    x, y, z = cam[:3, :3] @ p + cam[:3, 3]
    if z <= _NEAR:
        raise BehindCamera(f"point at camera depth {z:.3e} m")
    return camera.cx + camera.fx * x / z, camera.cy + camera.fy * y / z, z


def project_points(camera, points):
    """Vectorized projection of (N, 3) world points -> (N, 3) of (u, v, z)."""
    cam = invert_rigid(camera.world_from_camera)
    p = np.asarray(points, dtype=np.float64) @ cam[:3, :3].T + cam[:3, 3]
    z = p[:, 2]
    if np.any(z <= _NEAR):
        raise BehindCamera("point(s) at or behind the camera plane")
    return np.stack([camera.cx + camera.fx * p[:, 0] / z,
                     camera.cy + camera.fy * p[:, 1] / z, z], axis=1)


def vertex_normals(vertices, faces):
    """Area-weighted smooth vertex normals; degenerate vertices get +z."""
    v = np.asarray(vertices, dtype=np.float64)
    f = np.asarray(faces)
    fn = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
    normals = np.zeros_like(v)
    for c in range(3):
        np.add.at(normals, f[:, c], fn)
    norm = np.linalg.norm(normals, axis=1, keepdims=True)
    bad = norm[:, 0] < 1e-20
    normals[bad] = (0.0, 0.0, 1.0)
    norm[bad] = 1.0
    return normals / norm


@dataclass
class _Prepared:
    node_index: int
    instance_id: int
    faces: np.ndarray
    world: np.ndarray
    cam_z: np.ndarray
    proj_uv: np.ndarray      # (V, 2) at the pass resolution
    normals: np.ndarray
    uv: Optional[np.ndarray]
    material: Material


class _Buffers:
    def __init__(self, w, h):
        self.z = np.full((h, w), np.inf)
        self.tri = np.full((h, w), -1, dtype=np.int32)
        self.node = np.full((h, w), -1, dtype=np.int16)
        self.bary = np.zeros((h, w, 3))
        self.w = w
        self.h = h


def _raster_pass(prepared, w, h, scale):
    """Rasterize all nodes into fresh buffers at ``scale`` x the base intrinsics."""
    buf = _Buffers(w, h)
    for prep in prepared:
        uvz = np.concatenate([prep.proj_uv * scale, prep.cam_z[:, None]], axis=1)
        for t_idx, face in enumerate(prep.faces):
            tri = uvz[face]
            if np.any(tri[:, 2] <= _NEAR):
                continue
            _raster_triangle(buf, tri, prep.node_index, t_idx)
    return buf


def _raster_triangle(buf, tri, node_idx, t_idx):
    (u0, v0, z0), (u1, v1, z1), (u2, v2, z2) = tri
    x_lo = max(0, int(np.ceil(min(u0, u1, u2) - 0.5)))
    x_hi = min(buf.w - 1, int(np.floor(max(u0, u1, u2) - 0.5)))
    y_lo = max(0, int(np.ceil(min(v0, v1, v2) - 0.5)))
    y_hi = min(buf.h - 1, int(np.floor(max(v0, v1, v2) - 0.5)))
    if x_lo > x_hi or y_lo > y_hi:
        return
    area = (u1 - u0) * (v2 - v0) - (v1 - v0) * (u2 - u0)
    if abs(area) < 1e-12:
        return
    px = np.arange(x_lo, x_hi + 1) + 0.5
    py = (np.arange(y_lo, y_hi + 1) + 0.5)[:, None]
    w0 = (u2 - u1) * (py - v1) - (v2 - v1) * (px - u1)
    w1 = (u0 - u2) * (py - v2) - (v0 - v2) * (px - u2)
    w2 = (u1 - u0) * (py - v0) - (v1 - v0) * (px - u0)
    if area > 0:
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
    else:
        inside = (w0 <= 0) & (w1 <= 0) & (w2 <= 0)
    if not inside.any():
        return
    l0, l1, l2 = w0 / area, w1 / area, w2 / area
    inv_z = l0 / z0 + l1 / z1 + l2 / z2
    z = 1.0 / inv_z
    zs = buf.z[y_lo:y_hi + 1, x_lo:x_hi + 1]
    win = inside & (z < zs)
    if not win.any():
        return
    zs[win] = z[win]
    buf.tri[y_lo:y_hi + 1, x_lo:x_hi + 1][win] = t_idx
    buf.node[y_lo:y_hi + 1, x_lo:x_hi + 1][win] = node_idx
    bary = buf.bary[y_lo:y_hi + 1, x_lo:x_hi + 1]
    zw = z[win]
    bary[win, 0] = l0[win] / z0 * zw
    bary[win, 1] = l1[win] / z1 * zw
    bary[win, 2] = l2[win] / z2 * zw


def _sample_texture(texture, uv):
    """Bilinear lookup; uv in [0,1] with v=0 at the bottom row, edges clamped."""
    th, tw = texture.shape[:2]
    x = np.clip(uv[:, 0], 0.0, 1.0) * (tw - 1)
    y = (1.0 - np.clip(uv[:, 1], 0.0, 1.0)) * (th - 1)
    x0 = np.floor(x).astype(int)
    y0 = np.floor(y).astype(int)
    x1 = np.minimum(x0 + 1, tw - 1)
    y1 = np.minimum(y0 + 1, th - 1)
    fx = (x - x0)[:, None]
    fy = (y - y0)[:, None]
    tex = texture.astype(np.float64)
    top = tex[y0, x0] * (1 - fx) + tex[y0, x1] * fx
    bot = tex[y1, x0] * (1 - fx) + tex[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def _shade(buf, prepared, lights, cam_pos):
    """Deferred shading of every hit pixel in a raster pass."""
    rgb = np.zeros((buf.h, buf.w, 3))
    ambient = np.zeros(3)
    for light in lights:
        if light.kind == "ambient":
            ambient = ambient + np.asarray(light.color) * light.intensity

    for prep in prepared:
        sel = buf.node == prep.node_index
        if not sel.any():
            continue
        faces = prep.faces[buf.tri[sel]]
        b = buf.bary[sel]
        pos = np.einsum("nk,nkc->nc", b, prep.world[faces])
        n = np.einsum("nk,nkc->nc", b, prep.normals[faces])
        n /= np.maximum(np.linalg.norm(n, axis=1, keepdims=True), 1e-20)
        if prep.material.texture is not None and prep.uv is not None:
            uv = np.einsum("nk,nkc->nc", b, prep.uv[faces])
            albedo = _sample_texture(prep.material.texture, uv)
        else:
            albedo = np.broadcast_to(np.asarray(prep.material.albedo, dtype=np.float64),
                                     (len(pos), 3))
        view = cam_pos - pos
        view /= np.maximum(np.linalg.norm(view, axis=1, keepdims=True), 1e-20)
        # two-sided shading: normals face the camera
        flip = np.sum(n * view, axis=1) < 0.0
        n[flip] = -n[flip]

        out = albedo * ambient
        for light in lights:
            if light.kind == "ambient":
                continue
            if light.kind == "directional":
                l_dir = np.broadcast_to(-np.asarray(light.direction, dtype=np.float64),
                                        pos.shape)
                factor = 1.0
            else:
                l_dir = np.asarray(light.position, dtype=np.float64) - pos
                l_dir = l_dir / np.maximum(np.linalg.norm(l_dir, axis=1, keepdims=True),
                                           1e-20)
                if light.kind == "spot":
                    cos_cut = np.cos(light.cone_angle)
                    aim = np.asarray(light.direction, dtype=np.float64)
                    factor = (np.sum(-l_dir * aim, axis=1) >= cos_cut).astype(float)[:, None]
                else:
                    factor = 1.0
            diff = np.maximum(np.sum(n * l_dir, axis=1), 0.0)[:, None]
            half = l_dir + view
            half /= np.maximum(np.linalg.norm(half, axis=1, keepdims=True), 1e-20)
            spec = np.maximum(np.sum(n * half, axis=1), 0.0)[:, None] ** prep.material.shininess
            tint = np.asarray(light.color, dtype=np.float64) * light.intensity
            out = out + factor * (albedo * diff + prep.material.specular * spec) * tint
        rgb[sel] = out
    return rgb


def rasterize(scene, camera, lights, config=None):
    """Render a list of SceneNode under a pinhole camera.

    Returns RenderOutput; emits EmptyViewportWarning (mask all zero) when no
    triangle lands in the viewport.
    """
    config = config or RenderConfig()
    if not lights:
        raise ValueError("rasterize needs at least one light")
    w, h = camera.resolution
    ss = max(1, int(config.supersample))

    view = invert_rigid(camera.world_from_camera)
    prepared = []
    for i, node in enumerate(scene):
        verts = np.asarray(node.mesh.vertices, dtype=np.float64)
        if not np.all(np.isfinite(verts)):
            raise ValueError(f"scene node {i}: non-finite vertices")
        cam_pts = verts @ view[:3, :3].T + view[:3, 3]
        z = cam_pts[:, 2]
        safe_z = np.where(z > _NEAR, z, 1.0)
        proj = np.stack([camera.cx + camera.fx * cam_pts[:, 0] / safe_z,
                         camera.cy + camera.fy * cam_pts[:, 1] / safe_z], axis=1)
        prepared.append(_Prepared(
            node_index=i, instance_id=node.instance_id,
            faces=np.asarray(node.mesh.faces, dtype=np.int64),
            world=verts, cam_z=z, proj_uv=proj,
            normals=vertex_normals(verts, node.mesh.faces),
            uv=None if node.mesh.uv is None else np.asarray(node.mesh.uv, dtype=np.float64),
            material=node.material))

    base = _raster_pass(prepared, w, h, 1.0)
    hit = base.node >= 0

    instance = np.array([p.instance_id for p in prepared], dtype=np.uint8) if prepared \
        else np.zeros(0, dtype=np.uint8)
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[hit] = instance[base.node[hit]]
    depth = np.where(hit, base.z, 0.0).astype(np.float32)

    cam_pos = camera.world_from_camera[:3, 3]
    base_rgb = _shade(base, prepared, lights, cam_pos)
    if ss > 1:
        hi = _raster_pass(prepared, w * ss, h * ss, float(ss))
        hi_rgb = _shade(hi, prepared, lights, cam_pos)
        hi_hit = (hi.node >= 0).reshape(h, ss, w, ss)
        counts = hi_hit.sum(axis=(1, 3))
        sums = (hi_rgb * (hi.node >= 0)[..., None]).reshape(h, ss, w, ss, 3).sum(axis=(1, 3))
        rgb = np.where((counts > 0)[..., None], sums / np.maximum(counts, 1)[..., None],
                       base_rgb)
    else:
        rgb = base_rgb
    rgb = np.where(hit[..., None], rgb, 0.0)
    rgb = np.clip(rgb, 0.0, 1.0).astype(np.float32)

    if not hit.any():
        warnings.warn("nothing rasterized into the viewport", EmptyViewportWarning)
    return RenderOutput(rgb=rgb, depth=depth, mask=mask)
