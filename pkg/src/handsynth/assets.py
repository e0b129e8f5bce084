"""Neutral asset-pack container: on-disk format, validation, and procedural toy assets.

A pack is a directory holding ``meta.json`` plus raw little-endian array
blobs (float32 / int32, row-major) and optional OBJ object meshes. Every
blob and object file carries a SHA-256 checksum in the meta. Loaded packs
are immutable by convention and safe to share across generation workers.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (ChecksumMismatch, InvalidAsset, InvalidWeights,
                     MissingBlob, ShapeMismatch, UnresolvedReference)
from .objmesh import TriMesh, load_object_mesh

_FLOAT = np.dtype("<f4")
_INT = np.dtype("<i4")

WEIGHT_ROW_TOL = 1e-5


@dataclass
class ModelAsset:
    """Rigged template hand.

    Shapes: V vertices, F faces, J joints, B_s shape blendshapes,
    B_p pose-corrective blendshapes (0 allowed).
    """
    template_vertices: np.ndarray   # (V, 3) meters
    faces: np.ndarray               # (F, 3) int
    skinning_weights: np.ndarray    # (V, J) in [0, 1]
    shape_blendshapes: np.ndarray   # (B_s, V, 3) meters per unit coefficient
    pose_blendshapes: np.ndarray    # (B_p, V, 3), may be empty
    joint_regressor: np.ndarray     # (J, V)
    parent: np.ndarray              # (J,), root = -1
    uv: np.ndarray                  # (V, 2) in [0, 1]
    wrist_ring: np.ndarray          # ordered boundary loop vertex ids
    fingertip_vertices: np.ndarray  # tip vertex ids appended to exported joints

    @property
    def n_vertices(self):
        return self.template_vertices.shape[0]

    @property
    def n_joints(self):
        return self.parent.shape[0]

    @property
    def n_shape_params(self):
        return self.shape_blendshapes.shape[0]


@dataclass
class Background:
    image: np.ndarray   # (H, W, 3) float in [0, 1]
    depth: np.ndarray   # (H, W) meters, 0 = invalid
    kind: str           # "indoor" | "envmap"


@dataclass
class GraspRecord:
    hand_shape: np.ndarray       # (B_s,)
    hand_pose: np.ndarray        # (J*3,) axis-angle, global orient first
    object_mesh_ref: str
    object_to_wrist: np.ndarray  # (4, 4) rigid


@dataclass
class AssetPack:
    model: Optional[ModelAsset] = None
    shape_bank: Optional[np.ndarray] = None       # (N_s, B_s)
    pose_bank: Optional[np.ndarray] = None        # (N_p, J*3)
    texture_bank: list = field(default_factory=list)
    arm_texture_bank: list = field(default_factory=list)
    background_pack: list = field(default_factory=list)
    grasp_pack: list = field(default_factory=list)
    objects: dict = field(default_factory=dict)   # id -> TriMesh


# ---------------------------------------------------------------------------
# validation

def validate_model(model):
    """Check the ModelAsset invariants, raising on the first violation."""
    v = model.template_vertices.shape[0]
    j = model.parent.shape[0]
    if model.faces.size and (model.faces.min() < 0 or model.faces.max() >= v):
        raise InvalidAsset("face indices out of vertex range")
    row_sums = model.skinning_weights.sum(axis=1)
    if np.any(np.abs(row_sums - 1.0) > WEIGHT_ROW_TOL):
        worst = float(np.abs(row_sums - 1.0).max())
        raise InvalidWeights(f"skinning-weight rows off unity by up to {worst:.2e}")
    reg_sums = model.joint_regressor.sum(axis=1)
    if np.any(np.abs(reg_sums - 1.0) > WEIGHT_ROW_TOL):
        worst = float(np.abs(reg_sums - 1.0).max())
        raise InvalidWeights(f"joint-regressor rows off unity by up to {worst:.2e}")
    roots = np.flatnonzero(model.parent < 0)
    if roots.size != 1:
        raise InvalidAsset(f"expected exactly one root joint, found {roots.size}")
    # acyclicity: walking parents from every joint must terminate at the root
    for start in range(j):
        seen = set()
        node = start
        while node >= 0:
            if node in seen or node >= j:
                raise InvalidAsset("kinematic tree has a cycle or bad index")
            seen.add(node)
            node = int(model.parent[node])
    if model.wrist_ring.size and (model.wrist_ring.min() < 0 or model.wrist_ring.max() >= v):
        raise InvalidAsset("wrist ring indices out of range")
    if model.fingertip_vertices.size and model.fingertip_vertices.max() >= v:
        raise InvalidAsset("fingertip vertex ids out of range")
    if model.pose_blendshapes.size and model.pose_blendshapes.shape[1] != v:
        raise ShapeMismatch("pose blendshapes vertex count mismatch")


def validate_pack(pack):
    """Cross-field pack invariants (resolution pairing, grasp transforms, refs)."""
    if pack.model is not None:
        validate_model(pack.model)
        j3 = pack.model.n_joints * 3
        if pack.pose_bank is not None and pack.pose_bank.size and pack.pose_bank.shape[1] != j3:
            raise ShapeMismatch(
                f"pose bank width {pack.pose_bank.shape[1]} != J*3 = {j3}")
        bs = pack.model.n_shape_params
        if pack.shape_bank is not None and pack.shape_bank.size and pack.shape_bank.shape[1] != bs:
            raise ShapeMismatch(
                f"shape bank width {pack.shape_bank.shape[1]} != B_s = {bs}")
    for i, bg in enumerate(pack.background_pack):
        if bg.image.shape[:2] != bg.depth.shape[:2]:
            raise ShapeMismatch(f"background {i}: image {bg.image.shape[:2]} vs "
                                f"depth {bg.depth.shape[:2]} resolution mismatch")
        if bg.kind not in ("indoor", "envmap"):
            raise InvalidAsset(f"background {i}: unknown kind {bg.kind!r}")
    for i, grasp in enumerate(pack.grasp_pack):
        r = grasp.object_to_wrist[:3, :3].astype(np.float64)
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-6) or abs(np.linalg.det(r) - 1.0) > 1e-6:
            raise InvalidAsset(f"grasp {i}: object_to_wrist rotation not orthonormal")
        if grasp.object_mesh_ref not in pack.objects:
            raise UnresolvedReference(
                f"grasp {i}: object {grasp.object_mesh_ref!r} not in pack")


# ---------------------------------------------------------------------------
# container io

def _sha256(data):
    return hashlib.sha256(data).hexdigest()


def _write_blob(root, name, array, dtype, entries):
    arr = np.ascontiguousarray(array, dtype=dtype)
    data = arr.tobytes()
    with open(os.path.join(root, name), "wb") as fh:
        fh.write(data)
    entries[name] = {
        "blob": name,
        "shape": list(arr.shape),
        "dtype": dtype.str,
        "sha256": _sha256(data),
    }
    return entries[name]


def _read_blob(root, entry):
    path = os.path.join(root, entry["blob"])
    if not os.path.isfile(path):
        raise MissingBlob(f"blob {entry['blob']} missing")
    with open(path, "rb") as fh:
        data = fh.read()
    dtype = np.dtype(entry["dtype"])
    shape = tuple(entry["shape"])
    expected = int(np.prod(shape)) * dtype.itemsize if shape else dtype.itemsize
    if len(data) != expected:
        raise ShapeMismatch(f"blob {entry['blob']}: {len(data)} bytes, "
                            f"declared shape {shape} needs {expected}")
    if _sha256(data) != entry["sha256"]:
        raise ChecksumMismatch(f"blob {entry['blob']}: checksum mismatch")
    return np.frombuffer(data, dtype=dtype).reshape(shape).copy()


_MODEL_FIELDS = [
    ("template_vertices", _FLOAT), ("faces", _INT), ("skinning_weights", _FLOAT),
    ("shape_blendshapes", _FLOAT), ("pose_blendshapes", _FLOAT),
    ("joint_regressor", _FLOAT), ("parent", _INT), ("uv", _FLOAT),
    ("wrist_ring", _INT), ("fingertip_vertices", _INT),
]


def write_asset_pack(pack, root):
    """Serialize a pack into ``root``. Rewriting an unmodified pack is byte-identical."""
    os.makedirs(root, exist_ok=True)
    meta = {"format": "hand-asset-pack", "version": 1}

    if pack.model is not None:
        entries = {}
        for name, dtype in _MODEL_FIELDS:
            _write_blob(root, f"model_{name}.bin", getattr(pack.model, name), dtype, entries)
        meta["model"] = {name: entries[f"model_{name}.bin"] for name, _ in _MODEL_FIELDS}

    banks = {}
    if pack.shape_bank is not None:
        banks["shape_bank"] = _write_blob(root, "shape_bank.bin", pack.shape_bank, _FLOAT, {})
    if pack.pose_bank is not None:
        banks["pose_bank"] = _write_blob(root, "pose_bank.bin", pack.pose_bank, _FLOAT, {})
    if banks:
        meta["banks"] = banks

    if pack.texture_bank:
        meta["textures"] = [_write_blob(root, f"texture_{i:05d}.bin", tex, _FLOAT, {})
                            for i, tex in enumerate(pack.texture_bank)]
    if pack.arm_texture_bank:
        meta["arm_textures"] = [_write_blob(root, f"arm_texture_{i:05d}.bin", tex, _FLOAT, {})
                                for i, tex in enumerate(pack.arm_texture_bank)]
    if pack.background_pack:
        meta["backgrounds"] = [
            {"kind": bg.kind,
             "image": _write_blob(root, f"background_{i:05d}_image.bin", bg.image, _FLOAT, {}),
             "depth": _write_blob(root, f"background_{i:05d}_depth.bin", bg.depth, _FLOAT, {})}
            for i, bg in enumerate(pack.background_pack)]

    if pack.grasp_pack:
        shapes = np.stack([g.hand_shape for g in pack.grasp_pack])
        poses = np.stack([g.hand_pose for g in pack.grasp_pack])
        mats = np.stack([g.object_to_wrist for g in pack.grasp_pack])
        meta["grasps"] = {
            "hand_shape": _write_blob(root, "grasp_hand_shape.bin", shapes, _FLOAT, {}),
            "hand_pose": _write_blob(root, "grasp_hand_pose.bin", poses, _FLOAT, {}),
            "object_to_wrist": _write_blob(root, "grasp_object_to_wrist.bin", mats, _FLOAT, {}),
            "object_refs": [g.object_mesh_ref for g in pack.grasp_pack],
        }

    if pack.objects:
        os.makedirs(os.path.join(root, "objects"), exist_ok=True)
        meta["objects"] = {}
        for name, mesh in sorted(pack.objects.items()):
            rel = f"objects/{name}.obj"
            text = _mesh_to_obj(mesh)
            with open(os.path.join(root, rel), "wb") as fh:
                fh.write(text.encode("ascii"))
            meta["objects"][name] = {"path": rel, "sha256": _sha256(text.encode("ascii"))}

    with open(os.path.join(root, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return root


def _mesh_to_obj(mesh):
    lines = []
    for v in np.asarray(mesh.vertices, dtype=np.float64):
        lines.append("v %.8f %.8f %.8f" % (v[0], v[1], v[2]))
    if mesh.uv is not None:
        for t in np.asarray(mesh.uv, dtype=np.float64):
            lines.append("vt %.8f %.8f" % (t[0], t[1]))
        for f in mesh.faces:
            lines.append("f %d/%d %d/%d %d/%d"
                         % (f[0] + 1, f[0] + 1, f[1] + 1, f[1] + 1, f[2] + 1, f[2] + 1))
    else:
        for f in mesh.faces:
            lines.append("f %d %d %d" % (f[0] + 1, f[1] + 1, f[2] + 1))
    return "\n".join(lines) + "\n"


def load_asset_pack(root):
    """Load and validate a pack directory written by :func:`write_asset_pack`.

    Raises MissingBlob / ShapeMismatch / ChecksumMismatch for container-level
    corruption, InvalidWeights / InvalidAsset for invariant violations.
    """
    meta_path = os.path.join(root, "meta.json")
    if not os.path.isfile(meta_path):
        raise MissingBlob(f"{root}: no meta.json")
    with open(meta_path) as fh:
        meta = json.load(fh)

    pack = AssetPack()
    if "model" in meta:
        arrays = {name: _read_blob(root, meta["model"][name]) for name, _ in _MODEL_FIELDS}
        pack.model = ModelAsset(**arrays)
        _check_model_shapes(pack.model)
    if "banks" in meta:
        if "shape_bank" in meta["banks"]:
            pack.shape_bank = _read_blob(root, meta["banks"]["shape_bank"])
        if "pose_bank" in meta["banks"]:
            pack.pose_bank = _read_blob(root, meta["banks"]["pose_bank"])
    for entry in meta.get("textures", []):
        pack.texture_bank.append(_read_blob(root, entry))
    for entry in meta.get("arm_textures", []):
        pack.arm_texture_bank.append(_read_blob(root, entry))
    for entry in meta.get("backgrounds", []):
        pack.background_pack.append(Background(
            image=_read_blob(root, entry["image"]),
            depth=_read_blob(root, entry["depth"]),
            kind=entry["kind"]))
    if "grasps" in meta:
        g = meta["grasps"]
        shapes = _read_blob(root, g["hand_shape"])
        poses = _read_blob(root, g["hand_pose"])
        mats = _read_blob(root, g["object_to_wrist"])
        refs = g["object_refs"]
        if not (len(refs) == shapes.shape[0] == poses.shape[0] == mats.shape[0]):
            raise ShapeMismatch("grasp arrays and object_refs length mismatch")
        for i, ref in enumerate(refs):
            pack.grasp_pack.append(GraspRecord(shapes[i], poses[i], ref, mats[i]))
    for name, entry in meta.get("objects", {}).items():
        path = os.path.join(root, entry["path"])
        if not os.path.isfile(path):
            raise MissingBlob(f"object file {entry['path']} missing")
        with open(path, "rb") as fh:
            data = fh.read()
        if _sha256(data) != entry["sha256"]:
            raise ChecksumMismatch(f"object file {entry['path']}: checksum mismatch")
        pack.objects[name] = load_object_mesh(path)

    validate_pack(pack)
    return pack


def _check_model_shapes(model):
    v = model.template_vertices.shape
    if len(v) != 2 or v[1] != 3:
        raise ShapeMismatch(f"template_vertices shape {v}")
    nv = v[0]
    checks = [
        ("faces", model.faces, (None, 3)),
        ("skinning_weights", model.skinning_weights, (nv, None)),
        ("joint_regressor", model.joint_regressor, (None, nv)),
        ("uv", model.uv, (nv, 2)),
    ]
    for name, arr, want in checks:
        if arr.ndim != 2:
            raise ShapeMismatch(f"{name} must be 2-D, got shape {arr.shape}")
        for axis, expect in enumerate(want):
            if expect is not None and arr.shape[axis] != expect:
                raise ShapeMismatch(f"{name} shape {arr.shape}, expected axis {axis} = {expect}")
    j = model.joint_regressor.shape[0]
    if model.parent.shape != (j,):
        raise ShapeMismatch(f"parent shape {model.parent.shape}, expected ({j},)")
    if model.skinning_weights.shape[1] != j:
        raise ShapeMismatch("skinning_weights joint count != regressor joint count")
    if model.shape_blendshapes.size and model.shape_blendshapes.shape[1:] != (nv, 3):
        raise ShapeMismatch(f"shape_blendshapes shape {model.shape_blendshapes.shape}")


# ---------------------------------------------------------------------------
# procedural toy assets

_RING_N = 12        # wrist ring / palm loft vertex count
_FINGER_RING_N = 8

# joint layout: 0 = wrist, then (mcp, pip, dip) per finger
_FINGERS = [
    # name,  base (m),                direction,           segment lengths (m),  radius (m)
    ("index", (-0.030, 0.040, 0.0), (0.0, 1.0, 0.0), (0.030, 0.022, 0.018), 0.0080),
    ("middle", (-0.010, 0.040, 0.0), (0.0, 1.0, 0.0), (0.034, 0.025, 0.020), 0.0085),
    ("ring", (0.010, 0.040, 0.0), (0.0, 1.0, 0.0), (0.031, 0.023, 0.018), 0.0080),
    ("pinky", (0.030, 0.040, 0.0), (0.0, 1.0, 0.0), (0.024, 0.018, 0.015), 0.0065),
    ("thumb", (-0.038, 0.000, 0.004), (-0.55, 0.80, 0.23), (0.032, 0.026, 0.020), 0.0095),
]

WRIST_RADIUS = 0.035
_WRIST_CENTER = np.array([0.0, -0.045, 0.0])


def _ring(center, radius_x, radius_z, n, frame=None):
    """Vertex ring around `center`; default frame spans the x-z plane."""
    phi = 2.0 * np.pi * np.arange(n) / n
    if frame is None:
        u = np.array([1.0, 0.0, 0.0])
        w = np.array([0.0, 0.0, 1.0])
    else:
        u, w = frame
    return (np.asarray(center)[None, :]
            + radius_x * np.cos(phi)[:, None] * u[None, :]
            + radius_z * np.sin(phi)[:, None] * w[None, :])


def _tube_faces(ring_a, ring_b, n):
    """Quad strip between two rings of vertex ids, split into triangles."""
    faces = []
    for k in range(n):
        a0, a1 = ring_a[k], ring_a[(k + 1) % n]
        b0, b1 = ring_b[k], ring_b[(k + 1) % n]
        faces.append((a0, a1, b1))
        faces.append((a0, b1, b0))
    return faces


def _fan_faces(ring_ids, apex, n, flip=False):
    faces = []
    for k in range(n):
        a, b = ring_ids[k], ring_ids[(k + 1) % n]
        faces.append((a, apex, b) if flip else (a, b, apex))
    return faces


def _build_toy_model(rng):
    verts = []
    faces = []
    weights = []        # list of [(joint, w), ...] per vertex

    def add_ring(pts, joint_weights):
        ids = list(range(len(verts), len(verts) + len(pts)))
        verts.extend(pts)
        weights.extend([joint_weights] * len(pts))
        return ids

    def add_vert(p, joint_weights):
        verts.append(np.asarray(p, dtype=np.float64))
        weights.append(joint_weights)
        return len(verts) - 1

    # --- palm loft: wrist ring (open boundary) -> mid ring -> knuckle ring + cap
    wrist_ids = add_ring(_ring(_WRIST_CENTER, WRIST_RADIUS, WRIST_RADIUS, _RING_N),
                         [(0, 1.0)])
    mid_ids = add_ring(_ring((0.0, 0.0, 0.0), 0.040, 0.020, _RING_N), [(0, 1.0)])
    knuckle_ids = add_ring(_ring((0.0, 0.040, 0.0), 0.042, 0.016, _RING_N), [(0, 1.0)])
    faces += _tube_faces(wrist_ids, mid_ids, _RING_N)
    faces += _tube_faces(mid_ids, knuckle_ids, _RING_N)
    palm_cap = add_vert((0.0, 0.040, 0.0), [(0, 1.0)])
    faces += _fan_faces(knuckle_ids, palm_cap, _RING_N)

    # --- fingers (three articulated segments each; mcp/pip/dip joints)
    joint_positions = [_WRIST_CENTER.copy()]
    parent = [-1]
    regressor_rows = [wrist_ids]     # each row: uniform weights over these verts
    fingertip_ids = []

    for fi, (_, base, direction, seg_lengths, radius) in enumerate(_FINGERS):
        d = np.asarray(direction, dtype=np.float64)
        d = d / np.linalg.norm(d)
        ref = np.array([0.0, 0.0, 1.0])
        if abs(d @ ref) > 0.98:
            ref = np.array([1.0, 0.0, 0.0])
        u = np.cross(d, ref)
        u /= np.linalg.norm(u)
        w = np.cross(d, u)
        base = np.asarray(base, dtype=np.float64)

        mcp = base
        pip = mcp + seg_lengths[0] * d
        dip = pip + seg_lengths[1] * d
        tip = dip + seg_lengths[2] * d
        j_mcp = len(joint_positions)
        joint_positions += [mcp, pip, dip]
        parent += [0, j_mcp, j_mcp + 1]

        radii = [radius, radius * 0.92, radius * 0.80, radius * 0.62]
        centers = [mcp, pip, dip, dip + 0.80 * seg_lengths[2] * d]
        ring_weights = [
            [(0, 0.25), (j_mcp, 0.75)],
            [(j_mcp, 0.5), (j_mcp + 1, 0.5)],
            [(j_mcp + 1, 0.5), (j_mcp + 2, 0.5)],
            [(j_mcp + 2, 1.0)],
        ]
        ring_ids = []
        for center, r, jw in zip(centers, radii, ring_weights):
            ring_ids.append(add_ring(_ring(center, r, r, _FINGER_RING_N, frame=(u, w)), jw))
        for a, b in zip(ring_ids[:-1], ring_ids[1:]):
            faces += _tube_faces(a, b, _FINGER_RING_N)
        tip_id = add_vert(tip, [(j_mcp + 2, 1.0)])
        base_cap = add_vert(mcp, [(0, 0.25), (j_mcp, 0.75)])
        faces += _fan_faces(ring_ids[-1], tip_id, _FINGER_RING_N)
        faces += _fan_faces(ring_ids[0], base_cap, _FINGER_RING_N, flip=True)
        fingertip_ids.append(tip_id)
        regressor_rows += [ring_ids[0], ring_ids[1], ring_ids[2]]

    template = np.array(verts, dtype=np.float64)
    faces = np.array(faces, dtype=np.int32)
    nv = template.shape[0]
    nj = len(joint_positions)

    skin = np.zeros((nv, nj), dtype=np.float64)
    for vi, jw in enumerate(weights):
        for j, wgt in jw:
            skin[vi, j] = wgt

    regressor = np.zeros((nj, nv), dtype=np.float64)
    for j, ids in enumerate(regressor_rows):
        regressor[j, ids] = 1.0 / len(ids)

    # planar uv over the palm plane
    lo = template[:, :2].min(axis=0)
    hi = template[:, :2].max(axis=0)
    uv = (template[:, :2] - lo) / (hi - lo)

    palm_center = np.array([0.0, 0.0, 0.0])
    grow = 0.12 * (template - palm_center)
    lengthen = np.zeros_like(template)
    beyond = template[:, 1] > 0.040
    lengthen[beyond, 1] = 0.30 * (template[beyond, 1] - 0.040)
    shape_blend = np.stack([grow, lengthen])

    pose_blend = rng.normal(0.0, 4e-4, size=((nj - 1) * 9, nv, 3))

    return ModelAsset(
        template_vertices=template.astype(_FLOAT),
        faces=faces,
        skinning_weights=skin.astype(_FLOAT),
        shape_blendshapes=shape_blend.astype(_FLOAT),
        pose_blendshapes=pose_blend.astype(_FLOAT),
        joint_regressor=regressor.astype(_FLOAT),
        parent=np.array(parent, dtype=_INT),
        uv=uv.astype(_FLOAT),
        wrist_ring=np.array(wrist_ids, dtype=_INT),
        fingertip_vertices=np.array(fingertip_ids, dtype=_INT),
    )


def _toy_pose(flex4, thumb_flex, global_orient=(0.0, 0.0, 0.0), spread=0.0,
              per_finger=None):
    """Assemble a (16*3,) pose row. flex*: (mcp, pip, dip) x-rotations in radians."""
    pose = np.zeros((16, 3))
    pose[0] = global_orient
    for fi in range(5):
        flex = thumb_flex if fi == 4 else (flex4 if per_finger is None else per_finger[fi])
        base = 1 + fi * 3
        for s in range(3):
            pose[base + s, 0] = flex[s]
        if fi < 4 and spread:
            pose[base, 2] = spread * (fi - 1.5) / 1.5
    return pose.reshape(-1)


def _toy_texture(rng, base_rgb, size=64):
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    creases = 0.04 * np.sin(xx * 0.9) * np.sin(yy * 0.35 + 1.2)
    tex = np.asarray(base_rgb, dtype=np.float64)[None, None, :] + creases[:, :, None]
    tex += rng.normal(0.0, 0.015, size=(size, size, 3))
    return np.clip(tex, 0.0, 1.0).astype(_FLOAT)


def _toy_backgrounds(rng):
    backgrounds = []

    h, w = 384, 512
    yy = np.linspace(0.0, 1.0, h)[:, None, None]
    img = np.array([0.55, 0.50, 0.45])[None, None, :] * (1.0 - 0.5 * yy) \
        + np.array([0.25, 0.22, 0.20])[None, None, :] * yy
    img = np.broadcast_to(img, (h, w, 3)).copy()
    for _ in range(6):
        r0 = int(rng.integers(0, h - 60))
        c0 = int(rng.integers(0, w - 80))
        color = rng.uniform(0.1, 0.9, size=3)
        img[r0:r0 + int(rng.integers(30, 60)), c0:c0 + int(rng.integers(40, 80))] = color
    depth = np.broadcast_to(3.0 - 1.8 * np.linspace(0.0, 1.0, h)[:, None], (h, w)).copy()
    backgrounds.append(Background(img.astype(_FLOAT), depth.astype(_FLOAT), "indoor"))

    h = w = 448
    xx = np.linspace(0.0, 2.0 * np.pi, w)[None, :]
    img = np.stack([0.55 + 0.35 * np.sin(xx + p) for p in (0.0, 2.1, 4.2)], axis=-1)
    img = np.broadcast_to(img, (h, w, 3)).copy()
    for _ in range(4):
        cy, cx = rng.integers(40, h - 40), rng.integers(40, w - 40)
        rad = int(rng.integers(15, 45))
        y, x = np.ogrid[:h, :w]
        blob = (y - cy) ** 2 + (x - cx) ** 2 <= rad ** 2
        img[blob] = rng.uniform(0.5, 1.0, size=3)
    depth = np.broadcast_to(2.0 + 4.0 * np.linspace(0.0, 1.0, w)[None, :], (h, w)).copy()
    backgrounds.append(Background(np.clip(img, 0, 1).astype(_FLOAT),
                                  depth.astype(_FLOAT), "envmap"))
    return backgrounds


def _cube_mesh(edge=0.05):
    s = edge / 2.0
    v = np.array([[x, y, z] for x in (-s, s) for y in (-s, s) for z in (-s, s)])
    quads = [
        (0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
        (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3),
    ]
    faces = []
    for q in quads:
        faces += _triangulate_quad(q)
    return TriMesh(v, np.array(faces, dtype=np.int32))


def _triangulate_quad(q):
    return [(q[0], q[1], q[2]), (q[0], q[2], q[3])]


def make_toy_assets(seed):
    """Deterministic low-poly rigged hand plus a full asset pack for tests and demos.

    Returns:
        (AssetPack, ModelAsset); the pack's ``model`` field is the same object.
    """
    rng = np.random.default_rng(seed)
    model = _build_toy_model(rng)

    shape_bank = np.clip(rng.normal(0.0, 0.6, size=(16, 2)), -2.0, 2.0).astype(_FLOAT)

    poses = [
        _toy_pose((0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
        _toy_pose((0.25, 0.25, 0.15), (0.2, 0.2, 0.1)),
        _toy_pose((1.2, 1.1, 0.8), (0.7, 0.6, 0.4)),
        _toy_pose((0.1, 0.1, 0.05), (0.1, 0.1, 0.05), spread=0.3),
        _toy_pose((1.1, 1.0, 0.7), (0.6, 0.5, 0.3),
                  per_finger=[(0.0, 0.0, 0.0)] + [(1.1, 1.0, 0.7)] * 3),
        _toy_pose((0.6, 0.5, 0.35), (0.4, 0.3, 0.2)),
        _toy_pose((1.2, 1.0, 0.7), (0.0, 0.0, 0.0)),
        _toy_pose((0.3, 0.3, 0.2), (0.8, 0.7, 0.4)),
        _toy_pose((0.4, 0.3, 0.2), (0.3, 0.2, 0.1), global_orient=(0.0, 0.4, 0.0)),
        _toy_pose((0.1, 0.1, 0.1), (0.1, 0.1, 0.1), global_orient=(0.0, 0.0, -0.5),
                  spread=0.25),
    ]
    pose_bank = np.stack(poses).astype(_FLOAT)

    textures = [
        _toy_texture(rng, (0.85, 0.62, 0.50)),
        _toy_texture(rng, (0.72, 0.50, 0.38)),
        _toy_texture(rng, (0.55, 0.36, 0.26)),
        _toy_texture(rng, (0.93, 0.76, 0.66)),
    ]
    arm_textures = [
        _toy_texture(rng, (0.80, 0.58, 0.47)),
        _toy_texture(rng, (0.60, 0.40, 0.30)),
        _toy_texture(rng, (0.25, 0.35, 0.60)),   # sleeve
    ]

    grasps = [
        GraspRecord(
            hand_shape=np.array([0.3, -0.2], dtype=_FLOAT),
            hand_pose=_toy_pose((0.9, 0.9, 0.6), (0.5, 0.5, 0.4)).astype(_FLOAT),
            object_mesh_ref="cube",
            object_to_wrist=np.array([
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.060],
                [0.0, 0.0, 1.0, 0.035],
                [0.0, 0.0, 0.0, 1.0]], dtype=_FLOAT)),
        GraspRecord(
            hand_shape=np.array([-0.4, 0.5], dtype=_FLOAT),
            hand_pose=_toy_pose((1.1, 1.0, 0.7), (0.6, 0.5, 0.3),
                                global_orient=(0.0, 0.3, 0.0)).astype(_FLOAT),
            object_mesh_ref="cube",
            object_to_wrist=make_rotation_y(0.5, (0.0, 0.055, 0.030)).astype(_FLOAT)),
    ]

    pack = AssetPack(
        model=model,
        shape_bank=shape_bank,
        pose_bank=pose_bank,
        texture_bank=textures,
        arm_texture_bank=arm_textures,
        background_pack=_toy_backgrounds(rng),
        grasp_pack=grasps,
        objects={"cube": _cube_mesh()},
    )
    validate_pack(pack)
    return pack, model


def make_rotation_y(angle, translation):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([
        [c, 0.0, s, translation[0]],
        [0.0, 1.0, 0.0, translation[1]],
        [-s, 0.0, c, translation[2]],
        [0.0, 0.0, 0.0, 1.0]])
