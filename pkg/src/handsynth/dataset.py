"""Sample serialization, dataset manifest, and prediction-file loading.

On-disk layout per sample::

    <dataset>/scene_%08d/view_%d/
        rgb.png     8-bit color
        depth.png   16-bit grayscale, value = round(meters * 1000), 0 = invalid
        mask.png    8-bit instance labels
        meta.json   everything else (floats survive a read/write round trip)

Depth beyond 65.535 m cannot be represented and is stored as 0/invalid.
All geometry in meta.json is metric (meters / pixels); 3D joints and
vertices are in the camera frame.
"""

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from PIL import Image

from .errors import (ChecksumMismatch, DuplicateId, InvariantViolation, IoError,
                     MissingManifest, MissingSample, ParseError)

REPROJECTION_TOL_PX = 0.5


@dataclass
class SampleRecord:
    sample_id: str
    rgb: np.ndarray                  # (H, W, 3) uint8
    depth: np.ndarray                # (H, W) float32 meters, 0 = invalid
    mask: np.ndarray                 # (H, W) uint8
    bbox: tuple                      # (col_min, row_min, col_max, row_max)
    fx: float
    fy: float
    cx: float
    cy: float
    world_from_camera: np.ndarray    # (4, 4)
    beta: np.ndarray
    global_orient: np.ndarray        # (3,)
    joint_rotations: np.ndarray      # (J-1, 3)
    translation: np.ndarray          # (3,)
    joints_3d: np.ndarray            # (K, 3) camera frame, meters
    joints_2d: np.ndarray            # (K, 2) pixels
    vertices_3d: Optional[np.ndarray] = None   # (V, 3) camera frame
    sampling: dict = field(default_factory=dict)  # free-form stats fields


def reproject(joints_3d, fx, fy, cx, cy):
    """Camera-frame 3D points -> (K, 2) pixel coordinates."""
    j = np.asarray(joints_3d, dtype=np.float64)
    return np.stack([cx + fx * j[:, 0] / j[:, 2], cy + fy * j[:, 1] / j[:, 2]], axis=1)


def check_record(record):
    """Raise InvariantViolation when the record is internally inconsistent."""
    if record.rgb.dtype != np.uint8 or record.rgb.ndim != 3:
        raise InvariantViolation("rgb must be (H, W, 3) uint8")
    if record.depth.shape != record.mask.shape or record.depth.shape != record.rgb.shape[:2]:
        raise InvariantViolation("rgb/depth/mask resolution mismatch")
    if np.any(record.depth < 0):
        raise InvariantViolation("negative depth")
    if np.any((record.mask > 0) & (record.depth <= 0)):
        raise InvariantViolation("mask set where depth is invalid")
    uv = reproject(record.joints_3d, record.fx, record.fy, record.cx, record.cy)
    err = np.abs(uv - np.asarray(record.joints_2d, dtype=np.float64)).max()
    if err > REPROJECTION_TOL_PX:
        raise InvariantViolation(f"stored 2D joints off reprojection by {err:.3f} px")


def encode_depth_mm(depth_m):
    """Meters -> uint16 millimeters (round half even); out-of-range -> 0."""
    mm = np.round(np.asarray(depth_m, dtype=np.float64) * 1000.0)
    mm[(mm < 0) | (mm > 65535)] = 0
    return mm.astype(np.uint16)


def sample_dir(dataset_dir, sample_id):
    return os.path.join(dataset_dir, *sample_id.split("/"))


def write_sample(record, dataset_dir):
    """Write one SampleRecord; refuses inconsistent records. Returns the dir."""
    check_record(record)
    out = sample_dir(dataset_dir, record.sample_id)
    try:
        os.makedirs(out, exist_ok=True)
        Image.fromarray(record.rgb, mode="RGB").save(os.path.join(out, "rgb.png"))
        Image.fromarray(encode_depth_mm(record.depth)).save(os.path.join(out, "depth.png"))
        Image.fromarray(record.mask, mode="L").save(os.path.join(out, "mask.png"))
        meta = {
            "sample_id": record.sample_id,
            "bbox": [int(v) for v in record.bbox],
            "intrinsics": {"fx": float(record.fx), "fy": float(record.fy),
                           "cx": float(record.cx), "cy": float(record.cy)},
            "world_from_camera": record.world_from_camera.tolist(),
            "beta": record.beta.tolist(),
            "global_orient": record.global_orient.tolist(),
            "joint_rotations": record.joint_rotations.tolist(),
            "translation": record.translation.tolist(),
            "joints_3d": record.joints_3d.tolist(),
            "joints_2d": record.joints_2d.tolist(),
            "sampling": record.sampling,
        }
        if record.vertices_3d is not None:
            meta["vertices_3d"] = record.vertices_3d.tolist()
        with open(os.path.join(out, "meta.json"), "w") as fh:
            json.dump(meta, fh, sort_keys=True)
    except OSError as exc:
        raise IoError(f"writing sample {record.sample_id}: {exc}") from exc
    return out


def read_sample(dataset_dir, sample_id):
    """Load one sample back into a SampleRecord (depth dequantized to meters)."""
    src = sample_dir(dataset_dir, sample_id)
    try:
        rgb = np.asarray(Image.open(os.path.join(src, "rgb.png")), dtype=np.uint8)
        depth_mm = np.asarray(Image.open(os.path.join(src, "depth.png")))
        mask = np.asarray(Image.open(os.path.join(src, "mask.png")), dtype=np.uint8)
        with open(os.path.join(src, "meta.json")) as fh:
            meta = json.load(fh)
    except OSError as exc:
        raise IoError(f"reading sample {sample_id}: {exc}") from exc
    intr = meta["intrinsics"]
    vertices = meta.get("vertices_3d")
    return SampleRecord(
        sample_id=meta["sample_id"],
        rgb=rgb,
        depth=(depth_mm.astype(np.float64) / 1000.0).astype(np.float32),
        mask=mask,
        bbox=tuple(meta["bbox"]),
        fx=intr["fx"], fy=intr["fy"], cx=intr["cx"], cy=intr["cy"],
        world_from_camera=np.asarray(meta["world_from_camera"], dtype=np.float64),
        beta=np.asarray(meta["beta"], dtype=np.float64),
        global_orient=np.asarray(meta["global_orient"], dtype=np.float64),
        joint_rotations=np.asarray(meta["joint_rotations"], dtype=np.float64),
        translation=np.asarray(meta["translation"], dtype=np.float64),
        joints_3d=np.asarray(meta["joints_3d"], dtype=np.float64),
        joints_2d=np.asarray(meta["joints_2d"], dtype=np.float64),
        vertices_3d=None if vertices is None else np.asarray(vertices, dtype=np.float64),
        sampling=meta.get("sampling", {}),
    )


# ---------------------------------------------------------------------------
# manifest

_SAMPLE_FILES = ("rgb.png", "depth.png", "mask.png", "meta.json")
_VIEW_RE = re.compile(r"^view_\d+$")
_SCENE_RE = re.compile(r"^scene_\d{8}$")


def _file_sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def list_sample_ids(dataset_dir):
    """Sample ids found on disk (sorted), independent of any manifest."""
    ids = []
    for scene in sorted(os.listdir(dataset_dir)):
        if not _SCENE_RE.match(scene):
            continue
        for view in sorted(os.listdir(os.path.join(dataset_dir, scene))):
            if _VIEW_RE.match(view):
                ids.append(f"{scene}/{view}")
    return ids


def write_manifest(dataset_dir):
    """Hash every sample file into manifest.json; returns the manifest dict."""
    samples = {}
    for sid in list_sample_ids(dataset_dir):
        src = sample_dir(dataset_dir, sid)
        entry = {}
        for name in _SAMPLE_FILES:
            path = os.path.join(src, name)
            if not os.path.isfile(path):
                raise MissingSample(f"{sid}: missing {name}")
            entry[name] = _file_sha256(path)
        samples[sid] = entry
    manifest = {"samples": samples, "n_samples": len(samples),
                "n_scenes": len({sid.split("/")[0] for sid in samples})}
    with open(os.path.join(dataset_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_manifest(dataset_dir):
    path = os.path.join(dataset_dir, "manifest.json")
    if not os.path.isfile(path):
        raise MissingManifest(f"{dataset_dir}: no manifest.json")
    with open(path) as fh:
        return json.load(fh)


def verify_manifest(dataset_dir):
    """Recompute all hashes against the manifest; raises on any mismatch."""
    manifest = load_manifest(dataset_dir)
    for sid, entry in manifest["samples"].items():
        src = sample_dir(dataset_dir, sid)
        for name, recorded in entry.items():
            path = os.path.join(src, name)
            if not os.path.isfile(path):
                raise MissingSample(f"{sid}: missing {name}")
            if _file_sha256(path) != recorded:
                raise ChecksumMismatch(f"{sid}/{name}: checksum mismatch")
    return manifest


# ---------------------------------------------------------------------------
# predictions

def load_predictions(path):
    """Prediction file -> {sample_id: (joints (K,3), vertices (V,3) or None)}.

    The file is a JSON array of {"sample_id", "joints", "vertices"?} with
    coordinates in meters, camera frame.
    """
    try:
        with open(path) as fh:
            entries = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse predictions {path}: {exc}") from exc
    if not isinstance(entries, list):
        raise ParseError(f"{path}: expected a JSON array of predictions")
    out = {}
    for entry in entries:
        try:
            sid = entry["sample_id"]
            joints = np.asarray(entry["joints"], dtype=np.float64)
        except (TypeError, KeyError) as exc:
            raise ParseError(f"{path}: malformed prediction entry") from exc
        if sid in out:
            raise DuplicateId(f"prediction for {sid} appears twice")
        vertices = entry.get("vertices")
        out[sid] = (joints, None if vertices is None
                    else np.asarray(vertices, dtype=np.float64))
    return out


def dump_ground_truth_predictions(dataset_dir, path, with_vertices=True):
    """Write a prediction file that echoes the stored ground truth (for testing)."""
    manifest = load_manifest(dataset_dir)
    entries = []
    for sid in sorted(manifest["samples"]):
        rec = read_sample(dataset_dir, sid)
        entry = {"sample_id": sid, "joints": rec.joints_3d.tolist()}
        if with_vertices and rec.vertices_3d is not None:
            entry["vertices"] = rec.vertices_3d.tolist()
        entries.append(entry)
    with open(path, "w") as fh:
        json.dump(entries, fh)
    return path
