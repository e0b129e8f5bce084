"""Pose and mesh evaluation metrics: MPJPE, scale-translation and full
similarity (Procrustes) aligned variants, PCK area-under-curve, and
nearest-neighbor F-scores (pre- and post-alignment).

Conventions: inputs are meters; reported errors are millimeters. Alignments
map the prediction onto the ground truth by minimizing the sum of squared
point distances.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .dataset import load_manifest, load_predictions, read_sample
from .errors import (DegenerateInput, DimensionMismatch, EmptyInput,
                     MissingSample)

AUC_T_MAX_MM = 50.0
AUC_STEPS = 100
_MIN_SCALE = 1e-9


@dataclass
class AlignmentResult:
    scale: float
    rotation: np.ndarray      # (3, 3); identity for scale-translation alignment
    translation: np.ndarray   # (3,)
    residual_rms: float       # meters, after applying the transform

    def apply(self, points):
        p = np.asarray(points, dtype=np.float64)
        return self.scale * (p @ self.rotation.T) + self.translation


def _as_points(arr, name):
    p = np.asarray(arr, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != 3:
        raise DimensionMismatch(f"{name} must be (K, 3), got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DimensionMismatch(f"{name} contains non-finite values")
    return p


def _paired(pred, gt):
    p = _as_points(pred, "pred")
    g = _as_points(gt, "gt")
    if p.shape != g.shape:
        raise DimensionMismatch(f"point counts differ: {p.shape} vs {g.shape}")
    return p, g


def mpjpe(pred, gt):
    """Mean per-point Euclidean distance in millimeters."""
    p, g = _paired(pred, gt)
    return float(np.linalg.norm(p - g, axis=1).mean() * 1000.0)


def _rms(diff):
    return float(np.sqrt(np.mean(np.sum(diff * diff, axis=1))))


def sta_align(pred, gt):
    """Least-squares scale + translation (no rotation) mapping pred onto gt.

    Closed form: s = <p_c, g_c> / |p_c|^2 on centered points, t = mean(g) -
    s mean(p). The scale is clamped positive (a non-positive optimum means
    the inputs are anti-correlated; reflections are not allowed).
    """
    p, g = _paired(pred, gt)
    p_mean = p.mean(axis=0)
    g_mean = g.mean(axis=0)
    pc = p - p_mean
    gc = g - g_mean
    denom = float(np.sum(pc * pc))
    if denom < 1e-18:
        raise DegenerateInput("all predicted points coincide")
    s = float(np.sum(pc * gc)) / denom
    s = max(s, _MIN_SCALE)
    t = g_mean - s * p_mean
    result = AlignmentResult(scale=s, rotation=np.eye(3), translation=t,
                             residual_rms=0.0)
    result.residual_rms = _rms(result.apply(p) - g)
    return result


def procrustes_align(pred, gt):
    """Optimal similarity transform (scale, proper rotation, translation).

    Standard least-squares solution via the singular decomposition of the
    cross-covariance, with the determinant sign fixed so the rotation is
    proper (no reflection).
    """
    p, g = _paired(pred, gt)
    n = p.shape[0]
    if n < 3:
        raise DegenerateInput("similarity alignment needs at least 3 points")
    p_mean = p.mean(axis=0)
    g_mean = g.mean(axis=0)
    pc = p - p_mean
    gc = g - g_mean
    var_p = float(np.sum(pc * pc)) / n
    cov = (gc.T @ pc) / n
    u, d, vt = np.linalg.svd(cov)
    sing = np.linalg.svd(pc, compute_uv=False)
    if var_p < 1e-18 or sing[1] < 1e-9 * max(sing[0], 1e-18):
        raise DegenerateInput("centered prediction is rank-deficient (collinear points)")
    flip = np.ones(3)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        flip[2] = -1.0
    rotation = u @ np.diag(flip) @ vt
    s = float(np.sum(d * flip)) / var_p
    s = max(s, _MIN_SCALE)
    t = g_mean - s * rotation @ p_mean
    result = AlignmentResult(scale=s, rotation=rotation, translation=t,
                             residual_rms=0.0)
    result.residual_rms = _rms(result.apply(p) - g)
    return result


def aligned_errors_mm(pred, gt, align):
    """Per-point distances (mm) after 'none' | 'sta' | 'procrustes' alignment.

    Distances below 1e-9 mm are snapped to exactly zero: they are numerical
    noise from the alignment solve, and an exact match should integrate to a
    perfect PCK curve.
    """
    p, g = _paired(pred, gt)
    if align == "none":
        moved = p
    elif align == "sta":
        moved = sta_align(p, g).apply(p)
    elif align == "procrustes":
        moved = procrustes_align(p, g).apply(p)
    else:
        raise ValueError(f"unknown alignment {align!r}")
    err = np.linalg.norm(moved - g, axis=1) * 1000.0
    err[err < 1e-9] = 0.0
    return err


def pck_auc(errors_mm, t_max=AUC_T_MAX_MM, steps=AUC_STEPS):
    """Normalized area under the fraction-correct curve over [0, t_max] mm.

    PCK(tau) = fraction of errors <= tau; trapezoidal integration over an
    even grid of ``steps`` intervals, divided by t_max so the result lies
    in [0, 1].
    """
    errors = np.asarray(errors_mm, dtype=np.float64).reshape(-1)
    if errors.size == 0:
        raise EmptyInput("no errors to integrate")
    if np.any(errors < 0):
        raise ValueError("errors must be >= 0")
    tau = np.linspace(0.0, t_max, steps + 1)
    pck = (errors[None, :] <= tau[:, None]).mean(axis=1)
    return float(np.trapezoid(pck, tau) / t_max)


def fscore(pred_pts, gt_pts, tau_mm, align="none"):
    """Harmonic mean of nearest-neighbor precision and recall at tau.

    Precision: fraction of predicted points within tau of some ground-truth
    point; recall the other way round. ``align='procrustes'`` first fits a
    similarity transform on the two point sets themselves.
    """
    p = _as_points(pred_pts, "pred_pts")
    g = _as_points(gt_pts, "gt_pts")
    if p.shape[0] == 0 or g.shape[0] == 0:
        raise EmptyInput("f-score needs nonempty point sets")
    if align == "procrustes":
        p = procrustes_align(p, g).apply(p)
    elif align != "none":
        raise ValueError(f"unknown alignment {align!r}")
    tau = tau_mm / 1000.0
    d_pred = cKDTree(g).query(p)[0]
    d_gt = cKDTree(p).query(g)[0]
    precision = float((d_pred <= tau).mean())
    recall = float((d_gt <= tau).mean())
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


# ---------------------------------------------------------------------------
# dataset-level evaluation

@dataclass
class MetricsReport:
    n_samples: int
    sample_ids: list
    per_sample: dict                  # metric name -> list of per-sample values
    mpjpe_mm: float
    sta_mpjpe_mm: float
    pa_mpjpe_mm: float
    auc_j: float
    pa_mpvpe_mm: Optional[float] = None
    auc_v: Optional[float] = None
    f5: Optional[float] = None
    f15: Optional[float] = None
    f5_aligned: Optional[float] = None
    f15_aligned: Optional[float] = None
    config: dict = field(default_factory=dict)

    def to_dict(self, units="mm"):
        scale = {"mm": 1.0, "cm": 0.1}[units]

        def conv(v):
            return None if v is None else v * scale

        return {
            "units": units,
            "n_samples": self.n_samples,
            "mpjpe": conv(self.mpjpe_mm),
            "sta_mpjpe": conv(self.sta_mpjpe_mm),
            "pa_mpjpe": conv(self.pa_mpjpe_mm),
            "pa_mpvpe": conv(self.pa_mpvpe_mm),
            "auc_j": self.auc_j,
            "auc_v": self.auc_v,
            "f@5mm": self.f5,
            "f@15mm": self.f15,
            "f_aligned@5mm": self.f5_aligned,
            "f_aligned@15mm": self.f15_aligned,
            "per_sample": {k: [v * scale if "mpjpe" in k or "mpvpe" in k else v
                               for v in vals]
                           for k, vals in self.per_sample.items()},
            "sample_ids": self.sample_ids,
            "config": self.config,
        }

    def to_text(self, units="mm"):
        d = self.to_dict(units)
        rows = [("samples", f"{self.n_samples:d}", "")]
        for key in ("mpjpe", "sta_mpjpe", "pa_mpjpe", "pa_mpvpe"):
            if d[key] is not None:
                rows.append((key.upper().replace("_", "-"), f"{d[key]:.3f}", units))
        for key in ("auc_j", "auc_v", "f@5mm", "f@15mm",
                    "f_aligned@5mm", "f_aligned@15mm"):
            if d[key] is not None:
                rows.append((key, f"{d[key]:.4f}", ""))
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {val:>9} {unit}".rstrip()
                         for name, val, unit in rows)


def _mean(values):
    return math.fsum(values) / len(values)


def evaluate_dataset(dataset_dir, predictions, auc_t_max=AUC_T_MAX_MM,
                     auc_steps=AUC_STEPS, auc_pooling="pooled",
                     aligned_fscore=True):
    """Score a prediction set against a generated dataset.

    Per-sample metrics are computed in the camera frame and averaged;
    AUC integrates the per-point Procrustes-aligned errors, either pooled
    across all samples (default) or averaged per sample.

    Args:
        predictions: path to a prediction JSON file, or the dict returned
            by :func:`handsynth.dataset.load_predictions`.
        aligned_fscore: also report F-scores after similarity alignment.
    """
    if isinstance(predictions, (str, bytes)):
        predictions = load_predictions(predictions)
    if auc_pooling not in ("pooled", "per_sample"):
        raise ValueError(f"unknown auc_pooling {auc_pooling!r}")

    manifest = load_manifest(dataset_dir)
    sample_ids = sorted(manifest["samples"])
    if not sample_ids:
        raise EmptyInput(f"{dataset_dir}: dataset has no samples")

    per = {k: [] for k in ("mpjpe", "sta_mpjpe", "pa_mpjpe", "pa_mpvpe",
                           "f5", "f15", "f5_aligned", "f15_aligned")}
    joint_err_pool = []
    vert_err_pool = []
    have_vertices = True

    for sid in sample_ids:
        if sid not in predictions:
            raise MissingSample(f"no prediction for {sid}")
        gt = read_sample(dataset_dir, sid)
        pred_joints, pred_vertices = predictions[sid]
        if pred_joints.shape != gt.joints_3d.shape:
            raise DimensionMismatch(
                f"{sid}: prediction joints {pred_joints.shape} vs "
                f"ground truth {gt.joints_3d.shape}")
        per["mpjpe"].append(mpjpe(pred_joints, gt.joints_3d))
        per["sta_mpjpe"].append(
            float(aligned_errors_mm(pred_joints, gt.joints_3d, "sta").mean()))
        pa_err = aligned_errors_mm(pred_joints, gt.joints_3d, "procrustes")
        per["pa_mpjpe"].append(float(pa_err.mean()))
        joint_err_pool.append(pa_err)

        if pred_vertices is None or gt.vertices_3d is None:
            have_vertices = False
            continue
        if pred_vertices.shape != gt.vertices_3d.shape:
            raise DimensionMismatch(
                f"{sid}: prediction vertices {pred_vertices.shape} vs "
                f"ground truth {gt.vertices_3d.shape}")
        pa_v = aligned_errors_mm(pred_vertices, gt.vertices_3d, "procrustes")
        per["pa_mpvpe"].append(float(pa_v.mean()))
        vert_err_pool.append(pa_v)
        per["f5"].append(fscore(pred_vertices, gt.vertices_3d, 5.0))
        per["f15"].append(fscore(pred_vertices, gt.vertices_3d, 15.0))
        if aligned_fscore:
            per["f5_aligned"].append(fscore(pred_vertices, gt.vertices_3d, 5.0,
                                            align="procrustes"))
            per["f15_aligned"].append(fscore(pred_vertices, gt.vertices_3d, 15.0,
                                             align="procrustes"))

    def pooled_auc(pools):
        if auc_pooling == "pooled":
            return pck_auc(np.concatenate(pools), auc_t_max, auc_steps)
        return _mean([pck_auc(p, auc_t_max, auc_steps) for p in pools])

    report = MetricsReport(
        n_samples=len(sample_ids),
        sample_ids=sample_ids,
        per_sample={k: v for k, v in per.items() if v},
        mpjpe_mm=_mean(per["mpjpe"]),
        sta_mpjpe_mm=_mean(per["sta_mpjpe"]),
        pa_mpjpe_mm=_mean(per["pa_mpjpe"]),
        auc_j=pooled_auc(joint_err_pool),
        config={"auc_t_max_mm": auc_t_max, "auc_steps": auc_steps,
                "auc_pooling": auc_pooling},
    )
    if have_vertices and per["pa_mpvpe"]:
        report.pa_mpvpe_mm = _mean(per["pa_mpvpe"])
        report.auc_v = pooled_auc(vert_err_pool)
        report.f5 = _mean(per["f5"])
        report.f15 = _mean(per["f15"])
        if aligned_fscore:
            report.f5_aligned = _mean(per["f5_aligned"])
            report.f15_aligned = _mean(per["f15_aligned"])
    return report
