"""Foreground/background compositing: RGB paste, camera-space depth fusion,
and bounding boxes from instance masks.

Fusion is mask-gated: wherever the instance mask is set the rendered
foreground wins, preserving exact metric depth for hand/arm/object pixels;
elsewhere the background depth passes through (0 stays 0 = invalid).
"""

import numpy as np

from .errors import EmptyMask, ShapeMismatch


def _check_hw(a, b, what):
    if a.shape[:2] != b.shape[:2]:
        raise ShapeMismatch(f"{what}: {a.shape[:2]} vs {b.shape[:2]}")


def composite_rgb(fg, bg_rgb, feather=False):
    """Paste rendered foreground over a background crop of the same size.

    Args:
        fg: RenderOutput (rgb + mask used).
        bg_rgb: (H, W, 3) background crop in [0, 1].
        feather: blend a 1-px boundary at 50% instead of a hard edge.
    """
    bg_rgb = np.asarray(bg_rgb)
    _check_hw(fg.rgb, bg_rgb, "composite_rgb")
    fg_on = fg.mask > 0
    if not feather:
        return np.where(fg_on[..., None], fg.rgb, bg_rgb).astype(np.float32)
    alpha = fg_on.astype(np.float64)
    interior = fg_on.copy()
    interior[1:] &= fg_on[:-1]
    interior[:-1] &= fg_on[1:]
    interior[:, 1:] &= fg_on[:, :-1]
    interior[:, :-1] &= fg_on[:, 1:]
    alpha[fg_on & ~interior] = 0.5
    return (alpha[..., None] * fg.rgb + (1.0 - alpha[..., None]) * bg_rgb).astype(np.float32)


def fuse_depth(fg, bg_depth):
    """Dense depth: rendered metric depth on the mask, background depth elsewhere."""
    bg_depth = np.asarray(bg_depth)
    _check_hw(fg.depth, bg_depth, "fuse_depth")
    if np.any(bg_depth < 0):
        raise ValueError("background depth must be >= 0 (0 marks invalid)")
    return np.where(fg.mask > 0, fg.depth, bg_depth).astype(np.float32)


def bbox_from_mask(mask, pad=0):
    """Tight inclusive (col_min, row_min, col_max, row_max) over mask > 0 pixels,
    padded by ``pad`` and clamped to the image."""
    mask = np.asarray(mask)
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        raise EmptyMask("mask has no foreground pixel")
    h, w = mask.shape
    return (max(int(cols[0]) - pad, 0), max(int(rows[0]) - pad, 0),
            min(int(cols[-1]) + pad, w - 1), min(int(rows[-1]) + pad, h - 1))


def crop_and_resize(image, crop, out_w, out_h, interpolation="bilinear"):
    """Crop ``image`` to a CropRect, then resize to (out_h, out_w).

    Depth maps should use nearest interpolation so values never mix across
    depth discontinuities; RGB defaults to bilinear.
    """
    region = image[crop.y:crop.y + crop.h, crop.x:crop.x + crop.w]
    return resize(region, out_w, out_h, interpolation)


def resize(image, out_w, out_h, interpolation="bilinear"):
    img = np.asarray(image)
    in_h, in_w = img.shape[:2]
    if (in_h, in_w) == (out_h, out_w):
        return img.copy()
    if interpolation == "nearest":
        rows = np.minimum((np.floor((np.arange(out_h) + 0.5) * in_h / out_h)).astype(int),
                          in_h - 1)
        cols = np.minimum((np.floor((np.arange(out_w) + 0.5) * in_w / out_w)).astype(int),
                          in_w - 1)
        return img[rows][:, cols].copy()
    if interpolation != "bilinear":
        raise ValueError(f"unknown interpolation {interpolation!r}")
    ry = (np.arange(out_h) + 0.5) * in_h / out_h - 0.5
    rx = (np.arange(out_w) + 0.5) * in_w / out_w - 0.5
    y0 = np.clip(np.floor(ry).astype(int), 0, in_h - 1)
    x0 = np.clip(np.floor(rx).astype(int), 0, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = np.clip(ry - y0, 0.0, 1.0)[:, None]
    fx = np.clip(rx - x0, 0.0, 1.0)[None, :]
    if img.ndim == 3:
        fy = fy[..., None]
        fx = fx[..., None]
    arr = img.astype(np.float64)
    top = arr[y0][:, x0] * (1 - fx) + arr[y0][:, x1] * fx
    bot = arr[y1][:, x0] * (1 - fx) + arr[y1][:, x1] * fx
    return (top * (1 - fy) + bot * fy).astype(img.dtype)
