import numpy as np
import pytest

from handsynth.composite import bbox_from_mask, composite_rgb, fuse_depth
from handsynth.errors import EmptyMask, ShapeMismatch
from handsynth.render import RenderOutput


def _out(mask, rgb=None, depth=None):
    h, w = mask.shape
    if rgb is None:
        rgb = np.random.default_rng(1).uniform(0, 1, (h, w, 3)).astype(np.float32)
    if depth is None:
        depth = np.where(mask > 0, 0.5, 0.0).astype(np.float32)
    return RenderOutput(rgb=rgb, depth=depth, mask=mask.astype(np.uint8))


def test_composite_full_mask(rng):
    mask = np.ones((8, 8), dtype=np.uint8)
    fg = _out(mask)
    bg = rng.uniform(0, 1, (8, 8, 3)).astype(np.float32)
    assert np.array_equal(composite_rgb(fg, bg), fg.rgb)


def test_composite_empty_mask(rng):
    fg = _out(np.zeros((8, 8), dtype=np.uint8))
    bg = rng.uniform(0, 1, (8, 8, 3)).astype(np.float32)
    assert np.array_equal(composite_rgb(fg, bg), bg)


def test_composite_checkerboard_elementwise_oracle(rng):
    mask = np.indices((10, 12)).sum(axis=0) % 2
    fg = _out(mask)
    bg = rng.uniform(0, 1, (10, 12, 3)).astype(np.float32)
    got = composite_rgb(fg, bg)
    for r in range(10):
        for c in range(12):
            expect = fg.rgb[r, c] if mask[r, c] else bg[r, c]
            assert np.array_equal(got[r, c], expect)


def test_composite_shape_mismatch(rng):
    fg = _out(np.ones((8, 8), dtype=np.uint8))
    with pytest.raises(ShapeMismatch):
        composite_rgb(fg, np.zeros((9, 8, 3)))


def test_composite_feather_boundary(rng):
    mask = np.zeros((9, 9), dtype=np.uint8)
    mask[2:7, 2:7] = 1
    fg = _out(mask, rgb=np.ones((9, 9, 3), dtype=np.float32))
    bg = np.zeros((9, 9, 3), dtype=np.float32)
    out = composite_rgb(fg, bg, feather=True)
    assert np.allclose(out[4, 4], 1.0)    # interior untouched
    assert np.allclose(out[2, 4], 0.5)    # boundary at half alpha
    assert np.allclose(out[0, 0], 0.0)


def test_fuse_depth_cases(rng):
    mask = np.zeros((6, 6), dtype=np.uint8)
    mask[1:4, 2:5] = 1
    fg_depth = np.where(mask > 0, 0.42, 0.0).astype(np.float32)
    bg_depth = rng.uniform(1.0, 3.0, (6, 6)).astype(np.float32)
    bg_depth[5, 5] = 0.0  # invalid stays invalid
    fg = _out(mask, depth=fg_depth)
    fused = fuse_depth(fg, bg_depth)
    for r in range(6):
        for c in range(6):
            expect = fg_depth[r, c] if mask[r, c] else bg_depth[r, c]
            assert fused[r, c] == np.float32(expect)
    assert fused[5, 5] == 0.0
    # foreground values pass through bitwise
    assert np.array_equal(fused[mask > 0], fg.depth[mask > 0])


def test_fuse_depth_full_and_empty(rng):
    bg = rng.uniform(1, 2, (5, 5)).astype(np.float32)
    all_on = _out(np.ones((5, 5), dtype=np.uint8))
    assert np.array_equal(fuse_depth(all_on, bg), all_on.depth)
    all_off = _out(np.zeros((5, 5), dtype=np.uint8))
    assert np.array_equal(fuse_depth(all_off, bg), bg)


def test_fusion_and_composite_idempotent(rng):
    mask = (rng.uniform(size=(16, 16)) > 0.5).astype(np.uint8)
    fg = _out(mask)
    bg_rgb = rng.uniform(0, 1, (16, 16, 3)).astype(np.float32)
    bg_d = rng.uniform(1, 2, (16, 16)).astype(np.float32)
    once_rgb = composite_rgb(fg, bg_rgb)
    once_d = fuse_depth(fg, bg_d)
    again = RenderOutput(rgb=once_rgb, depth=once_d, mask=fg.mask)
    assert np.array_equal(composite_rgb(again, bg_rgb), once_rgb)
    assert np.array_equal(fuse_depth(again, bg_d), once_d)


# ---------------------------------------------------------------------------
# bbox

def test_bbox_single_pixel():
    mask = np.zeros((8, 8), dtype=np.uint8)
    mask[3, 2] = 1
    assert bbox_from_mask(mask, pad=0) == (2, 3, 2, 3)


def test_bbox_two_pixels_hand_computed():
    mask = np.zeros((10, 10), dtype=np.uint8)
    mask[3, 2] = 1
    mask[7, 5] = 1
    assert bbox_from_mask(mask, pad=0) == (2, 3, 5, 7)


def test_bbox_padding_clamps():
    mask = np.ones((12, 9), dtype=np.uint8)
    assert bbox_from_mask(mask, pad=10) == (0, 0, 8, 11)


def test_bbox_empty_mask():
    with pytest.raises(EmptyMask):
        bbox_from_mask(np.zeros((4, 4), dtype=np.uint8))


def test_bbox_tightness_fuzz(rng):
    for _ in range(200):
        mask = (rng.uniform(size=(24, 31)) > 0.93).astype(np.uint8)
        if not mask.any():
            continue
        cmin, rmin, cmax, rmax = bbox_from_mask(mask, pad=0)
        rows, cols = np.nonzero(mask)
        assert np.all((rows >= rmin) & (rows <= rmax))
        assert np.all((cols >= cmin) & (cols <= cmax))
        # every side touches at least one pixel: shrinking excludes something
        assert (cols == cmin).any() and (cols == cmax).any()
        assert (rows == rmin).any() and (rows == rmax).any()
