"""Synthetic map fixtures with known geometry, used by the demo and tests."""

import numpy as np

from salbox.boxgen import BoundingBox

DEMO_IMAGE_ID = "demo001"
DEMO_LABEL = "Lesion"
EDGE_COLUMN = 5


def gaussian_bump(size: int, cx: int, cy: int, sigma: float, peak: float = 255.0) -> np.ndarray:
    """Isotropic Gaussian intensity bump on a size x size grid."""
    ys = np.arange(size, dtype=np.float64)[:, None]
    xs = np.arange(size, dtype=np.float64)[None, :]
    r2 = (xs - cx) ** 2 + (ys - cy) ** 2
    return peak * np.exp(-r2 / (2.0 * sigma * sigma))


def mask_bbox(mask: np.ndarray) -> BoundingBox:
    """Tight bounding box of the nonzero cells of a mask."""
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise ValueError("mask has no foreground cells")
    return BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def demo_fixture(size: int = 64) -> tuple[np.ndarray, np.ndarray, BoundingBox]:
    """Heat/grad map pair with a central blob and an off-target edge.

    The heatmap is a Gaussian bump; the gradient map is the same bump plus
    a thin vertical edge at EDGE_COLUMN, standing in for fine detail that a
    class-discriminative map should filter out. The returned truth box is
    the bounding box of the blob's above-35%-of-peak disc, computed
    directly from the bump (independent of the box pipeline).
    """
    if size < 32:
        raise ValueError(f"fixture needs size >= 32, got {size}")
    cx = cy = size // 2
    sigma = size * 10.0 / 64.0
    heat = gaussian_bump(size, cx, cy, sigma)
    grad = heat.copy()
    lo = size // 8
    grad[lo : size - lo, EDGE_COLUMN] += 0.72 * 255.0
    truth = mask_bbox(heat > 0.35 * heat.max())
    return heat, grad, truth
