"""Saliency map scaling, weighted fusion, and threshold masking.

Maps are plain 2-D float arrays indexed [row, col]; masks are 2-D uint8
arrays of {0, 1} with the same layout.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_HEAT_WEIGHT = 0.30
DEFAULT_THRESHOLD_FRAC = 0.35
DEFAULT_TOP_K = 5


@dataclass(frozen=True)
class FusionParams:
    """Knobs for the fuse -> threshold -> rectangle stage.

    t: weight of the heatmap in the fused map (the gradient map gets 1 - t).
    threshold_frac: mask cutoff as a fraction of the fused map's maximum.
    top_k: number of candidate rectangles to extract.
    expand: grow candidates by the ring-ratio rule before selection.
    """

    t: float = DEFAULT_HEAT_WEIGHT
    threshold_frac: float = DEFAULT_THRESHOLD_FRAC
    top_k: int = DEFAULT_TOP_K
    expand: bool = True

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {self.t}")
        if not 0.0 <= self.threshold_frac <= 1.0:
            raise ValueError(
                f"threshold_frac must lie in [0, 1], got {self.threshold_frac}"
            )
        if self.top_k < 1:
            raise ValueError(f"top_k must be a positive integer, got {self.top_k}")


def as_map(values) -> np.ndarray:
    """Validate and convert input to a 2-D float64 intensity grid."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"saliency map must be 2-D, got {arr.ndim} dimension(s)")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"saliency map must be non-empty, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("saliency map contains non-finite values")
    return arr


def as_mask(bits) -> np.ndarray:
    """Validate and convert input to a 2-D uint8 {0,1} mask."""
    arr = np.asarray(bits)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got {arr.ndim} dimension(s)")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"mask must be non-empty, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("mask entries must be 0 or 1")
        arr = arr.astype(np.uint8)
    elif arr.max(initial=0) > 1:
        raise ValueError("mask entries must be 0 or 1")
    return np.ascontiguousarray(arr)


def scale_to_255(values) -> np.ndarray:
    """Min-max scale intensities to [0, 255].

    A constant map has no contrast to localize, so it scales to all zeros
    (guaranteeing an empty mask downstream) rather than raising.
    """
    m = as_map(values)
    lo = float(m.min())
    hi = float(m.max())
    if hi == lo:
        return np.zeros_like(m)
    return (m - lo) / (hi - lo) * 255.0


def fuse(heat, grad, t: float = DEFAULT_HEAT_WEIGHT) -> np.ndarray:
    """Convex combination t*heat + (1-t)*grad of two pre-scaled maps."""
    heat = as_map(heat)
    grad = as_map(grad)
    if heat.shape != grad.shape:
        raise ValueError(
            f"heatmap and gradient map dimensions differ: {heat.shape} vs {grad.shape}"
        )
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    fused = t * heat + (1.0 - t) * grad
    # Keep the convex-combination bound exact despite float rounding.
    np.clip(fused, np.minimum(heat, grad), np.maximum(heat, grad), out=fused)
    return fused


def threshold_mask(values, threshold_frac: float = DEFAULT_THRESHOLD_FRAC) -> np.ndarray:
    """Binary mask of pixels strictly above threshold_frac * max intensity."""
    m = as_map(values)
    if not 0.0 <= threshold_frac <= 1.0:
        raise ValueError(f"threshold_frac must lie in [0, 1], got {threshold_frac}")
    if m.min() < 0:
        raise ValueError("map intensities must be nonnegative for masking")
    cutoff = threshold_frac * float(m.max())
    return (m > cutoff).astype(np.uint8)


def apply_mask(values, mask) -> np.ndarray:
    """Zero out intensities where the mask bit is 0."""
    m = as_map(values)
    mk = as_mask(mask)
    if m.shape != mk.shape:
        raise ValueError(f"map and mask dimensions differ: {m.shape} vs {mk.shape}")
    return np.where(mk != 0, m, 0.0)
