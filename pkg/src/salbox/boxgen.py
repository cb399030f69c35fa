"""Candidate rectangle extraction, ring expansion, and final box selection."""

from dataclasses import dataclass

import numpy as np

from salbox._dispatch import largest_rectangle
from salbox.errors import NoRegionError
from salbox.maps import (
    DEFAULT_TOP_K,
    FusionParams,
    apply_mask,
    as_map,
    as_mask,
    fuse,
    scale_to_255,
    threshold_mask,
)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel rectangle; (x1, y1) inclusive, (x2, y2) exclusive."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.x1 < 0 or self.y1 < 0:
            raise ValueError(f"box {self.as_tuple()} extends past the image origin")
        if self.x1 >= self.x2 or self.y1 >= self.y2:
            raise ValueError(f"box {self.as_tuple()} is degenerate")

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    @property
    def area(self) -> int:
        return self.width * self.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x1, self.y1, self.x2, self.y2)

    def contains(self, other: "BoundingBox") -> bool:
        return (
            self.x1 <= other.x1
            and self.y1 <= other.y1
            and self.x2 >= other.x2
            and self.y2 >= other.y2
        )


def _check_in_bounds(box: BoundingBox, width: int, height: int) -> None:
    if box.x2 > width or box.y2 > height:
        raise ValueError(
            f"box {box.as_tuple()} exceeds image dimensions {width}x{height}"
        )


def max_rectangles(mask, top_k: int = DEFAULT_TOP_K) -> list[BoundingBox]:
    """Up to top_k disjoint all-ones rectangles, extracted greedily.

    Each iteration finds the largest all-ones rectangle, records it, and
    zeroes its cells in a working copy, so every returned rectangle was
    maximal at the time of its extraction and candidates never overlap.
    An all-zero mask yields an empty list.
    """
    mask = as_mask(mask)
    if top_k < 1:
        raise ValueError(f"top_k must be a positive integer, got {top_k}")
    work = mask.copy()
    out: list[BoundingBox] = []
    for _ in range(top_k):
        rect = largest_rectangle(work)
        if rect is None:
            break
        x1, y1, x2, y2 = rect
        out.append(BoundingBox(x1, y1, x2, y2))
        work[y1:y2, x1:x2] = 0
    return out


def expand_box(box: BoundingBox, mask) -> BoundingBox:
    """Grow a box one pixel per side while the added ring stays majority-ones.

    Each step proposes growing every side by one pixel (sides at the image
    border contribute nothing) and counts zeros and ones in the ring of
    newly added cells. The step is applied only when zeros <= ones; a ring
    with no ones at all stops expansion. The failed step is not applied, so
    the result always contains the input and never absorbs a
    majority-background ring. Growth also stops once the box covers the
    whole image.
    """
    mask = as_mask(mask)
    h, w = mask.shape
    _check_in_bounds(box, w, h)
    x1, y1, x2, y2 = box.as_tuple()
    while (x1, y1, x2, y2) != (0, 0, w, h):
        nx1 = max(x1 - 1, 0)
        ny1 = max(y1 - 1, 0)
        nx2 = min(x2 + 1, w)
        ny2 = min(y2 + 1, h)
        ring_cells = (nx2 - nx1) * (ny2 - ny1) - (x2 - x1) * (y2 - y1)
        ring_ones = int(mask[ny1:ny2, nx1:nx2].sum()) - int(
            mask[y1:y2, x1:x2].sum()
        )
        ring_zeros = ring_cells - ring_ones
        if ring_ones == 0 or ring_zeros > ring_ones:
            break
        x1, y1, x2, y2 = nx1, ny1, nx2, ny2
    return BoundingBox(x1, y1, x2, y2)


def select_box(candidates: list[BoundingBox], masked_map) -> BoundingBox:
    """Candidate with the highest mean intensity on the masked map.

    Zeros inside a box (cells the mask removed) count toward the mean.
    Ties go to the larger area, then to the smaller (y1, x1) corner, so
    selection is deterministic.
    """
    masked = as_map(masked_map)
    if not candidates:
        raise NoRegionError("no candidate rectangles to select from")
    h, w = masked.shape
    best = None
    best_key = None
    for box in candidates:
        _check_in_bounds(box, w, h)
        mean = float(masked[box.y1 : box.y2, box.x1 : box.x2].mean())
        key = (mean, box.area, -box.y1, -box.x1)
        if best_key is None or key > best_key:
            best, best_key = box, key
    return best


def generate_bbox(heat, grad, params: FusionParams | None = None) -> BoundingBox:
    """Full map-pair -> box pipeline.

    Scales both maps to [0, 255], fuses them with weight params.t,
    thresholds the fused map into a mask, extracts candidate rectangles,
    optionally expands them, and selects the one with the highest mean
    masked intensity. Deterministic for identical inputs and params.

    Raises NoRegionError when the mask has no foreground (e.g. both maps
    constant).
    """
    if params is None:
        params = FusionParams()
    heat = scale_to_255(heat)
    grad = scale_to_255(grad)
    fused = fuse(heat, grad, params.t)
    mask = threshold_mask(fused, params.threshold_frac)
    masked = apply_mask(fused, mask)
    candidates = max_rectangles(mask, params.top_k)
    if not candidates:
        raise NoRegionError("threshold mask has no foreground pixels")
    if params.expand:
        candidates = [expand_box(b, mask) for b in candidates]
    return select_box(candidates, masked)
