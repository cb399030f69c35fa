"""Overlay rendering: fused map as grayscale with drawn boxes.

Colors follow the usual radiology-figure convention: generated boxes in
red, ground truth in yellow.
"""

import numpy as np
from PIL import Image, ImageDraw

from salbox.boxgen import BoundingBox
from salbox.maps import as_map

GENERATED_COLOR = (255, 0, 0)
GROUND_TRUTH_COLOR = (255, 255, 0)


def render_overlay(
    values,
    generated: BoundingBox | None = None,
    truth: BoundingBox | None = None,
    line_width: int = 1,
) -> Image.Image:
    """Render a [0, 255] map to 8-bit RGB with optional boxes drawn on top."""
    arr = as_map(values)
    base = np.round(np.clip(arr, 0.0, 255.0)).astype(np.uint8)
    img = Image.fromarray(base, mode="L").convert("RGB")
    draw = ImageDraw.Draw(img)
    # PIL rectangles take inclusive corners; boxes are half-open.
    if truth is not None:
        draw.rectangle(
            [truth.x1, truth.y1, truth.x2 - 1, truth.y2 - 1],
            outline=GROUND_TRUTH_COLOR,
            width=line_width,
        )
    if generated is not None:
        draw.rectangle(
            [generated.x1, generated.y1, generated.x2 - 1, generated.y2 - 1],
            outline=GENERATED_COLOR,
            width=line_width,
        )
    return img


def save_overlay(values, path, generated=None, truth=None, line_width=1) -> None:
    render_overlay(values, generated, truth, line_width).save(path, format="PNG")
