"""Box IoU, resolution rescaling, and detection-accuracy tables."""

import math
from dataclasses import dataclass

import numpy as np

from salbox.boxgen import BoundingBox
from salbox.errors import DataError

DEFAULT_IOU_THRESHOLDS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)


@dataclass(frozen=True)
class GroundTruthRecord:
    """Radiologist-annotated box, in the original image's resolution."""

    image_id: str
    label: str
    box: BoundingBox
    image_w: int
    image_h: int

    def __post_init__(self):
        if self.image_w < 1 or self.image_h < 1:
            raise ValueError(
                f"image dimensions must be positive, got {self.image_w}x{self.image_h}"
            )
        if self.box.x2 > self.image_w or self.box.y2 > self.image_h:
            raise ValueError(
                f"box {self.box.as_tuple()} exceeds declared image "
                f"dimensions {self.image_w}x{self.image_h}"
            )


@dataclass(frozen=True)
class PredictionRecord:
    """Generated box, in the resolution of the map it was produced from."""

    image_id: str
    label: str
    box: BoundingBox
    map_w: int
    map_h: int

    def __post_init__(self):
        if self.map_w < 1 or self.map_h < 1:
            raise ValueError(
                f"map dimensions must be positive, got {self.map_w}x{self.map_h}"
            )
        if self.box.x2 > self.map_w or self.box.y2 > self.map_h:
            raise ValueError(
                f"box {self.box.as_tuple()} exceeds map dimensions "
                f"{self.map_w}x{self.map_h}"
            )


@dataclass(frozen=True)
class EvalTable:
    """Detection accuracy per (IoU threshold, disease label).

    accuracy is indexed [threshold, label]; cells with no ground truth for
    the label are NaN. mean holds the unweighted per-threshold mean over
    labels that do have ground truth.
    """

    thresholds: tuple[float, ...]
    labels: tuple[str, ...]
    accuracy: np.ndarray
    mean: np.ndarray


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection area over union area; 0.0 for disjoint boxes."""
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def scale_box(
    box: BoundingBox,
    from_dims: tuple[int, int],
    to_dims: tuple[int, int],
) -> BoundingBox:
    """Rescale a box between resolutions, rounding outward.

    x1/y1 round down and x2/y2 round up (exact integer arithmetic), so a
    box never collapses and stays inside the target dimensions.
    """
    fw, fh = from_dims
    tw, th = to_dims
    if fw < 1 or fh < 1:
        raise ValueError(f"source dimensions must be positive, got {fw}x{fh}")
    if tw < 1 or th < 1:
        raise ValueError(f"target dimensions must be positive, got {tw}x{th}")
    if box.x2 > fw or box.y2 > fh:
        raise ValueError(
            f"box {box.as_tuple()} exceeds source dimensions {fw}x{fh}"
        )
    return BoundingBox(
        (box.x1 * tw) // fw,
        (box.y1 * th) // fh,
        -((-box.x2 * tw) // fw),
        -((-box.y2 * th) // fh),
    )


def accuracy_table(
    preds: list[PredictionRecord],
    truth: list[GroundTruthRecord],
    thresholds=DEFAULT_IOU_THRESHOLDS,
    labels=None,
) -> EvalTable:
    """Detection accuracy over (image, label) pairs present in the ground truth.

    A ground-truth record counts as detected at threshold T when a
    prediction with the same (image_id, label) reaches IoU >= T after
    rescaling the predicted box to the annotation's resolution; records
    with no prediction count as undetected. accuracy = detected / annotated
    per label. Labels with no ground truth get NaN cells.
    """
    thresholds = tuple(float(t) for t in thresholds)
    if not thresholds:
        raise ValueError("at least one IoU threshold is required")
    if any(not 0.0 < t < 1.0 for t in thresholds):
        raise ValueError(f"thresholds must lie strictly inside (0, 1), got {thresholds}")
    if any(t2 <= t1 for t1, t2 in zip(thresholds, thresholds[1:])):
        raise ValueError(f"thresholds must be strictly increasing, got {thresholds}")
    if labels is None:
        labels = tuple(sorted({rec.label for rec in truth}))
    else:
        labels = tuple(labels)

    by_key: dict[tuple[str, str], PredictionRecord] = {}
    for pred in preds:
        key = (pred.image_id, pred.label)
        if key in by_key:
            raise DataError(f"duplicate prediction for image {key[0]!r} label {key[1]!r}")
        by_key[key] = pred

    ious: dict[str, list[float]] = {label: [] for label in labels}
    for rec in truth:
        if rec.label not in ious:
            continue
        pred = by_key.get((rec.image_id, rec.label))
        if pred is None:
            ious[rec.label].append(0.0)
            continue
        scaled = scale_box(
            pred.box, (pred.map_w, pred.map_h), (rec.image_w, rec.image_h)
        )
        ious[rec.label].append(iou(scaled, rec.box))

    accuracy = np.full((len(thresholds), len(labels)), math.nan)
    for j, label in enumerate(labels):
        scores = ious[label]
        if not scores:
            continue
        for i, t in enumerate(thresholds):
            hits = sum(1 for s in scores if s >= t)
            accuracy[i, j] = hits / len(scores)

    with np.errstate(invalid="ignore"):
        have = ~np.isnan(accuracy)
        mean = np.where(
            have.any(axis=1),
            np.nansum(np.where(have, accuracy, 0.0), axis=1)
            / np.maximum(have.sum(axis=1), 1),
            math.nan,
        )
    return EvalTable(thresholds, labels, accuracy, mean)
