"""Saliency-map fusion and bounding-box generation for disease localization.

The pipeline scales a class heatmap and a high-resolution gradient map to
[0, 255], fuses them as a convex combination, thresholds the fused map
into a binary mask, extracts maximal all-ones rectangles, optionally
grows them by a ring-ratio rule, and keeps the rectangle with the highest
mean masked intensity. Evaluation scores generated boxes against
annotated ground truth as detection accuracy across IoU cutoffs.
"""

from salbox._dispatch import kernel_backend
from salbox.boxgen import (
    BoundingBox,
    expand_box,
    generate_bbox,
    max_rectangles,
    select_box,
)
from salbox.errors import (
    DataError,
    InsufficientNegativesError,
    MapFormatError,
    NoPositiveSampleError,
    NoRegionError,
    PipelineError,
)
from salbox.evaluate import (
    DEFAULT_IOU_THRESHOLDS,
    EvalTable,
    GroundTruthRecord,
    PredictionRecord,
    accuracy_table,
    iou,
    scale_box,
)
from salbox.losses import (
    DEFAULT_EPSILON,
    DEFAULT_LAMBDA,
    LossParams,
    bce_loss,
    contrastive_loss,
    cosine_sim,
    total_loss,
)
from salbox.maps import (
    DEFAULT_HEAT_WEIGHT,
    DEFAULT_THRESHOLD_FRAC,
    DEFAULT_TOP_K,
    FusionParams,
    apply_mask,
    fuse,
    scale_to_255,
    threshold_mask,
)
from salbox.sampling import MetadataRecord, sample_pairs

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "DEFAULT_EPSILON",
    "DEFAULT_HEAT_WEIGHT",
    "DEFAULT_IOU_THRESHOLDS",
    "DEFAULT_LAMBDA",
    "DEFAULT_THRESHOLD_FRAC",
    "DEFAULT_TOP_K",
    "DataError",
    "EvalTable",
    "FusionParams",
    "GroundTruthRecord",
    "InsufficientNegativesError",
    "LossParams",
    "MapFormatError",
    "MetadataRecord",
    "NoPositiveSampleError",
    "NoRegionError",
    "PipelineError",
    "PredictionRecord",
    "accuracy_table",
    "apply_mask",
    "bce_loss",
    "contrastive_loss",
    "cosine_sim",
    "expand_box",
    "fuse",
    "generate_bbox",
    "iou",
    "kernel_backend",
    "max_rectangles",
    "sample_pairs",
    "scale_box",
    "scale_to_255",
    "select_box",
    "threshold_mask",
    "total_loss",
]
