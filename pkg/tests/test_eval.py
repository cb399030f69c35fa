"""IoU, box rescaling, and accuracy-table behavior."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salbox.boxgen import BoundingBox
from salbox.errors import DataError
from salbox.evaluate import (
    GroundTruthRecord,
    PredictionRecord,
    accuracy_table,
    iou,
    scale_box,
)


def raster_iou(a: BoundingBox, b: BoundingBox, size: int = 80) -> float:
    """Count-the-pixels oracle on an explicit grid."""
    grid_a = np.zeros((size, size), dtype=bool)
    grid_b = np.zeros((size, size), dtype=bool)
    grid_a[a.y1 : a.y2, a.x1 : a.x2] = True
    grid_b[b.y1 : b.y2, b.x1 : b.x2] = True
    union = np.logical_or(grid_a, grid_b).sum()
    inter = np.logical_and(grid_a, grid_b).sum()
    return 0.0 if union == 0 else inter / union


def random_box(rng, limit: int) -> BoundingBox:
    x1, x2 = sorted(rng.choice(limit + 1, size=2, replace=False))
    y1, y2 = sorted(rng.choice(limit + 1, size=2, replace=False))
    return BoundingBox(int(x1), int(y1), int(x2), int(y2))


class TestIou:
    def test_identical_boxes(self):
        box = BoundingBox(3, 4, 10, 12)
        assert iou(box, box) == 1.0

    def test_disjoint_boxes(self):
        assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(5, 5, 8, 8)) == 0.0

    def test_touching_boxes_do_not_intersect(self):
        assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(2, 0, 4, 2)) == 0.0

    def test_quarter_overlap(self):
        got = iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 5, 15, 15))
        assert got == pytest.approx(25 / 175, abs=1e-12)

    def test_symmetry_and_range_random(self):
        rng = np.random.default_rng(123)
        for _ in range(300):
            a = random_box(rng, 64)
            b = random_box(rng, 64)
            ab = iou(a, b)
            assert ab == iou(b, a)
            assert 0.0 <= ab <= 1.0

    def test_matches_rasterization_oracle(self):
        rng = np.random.default_rng(2024)
        for _ in range(300):
            a = random_box(rng, 64)
            b = random_box(rng, 64)
            assert iou(a, b) == pytest.approx(raster_iou(a, b), abs=1e-9)


class TestScaleBox:
    def test_identity_dims(self):
        box = BoundingBox(3, 5, 9, 11)
        assert scale_box(box, (20, 20), (20, 20)) == box

    def test_upscale_quadrant(self):
        got = scale_box(BoundingBox(0, 0, 112, 112), (224, 224), (1024, 1024))
        assert got == BoundingBox(0, 0, 512, 512)

    def test_one_pixel_box_survives_any_rescale(self):
        box = BoundingBox(13, 7, 14, 8)
        for dims in [(3, 3), (10, 10), (1000, 1000), (17, 5)]:
            scaled = scale_box(box, (20, 20), dims)
            assert scaled.area >= 1
            assert scaled.x2 <= dims[0] and scaled.y2 <= dims[1]

    def test_non_positive_target_dims(self):
        with pytest.raises(ValueError, match="target dimensions"):
            scale_box(BoundingBox(0, 0, 1, 1), (4, 4), (0, 4))

    def test_box_outside_source_dims(self):
        with pytest.raises(ValueError, match="exceeds source"):
            scale_box(BoundingBox(0, 0, 5, 5), (4, 4), (8, 8))

    @given(st.data())
    @settings(max_examples=150)
    def test_round_trip_never_loses_coverage(self, data):
        fw = data.draw(st.integers(2, 64))
        fh = data.draw(st.integers(2, 64))
        tw = data.draw(st.integers(1, 64))
        th = data.draw(st.integers(1, 64))
        x1 = data.draw(st.integers(0, fw - 1))
        x2 = data.draw(st.integers(x1 + 1, fw))
        y1 = data.draw(st.integers(0, fh - 1))
        y2 = data.draw(st.integers(y1 + 1, fh))
        box = BoundingBox(x1, y1, x2, y2)
        down = scale_box(box, (fw, fh), (tw, th))
        back = scale_box(down, (tw, th), (fw, fh))
        assert back.contains(box)


def _truth(image_id, label, box, dims=(64, 64)):
    return GroundTruthRecord(image_id, label, box, dims[0], dims[1])


def _pred(image_id, label, box, dims=(64, 64)):
    return PredictionRecord(image_id, label, box, dims[0], dims[1])


class TestAccuracyTable:
    def test_perfect_predictions(self):
        box = BoundingBox(4, 4, 20, 20)
        truth = [_truth(f"i{k}", "Mass", box) for k in range(3)]
        preds = [_pred(f"i{k}", "Mass", box) for k in range(3)]
        table = accuracy_table(preds, truth, (0.1, 0.5, 0.9), ("Mass",))
        assert (table.accuracy == 1.0).all()
        assert (table.mean == 1.0).all()

    def test_disjoint_predictions(self):
        truth = [_truth("i0", "Mass", BoundingBox(0, 0, 8, 8))]
        preds = [_pred("i0", "Mass", BoundingBox(30, 30, 40, 40))]
        table = accuracy_table(preds, truth, (0.1, 0.5), ("Mass",))
        assert (table.accuracy == 0.0).all()

    def test_hand_counted_mixture(self):
        # IoUs approximately {0.15, 0.35, 0.55, 0.05} via nested boxes:
        # pred (0,0,w,10) inside truth (0,0,20,10) has IoU w/20
        widths = {"a": 3, "b": 7, "c": 11, "d": 1}
        truth = [
            _truth(i, "Mass", BoundingBox(0, 0, 20, 10), (32, 32)) for i in widths
        ]
        preds = [
            _pred(i, "Mass", BoundingBox(0, 0, w, 10), (32, 32))
            for i, w in widths.items()
        ]
        table = accuracy_table(preds, truth, (0.1, 0.3, 0.5), ("Mass",))
        np.testing.assert_allclose(table.accuracy[:, 0], [0.75, 0.50, 0.25])

    def test_missing_prediction_counts_as_undetected(self):
        box = BoundingBox(0, 0, 8, 8)
        truth = [_truth("i0", "Mass", box), _truth("i1", "Mass", box)]
        preds = [_pred("i0", "Mass", box)]
        table = accuracy_table(preds, truth, (0.5,), ("Mass",))
        assert table.accuracy[0, 0] == 0.5

    def test_prediction_rescaled_to_annotation_resolution(self):
        truth = [_truth("i0", "Mass", BoundingBox(0, 0, 512, 512), (1024, 1024))]
        preds = [_pred("i0", "Mass", BoundingBox(0, 0, 112, 112), (224, 224))]
        table = accuracy_table(preds, truth, (0.99,), ("Mass",))
        assert table.accuracy[0, 0] == 1.0

    def test_label_without_ground_truth_is_nan(self):
        truth = [_truth("i0", "Mass", BoundingBox(0, 0, 8, 8))]
        preds = []
        table = accuracy_table(preds, truth, (0.5,), ("Mass", "Nodule"))
        assert table.accuracy[0, 0] == 0.0
        assert math.isnan(table.accuracy[0, 1])
        assert table.mean[0] == 0.0  # mean skips the NaN label

    def test_duplicate_prediction_rejected(self):
        box = BoundingBox(0, 0, 8, 8)
        preds = [_pred("i0", "Mass", box), _pred("i0", "Mass", box)]
        with pytest.raises(DataError, match="duplicate"):
            accuracy_table(preds, [_truth("i0", "Mass", box)], (0.5,), ("Mass",))

    def test_thresholds_must_increase(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            accuracy_table([], [], (0.5, 0.5), ("Mass",))

    def test_thresholds_must_sit_inside_unit_interval(self):
        for bad in [(0.0, 0.5), (0.5, 1.0), (-0.1,)]:
            with pytest.raises(ValueError, match="inside"):
                accuracy_table([], [], bad, ("Mass",))

    def test_columns_non_increasing_in_threshold(self):
        rng = np.random.default_rng(77)
        labels = ("Mass", "Nodule", "Effusion")
        truth, preds = [], []
        for k in range(40):
            label = labels[k % 3]
            t_box = random_box(rng, 60)
            truth.append(_truth(f"i{k}", label, t_box))
            if k % 5 != 0:  # leave some undetected
                preds.append(_pred(f"i{k}", label, random_box(rng, 60)))
        table = accuracy_table(
            preds, truth, (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7), labels
        )
        diffs = np.diff(table.accuracy, axis=0)
        assert (diffs <= 1e-12).all()
