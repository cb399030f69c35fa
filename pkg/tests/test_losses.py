"""Loss formulas against scalar oracles, plus pair-sampling behavior."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salbox.errors import InsufficientNegativesError, NoPositiveSampleError
from salbox.losses import LossParams, bce_loss, contrastive_loss, cosine_sim, total_loss
from salbox.sampling import MetadataRecord, sample_pairs


def scalar_cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    return dot / (na * nb)


def scalar_contrastive(z_q, z_pos, z_negs, tau):
    num = math.exp(scalar_cosine(z_q, z_pos) / tau)
    den = num + sum(math.exp(scalar_cosine(z_q, z) / tau) for z in z_negs)
    return -math.log(num / den)


def scalar_bce(y, y_hat, eps=1e-12):
    total = 0.0
    for yn, pn in zip(y, y_hat):
        pn = min(max(pn, eps), 1.0 - eps)
        total += -yn * math.log(pn) - (1.0 - yn) * math.log(1.0 - pn)
    return total


class TestCosineSim:
    def test_identical_vectors(self):
        v = [3.0, -1.0, 2.0]
        assert cosine_sim(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_unit_vectors(self):
        assert cosine_sim([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_known_angle(self):
        assert cosine_sim([1.0, 0.0], [1.0, 1.0]) == pytest.approx(
            1.0 / math.sqrt(2), abs=1e-12
        )

    def test_zero_norm_rejected(self):
        with pytest.raises(ValueError, match="zero-norm"):
            cosine_sim([0.0, 0.0], [1.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimensions differ"):
            cosine_sim([1.0], [1.0, 2.0])

    def test_range_is_clipped(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a = rng.normal(size=4)
            b = rng.normal(size=4)
            assert -1.0 <= cosine_sim(a, b) <= 1.0


class TestContrastiveLoss:
    def test_query_equals_positive_one_orthogonal_negative(self):
        loss = contrastive_loss([1.0, 0.0], [1.0, 0.0], [[0.0, 1.0]], tau=1.0)
        assert loss == pytest.approx(-math.log(math.e / (math.e + 1.0)), abs=1e-12)

    def test_positive_and_negative_both_equal_query(self):
        loss = contrastive_loss([1.0, 1.0], [1.0, 1.0], [[1.0, 1.0]], tau=1.0)
        assert loss == pytest.approx(math.log(2.0), abs=1e-12)

    def test_temperature_cancels_when_similarities_equal(self):
        q = [0.0, 2.0]
        negs = [q, q, q]
        for tau in (0.1, 1.0, 10.0):
            assert contrastive_loss(q, q, negs, tau) == pytest.approx(
                math.log(4.0), abs=1e-12
            )

    def test_empty_negatives_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            contrastive_loss([1.0], [1.0], [], tau=1.0)

    def test_non_positive_tau_rejected(self):
        with pytest.raises(ValueError, match="temperature"):
            contrastive_loss([1.0], [1.0], [[1.0]], tau=0.0)

    @given(st.data())
    @settings(max_examples=100)
    def test_matches_scalar_oracle_and_is_nonnegative(self, data):
        dim = data.draw(st.integers(2, 5))
        unit = st.lists(
            st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3),
            min_size=dim,
            max_size=dim,
        )
        z_q = data.draw(unit)
        z_pos = data.draw(unit)
        z_negs = data.draw(st.lists(unit, min_size=1, max_size=4))
        tau = data.draw(st.floats(0.1, 5.0))
        got = contrastive_loss(z_q, z_pos, z_negs, tau)
        assert got == pytest.approx(scalar_contrastive(z_q, z_pos, z_negs, tau), abs=1e-9)
        assert got >= 0.0

    def test_decreasing_in_positive_similarity(self):
        z_q = [1.0, 0.0]
        negs = [[0.0, 1.0], [-1.0, 0.5]]
        angles = np.linspace(0.0, math.pi * 0.9, 12)
        losses = [
            contrastive_loss(z_q, [math.cos(a), math.sin(a)], negs, tau=0.5)
            for a in angles
        ]
        assert all(l1 < l2 for l1, l2 in zip(losses, losses[1:]))


class TestBceLoss:
    def test_perfect_prediction_is_near_zero(self):
        assert bce_loss([1.0], [1.0 - 1e-12]) <= 10 * 1e-12

    def test_half_confidence(self):
        assert bce_loss([1.0], [0.5]) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_two_class_sum(self):
        assert bce_loss([0.0, 1.0], [0.5, 0.5]) == pytest.approx(
            2.0 * math.log(2.0), abs=1e-12
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="lengths differ"):
            bce_loss([1.0, 0.0], [0.5])

    def test_non_binary_labels_rejected(self):
        with pytest.raises(ValueError, match="0 or 1"):
            bce_loss([0.5], [0.5])

    def test_saturated_predictions_are_clamped(self):
        assert math.isfinite(bce_loss([1.0, 0.0], [0.0, 1.0]))

    @given(st.data())
    @settings(max_examples=100)
    def test_matches_scalar_oracle(self, data):
        n = data.draw(st.integers(1, 6))
        y = data.draw(st.lists(st.sampled_from([0.0, 1.0]), min_size=n, max_size=n))
        y_hat = data.draw(st.lists(st.floats(0.001, 0.999), min_size=n, max_size=n))
        assert bce_loss(y, y_hat) == pytest.approx(scalar_bce(y, y_hat), abs=1e-9)

    def test_grows_away_from_truth(self):
        steps = np.linspace(0.9, 0.1, 9)
        losses = [bce_loss([1.0], [p]) for p in steps]
        assert all(l1 < l2 for l1, l2 in zip(losses, losses[1:]))


class TestTotalLoss:
    def test_endpoints_exact(self):
        assert total_loss(1.25, 0.75, 1.0) == 1.25
        assert total_loss(1.25, 0.75, 0.0) == 0.75

    def test_paper_default_mix(self):
        assert total_loss(1.0, 0.5, 0.80) == pytest.approx(0.90, abs=1e-12)

    def test_lambda_out_of_range(self):
        with pytest.raises(ValueError, match="lambda"):
            total_loss(1.0, 1.0, 1.5)

    @given(
        st.floats(0, 100),
        st.floats(0, 100),
        st.floats(0, 1),
        st.floats(0.1, 3.0),
    )
    def test_linear_in_both_arguments(self, ce, con, lam, scale):
        direct = total_loss(scale * ce, scale * con, lam)
        assert direct == pytest.approx(scale * total_loss(ce, con, lam), rel=1e-12)


class TestLossParams:
    def test_defaults(self):
        p = LossParams()
        assert p.lam == 0.80
        assert p.epsilon == 1e-12
        assert p.tau == 1.0
        assert p.k == 1

    @pytest.mark.parametrize(
        "kwargs",
        [{"tau": 0.0}, {"tau": -1.0}, {"lam": 1.5}, {"k": 0}, {"epsilon": 0.0}],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            LossParams(**kwargs)


def _table():
    def rec(image_id, patient_id, labels):
        return MetadataRecord(image_id, patient_id, frozenset(labels))

    return [
        rec("img1", "p1", {"Mass"}),
        rec("img2", "p1", {"Mass", "Nodule"}),
        rec("img3", "p1", {"Effusion"}),
        rec("img4", "p2", {"Mass"}),
        rec("img5", "p3", {"Mass"}),
        rec("img6", "p3", {"Nodule"}),
    ]


class TestSamplePairs:
    def test_unique_positive_is_chosen(self):
        positive, _ = sample_pairs(_table(), "img1", "Mass", k=1, seed=0)
        assert positive == "img2"

    def test_no_positive_raises(self):
        with pytest.raises(NoPositiveSampleError):
            sample_pairs(_table(), "img3", "Effusion", k=1, seed=0)

    def test_both_negatives_returned_when_k_equals_pool(self):
        _, negatives = sample_pairs(_table(), "img1", "Mass", k=2, seed=5)
        assert sorted(negatives) == ["img4", "img5"]

    def test_insufficient_negatives_carries_count(self):
        with pytest.raises(InsufficientNegativesError) as excinfo:
            sample_pairs(_table(), "img1", "Mass", k=3, seed=0)
        assert excinfo.value.available == 2
        assert excinfo.value.requested == 3

    def test_negatives_never_share_patient_and_never_repeat(self):
        table = _table() + [
            MetadataRecord(f"x{i}", f"q{i}", frozenset({"Mass"})) for i in range(10)
        ]
        for seed in range(20):
            positive, negatives = sample_pairs(table, "img1", "Mass", k=5, seed=seed)
            assert positive == "img2"
            assert len(set(negatives)) == len(negatives)
            assert "img1" not in negatives and "img2" not in negatives

    def test_same_seed_same_draw(self):
        table = _table() + [
            MetadataRecord(f"x{i}", f"q{i}", frozenset({"Mass"})) for i in range(10)
        ]
        draws = {
            (pos, tuple(negs))
            for pos, negs in (
                sample_pairs(table, "img1", "Mass", k=4, seed=42) for _ in range(5)
            )
        }
        assert len(draws) == 1

    def test_unknown_query_rejected(self):
        with pytest.raises(ValueError, match="not found"):
            sample_pairs(_table(), "nope", "Mass", k=1, seed=0)

    def test_query_without_label_rejected(self):
        with pytest.raises(ValueError, match="does not carry"):
            sample_pairs(_table(), "img3", "Mass", k=1, seed=0)

    def test_duplicate_image_id_rejected(self):
        table = _table() + [MetadataRecord("img1", "p9", frozenset({"Mass"}))]
        with pytest.raises(ValueError, match="duplicate"):
            sample_pairs(table, "img1", "Mass", k=1, seed=0)
