import numpy as np
import pytest

from morphoseg import (
    area_under_f1,
    class_balance_weights,
    counts_at,
    mask_rows,
    match_shapes,
    pr_f1_curve,
    quality_map,
    sample_curve,
)
from morphoseg.evaluation import Match, MatchSet, iou_color, write_curve_csv

from oracles import label_components_oracle, match_oracle


def lm(rows):
    return np.array(rows, np.int32)


def random_partition(rng, shape, p_edge=0.25):
    """Disjoint shapes: components of a random mask."""
    mask = (rng.random(shape) >= p_edge).astype(np.uint8)
    return label_components_oracle(mask, 4)


class TestMatchShapes:
    def test_identical_maps_match_at_one(self, rng):
        part = random_partition(rng, (16, 16))
        ms = match_shapes(part, part)
        assert len(ms.matches) == ms.ref_count == ms.pred_count
        assert all(m.iou == 1.0 for m in ms.matches)

    def test_partial_overlap_above_half(self):
        ref = np.zeros((2, 10), np.int32)
        ref[0, :10] = 1  # 10-pixel shape
        pred = np.zeros((2, 10), np.int32)
        pred[0, :6] = 1  # 6 of those 10 pixels
        ms = match_shapes(ref, pred)
        assert len(ms.matches) == 1
        assert ms.matches[0].iou == pytest.approx(0.6)

    def test_exactly_half_is_not_a_match(self):
        ref = np.zeros((2, 10), np.int32)
        ref[0, :10] = 1
        pred = np.zeros((2, 10), np.int32)
        pred[0, :5] = 1
        assert match_shapes(ref, pred).matches == ()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            match_shapes(lm([[1]]), lm([[1, 1]]))

    def test_matches_all_pairs_oracle(self, rng):
        for _ in range(100):
            ref = random_partition(rng, (32, 32), float(rng.uniform(0.1, 0.5)))
            pred = random_partition(rng, (32, 32), float(rng.uniform(0.1, 0.5)))
            ms = match_shapes(ref, pred)
            got = sorted((m.ref_label, m.pred_label, m.iou) for m in ms.matches)
            want = match_oracle(ref, pred)
            assert [(r, p) for r, p, _ in got] == [(r, p) for r, p, _ in want]
            for (_, _, a), (_, _, b) in zip(got, want):
                assert a == pytest.approx(b, abs=1e-12)

    def test_uniqueness_property(self, rng):
        for _ in range(50):
            ref = random_partition(rng, (24, 24))
            pred = random_partition(rng, (24, 24))
            ms = match_shapes(ref, pred)
            refs = [m.ref_label for m in ms.matches]
            preds = [m.pred_label for m in ms.matches]
            assert len(refs) == len(set(refs))
            assert len(preds) == len(set(preds))


def two_match_set():
    return MatchSet(
        matches=(Match(1, 1, 0.6), Match(2, 2, 0.9)), ref_count=3, pred_count=2
    )


class TestCountsAt:
    def test_perfect_set(self):
        ms = MatchSet(tuple(Match(i, i, 1.0) for i in range(1, 5)), 4, 4)
        assert counts_at(ms, 0.75) == (4, 0, 0)
        assert counts_at(ms, 1.0) == (4, 0, 0)

    def test_mixed_set_high_threshold(self):
        assert counts_at(two_match_set(), 0.8) == (1, 1, 2)

    def test_mixed_set_low_threshold(self):
        assert counts_at(two_match_set(), 0.55) == (2, 0, 1)

    def test_threshold_range_enforced(self):
        ms = two_match_set()
        for bad in (0.5, 0.0, 1.01):
            with pytest.raises(ValueError):
                counts_at(ms, bad)

    def test_count_identities(self, rng):
        ms = two_match_set()
        for t in (0.51, 0.6, 0.7, 0.9, 1.0):
            tp, fp, fn = counts_at(ms, t)
            assert tp + fn == ms.ref_count
            assert tp + fp == ms.pred_count


class TestCurve:
    def test_perfect_detector_flat_at_one(self):
        ms = MatchSet(tuple(Match(i, i, 1.0) for i in range(1, 4)), 3, 3)
        curve = pr_f1_curve(ms)
        assert [p.threshold for p in curve] == [0.5, 1.0]
        assert all(p.precision == p.recall == p.f1 == 1.0 for p in curve)

    def test_one_point_per_distinct_iou(self):
        curve = pr_f1_curve(two_match_set())
        assert [p.threshold for p in curve] == [0.5, 0.6, 0.9, 1.0]

    def test_empty_match_set(self):
        curve = pr_f1_curve(MatchSet((), 3, 2))
        assert all(p.tp == 0 and p.f1 == 0.0 for p in curve)

    def test_monotone_non_increasing(self, rng):
        for _ in range(50):
            n = int(rng.integers(0, 12))
            ious = rng.uniform(0.5001, 1.0, n)
            ms = MatchSet(
                tuple(Match(i + 1, i + 1, float(v)) for i, v in enumerate(ious)),
                n + int(rng.integers(0, 5)),
                n + int(rng.integers(0, 5)),
            )
            curve = pr_f1_curve(ms)
            for a, b in zip(curve, curve[1:]):
                assert b.precision <= a.precision + 1e-12
                assert b.recall <= a.recall + 1e-12
                assert b.f1 <= a.f1 + 1e-12

    def test_csv_export_format(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_curve_csv(pr_f1_curve(two_match_set()), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "threshold,precision,recall,f1,tp,fp,fn"
        assert lines[1].startswith("0.500000,1.000000,0.666667,0.800000,2,0,1")

    def test_sampled_curve_length(self):
        pts = sample_curve(two_match_set(), step=0.01)
        assert len(pts) == 51
        assert pts[0].threshold == 0.5 and pts[-1].threshold == pytest.approx(1.0)


class TestAreaUnderF1:
    def test_perfect_is_half(self):
        ms = MatchSet(tuple(Match(i, i, 1.0) for i in range(1, 3)), 2, 2)
        assert area_under_f1(pr_f1_curve(ms)) == 0.5

    def test_no_matches_is_zero(self):
        assert area_under_f1(pr_f1_curve(MatchSet((), 4, 4))) == 0.0

    def test_single_match_step(self):
        ms = MatchSet((Match(1, 1, 0.75),), 1, 1)
        assert area_under_f1(pr_f1_curve(ms)) == pytest.approx(0.25)

    def test_bounds_random(self, rng):
        for _ in range(100):
            n = int(rng.integers(0, 10))
            ious = rng.uniform(0.5001, 1.0, n)
            ms = MatchSet(
                tuple(Match(i + 1, i + 1, float(v)) for i, v in enumerate(ious)),
                n + int(rng.integers(0, 4)),
                n + int(rng.integers(0, 4)),
            )
            auc = area_under_f1(pr_f1_curve(ms))
            assert 0.0 <= auc <= 0.5


class TestQualityMap:
    def test_ramp_endpoints(self):
        assert iou_color(0.0) == (255, 0, 0)
        assert iou_color(0.5) == (255, 255, 0)
        assert iou_color(1.0) == (0, 255, 0)

    def test_ramp_continuous_at_half(self):
        below = iou_color(0.5)
        above = iou_color(0.5 + 1e-12)
        assert below == (255, 255, 0)
        assert above[0] == 255 and above[1] == 255

    def test_identical_maps_all_green(self, rng):
        part = random_partition(rng, (12, 12))
        img = quality_map(part, part, "recall")
        shape_pixels = img[part > 0]
        assert (shape_pixels == (0, 255, 0)).all()

    def test_background_white_by_default(self, rng):
        part = random_partition(rng, (12, 12))
        img = quality_map(part, part, "precision")
        assert (img[part == 0] == (255, 255, 255)).all()

    def test_background_flag(self, rng):
        part = random_partition(rng, (8, 8))
        img = quality_map(part, part, "precision", background=(0, 0, 0))
        assert (img[part == 0] == (0, 0, 0)).all()

    def test_unmatched_shape_is_red(self):
        subject = lm([[1, 1, 0, 0]])
        other = lm([[0, 0, 0, 2]])
        img = quality_map(subject, other, "precision")
        assert tuple(img[0, 0]) == (255, 0, 0)

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            quality_map(lm([[1]]), lm([[1]]), "accuracy")


class TestMaskRows:
    def test_full_range_identity_up_to_densify(self, rng):
        part = random_partition(rng, (10, 10))
        assert np.array_equal(mask_rows(part, 0, 10), part)

    def test_shape_outside_band_disappears(self):
        part = lm([[1, 1], [0, 0], [2, 2]])
        out = mask_rows(part, 1, 3)
        assert out.tolist() == [[0, 0], [0, 0], [1, 1]]

    def test_straddling_shape_is_clipped(self):
        part = lm([[1, 0], [1, 0], [1, 2]])
        out = mask_rows(part, 1, 3)
        assert out.tolist() == [[0, 0], [1, 0], [1, 2]]

    def test_invalid_range(self):
        part = lm([[1], [2]])
        for bad in ((-1, 2), (0, 0), (1, 1), (0, 3)):
            with pytest.raises(ValueError):
                mask_rows(part, *bad)

    def test_labels_redensified(self):
        part = lm([[1, 1], [2, 2], [3, 3]])
        out = mask_rows(part, 1, 3)
        assert sorted(np.unique(out[out > 0])) == [1, 2]


class TestClassBalanceWeights:
    def test_printed_formula(self):
        alpha, beta = class_balance_weights(25, 975, 1.1)
        assert alpha == pytest.approx(1.0725)
        assert beta == pytest.approx(0.025)

    def test_balanced_classes(self):
        assert class_balance_weights(10, 10, 1.0) == (0.5, 0.5)

    def test_degenerate_edge_class(self):
        alpha, beta = class_balance_weights(0, 50, 1.1)
        assert alpha == pytest.approx(1.1)
        assert beta == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            class_balance_weights(0, 0)
