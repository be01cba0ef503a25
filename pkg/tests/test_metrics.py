from fractions import Fraction

import numpy as np
import pytest

from sentilens.metrics import (
    classification_report,
    confusion_matrix,
    weighted_f1,
)

# Back-solved from the published report: supports (776, 4067) with recalls
# (0.90, 0.82) give diagonal counts 698 and 3335; consistency of every
# derived metric is asserted below.
REFERENCE_CM = np.array([[698, 78], [732, 3335]])


class TestConfusionMatrix:
    def test_perfect_diagonal(self):
        cm = confusion_matrix([0, 1, 1], [0, 1, 1])
        np.testing.assert_array_equal(cm, [[1, 0], [0, 2]])

    def test_all_positive_predictions(self):
        cm = confusion_matrix([1, 1, 1], [0, 0, 1])
        np.testing.assert_array_equal(cm, [[0, 2], [0, 1]])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion_matrix([0, 1], [0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            confusion_matrix([], [])

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            confusion_matrix([0, 2], [0, 1])

    def test_reference_matrix_consistency(self):
        # row sums must reproduce the published supports
        assert REFERENCE_CM[0].sum() == 776
        assert REFERENCE_CM[1].sum() == 4067
        # and the recalls round to the published 0.90 / 0.82
        assert round(698 / 776, 2) == 0.90
        assert round(3335 / 4067, 2) == 0.82


class TestClassificationReport:
    def test_reference_matrix_metrics(self):
        report = classification_report(REFERENCE_CM)
        neg, pos = report.per_class
        assert abs(float(report.accuracy) - 0.83) <= 0.005
        assert abs(float(neg.precision) - 0.49) <= 0.005
        assert abs(float(neg.recall) - 0.90) <= 0.005
        assert abs(float(neg.f1) - 0.63) <= 0.005
        assert abs(float(pos.precision) - 0.98) <= 0.005
        assert abs(float(pos.recall) - 0.82) <= 0.005
        assert abs(float(pos.f1) - 0.89) <= 0.005
        assert abs(float(report.weighted[2]) - 0.85) <= 0.005
        assert neg.support == 776
        assert pos.support == 4067
        assert report.total == 4843

    def test_reference_matrix_exact_fractions(self):
        report = classification_report(REFERENCE_CM)
        neg, pos = report.per_class
        assert neg.precision == Fraction(698, 1430)
        assert neg.recall == Fraction(698, 776)
        assert pos.precision == Fraction(3335, 3413)
        assert report.accuracy == Fraction(4033, 4843)

    def test_perfect_classifier(self):
        report = classification_report(np.array([[5, 0], [0, 5]]))
        for cm in report.per_class:
            assert cm.precision == cm.recall == cm.f1 == 1
        assert report.accuracy == 1
        assert report.macro == (1, 1, 1)
        assert report.weighted == (1, 1, 1)

    def test_degenerate_predictor_zero_division(self):
        report = classification_report(np.array([[0, 4], [0, 6]]))
        neg, pos = report.per_class
        assert neg.recall == 0
        assert pos.recall == 1
        assert report.accuracy == Fraction(6, 10)
        assert neg.precision == 0  # empty predicted-negative column
        assert neg.f1 == 0

    def test_weighted_f1_is_support_weighted_mean_exactly(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            cm = rng.integers(0, 50, size=(2, 2))
            if cm.sum() == 0:
                continue
            report = classification_report(cm)
            neg, pos = report.per_class
            expected = (neg.f1 * neg.support + pos.f1 * pos.support) / report.total
            assert report.weighted[2] == expected  # exact rational equality

    def test_accuracy_is_trace_over_total(self):
        cm = np.array([[3, 2], [1, 4]])
        report = classification_report(cm)
        assert report.accuracy == Fraction(7, 10)

    def test_micro_f1_equals_accuracy(self):
        # pooled-count F1 == accuracy for binary single-label problems
        rng = np.random.default_rng(1)
        for _ in range(50):
            cm = rng.integers(0, 40, size=(2, 2))
            if cm.sum() == 0 or cm[:, 0].sum() == 0 or cm[:, 1].sum() == 0:
                continue
            report = classification_report(cm)
            tp = Fraction(int(cm[0, 0] + cm[1, 1]))
            micro_p = tp / int(cm.sum())  # pooled TP / all predictions
            micro_r = tp / int(cm.sum())  # pooled TP / all true labels
            micro_f1 = 2 * micro_p * micro_r / (micro_p + micro_r)
            assert micro_f1 == report.accuracy

    def test_permutation_invariance(self):
        rng = np.random.default_rng(2)
        labels = rng.integers(0, 2, size=200)
        preds = rng.integers(0, 2, size=200)
        base = classification_report(confusion_matrix(preds, labels))
        order = rng.permutation(200)
        permuted = classification_report(confusion_matrix(preds[order], labels[order]))
        assert base == permuted

    def test_format_table_layout(self):
        table = classification_report(REFERENCE_CM).format_table()
        lines = table.splitlines()
        assert lines[1].startswith("Negative")
        assert lines[2].startswith("Positive")
        assert lines[3].startswith("Accuracy")
        assert lines[4].startswith("Macro Avg")
        assert lines[5].startswith("Weighted Avg")
        assert "0.49" in lines[1] and "0.90" in lines[1] and "0.63" in lines[1]
        assert "0.85" in lines[5]

    def test_to_dict_full_precision(self):
        data = classification_report(REFERENCE_CM).to_dict()
        assert data["negative"]["precision"] == 698 / 1430
        assert data["accuracy"] == 4033 / 4843

    def test_invalid_matrices(self):
        with pytest.raises(ValueError):
            classification_report(np.zeros((2, 2), dtype=int))
        with pytest.raises(ValueError):
            classification_report(np.array([[1, -1], [0, 0]]))


def test_weighted_f1_helper():
    assert weighted_f1([0, 1, 1, 0], [0, 1, 1, 0]) == 1.0
