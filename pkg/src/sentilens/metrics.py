"""Confusion matrix and classification report for binary labels.

All report arithmetic is exact (``fractions.Fraction`` over integer
counts); rounding happens only at display time. Convention for empty
denominators: precision/recall/F1 are 0.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

CLASS_NAMES = ("Negative", "Positive")  # index 0, index 1


def confusion_matrix(predictions, labels) -> np.ndarray:
    """2x2 count matrix with rows = true class, columns = predicted."""
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.shape != labels.shape or predictions.ndim != 1:
        raise ValueError("predictions and labels must be equal-length 1-D sequences")
    if predictions.size == 0:
        raise ValueError("need at least one example")
    for arr, name in ((predictions, "predictions"), (labels, "labels")):
        if not np.isin(arr, (0, 1)).all():
            raise ValueError(f"{name} must be 0 or 1")
    cm = np.zeros((2, 2), dtype=np.int64)
    np.add.at(cm, (labels, predictions), 1)
    return cm


@dataclass
class ClassMetrics:
    precision: Fraction
    recall: Fraction
    f1: Fraction
    support: int


@dataclass
class ClassificationReport:
    per_class: tuple[ClassMetrics, ClassMetrics]  # (negative, positive)
    accuracy: Fraction
    macro: tuple[Fraction, Fraction, Fraction]  # precision, recall, f1
    weighted: tuple[Fraction, Fraction, Fraction]
    total: int

    def to_dict(self) -> dict:
        """Machine-readable form with full-precision floats."""
        out = {"total": self.total, "accuracy": float(self.accuracy)}
        for name, cm in zip(CLASS_NAMES, self.per_class):
            out[name.lower()] = {
                "precision": float(cm.precision),
                "recall": float(cm.recall),
                "f1": float(cm.f1),
                "support": cm.support,
            }
        for name, triple in (("macro_avg", self.macro), ("weighted_avg", self.weighted)):
            out[name] = {
                "precision": float(triple[0]),
                "recall": float(triple[1]),
                "f1": float(triple[2]),
            }
        return out

    def format_table(self) -> str:
        """Human-readable table (2-decimal display rounding)."""
        rows = [f"{'Class':<14}{'Precision':>10}{'Recall':>10}{'F1-Score':>10}{'Support':>10}"]
        for name, cm in zip(CLASS_NAMES, self.per_class):
            rows.append(
                f"{name:<14}{float(cm.precision):>10.2f}{float(cm.recall):>10.2f}"
                f"{float(cm.f1):>10.2f}{cm.support:>10}"
            )
        rows.append(f"{'Accuracy':<14}{'':>10}{'':>10}{float(self.accuracy):>10.2f}{self.total:>10}")
        for name, triple in (("Macro Avg", self.macro), ("Weighted Avg", self.weighted)):
            rows.append(
                f"{name:<14}{float(triple[0]):>10.2f}{float(triple[1]):>10.2f}"
                f"{float(triple[2]):>10.2f}{self.total:>10}"
            )
        return "\n".join(rows)


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def classification_report(cm: np.ndarray) -> ClassificationReport:
    """Per-class precision/recall/F1/support plus accuracy, macro and
    support-weighted averages, computed exactly from the count matrix."""
    cm = np.asarray(cm, dtype=np.int64)
    if cm.shape != (2, 2) or (cm < 0).any():
        raise ValueError("confusion matrix must be a nonnegative 2x2 count matrix")
    total = int(cm.sum())
    if total == 0:
        raise ValueError("confusion matrix is empty")

    per_class = []
    for c in (0, 1):
        support = int(cm[c].sum())
        precision = _ratio(int(cm[c, c]), int(cm[:, c].sum()))
        recall = _ratio(int(cm[c, c]), support)
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall
            else Fraction(0)
        )
        per_class.append(ClassMetrics(precision, recall, f1, support))

    accuracy = Fraction(int(cm[0, 0] + cm[1, 1]), total)
    macro = tuple(
        (getattr(per_class[0], k) + getattr(per_class[1], k)) / 2
        for k in ("precision", "recall", "f1")
    )
    weighted = tuple(
        sum(getattr(m, k) * m.support for m in per_class) / total
        for k in ("precision", "recall", "f1")
    )
    return ClassificationReport(
        per_class=(per_class[0], per_class[1]),
        accuracy=accuracy,
        macro=macro,
        weighted=weighted,
        total=total,
    )


def weighted_f1(predictions, labels) -> float:
    """Support-weighted mean F1 as a float (shortcut for training loops)."""
    report = classification_report(confusion_matrix(predictions, labels))
    return float(report.weighted[2])
