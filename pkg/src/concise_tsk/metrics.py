"""Classification metrics and model-complexity accounting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ConfusionCounts:
    """One-vs-rest counts per class (arrays of length m)."""

    tp: np.ndarray
    fp: np.ndarray
    tn: np.ndarray
    fn: np.ndarray
    n: int
    correct: int

    @property
    def n_classes(self) -> int:
        return len(self.tp)


def confusion_counts(y_true, y_pred, n_classes: int | None = None) -> ConfusionCounts:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise DataError("label vectors differ in length")
    if n_classes is None:
        n_classes = int(max(y_true.max(initial=-1), y_pred.max(initial=-1))) + 1
    n = y_true.size
    tp = np.array([np.sum((y_true == c) & (y_pred == c)) for c in range(n_classes)])
    fp = np.array([np.sum((y_true != c) & (y_pred == c)) for c in range(n_classes)])
    fn = np.array([np.sum((y_true == c) & (y_pred != c)) for c in range(n_classes)])
    tn = n - tp - fp - fn
    return ConfusionCounts(tp, fp, tn, fn, int(n), int(np.sum(y_true == y_pred)))


def binary_counts(tp, fp, tn, fn) -> ConfusionCounts:
    """Counts for a two-class problem given from the positive class's view."""
    tp_, fp_, tn_, fn_ = (np.array([tn, tp]), np.array([fn, fp]),
                          np.array([tp, tn]), np.array([fp, fn]))
    return ConfusionCounts(tp_, fp_, tn_, fn_, int(tp + fp + tn + fn), int(tp + tn))


def _ratio(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.divide(a, b, out=np.zeros_like(a), where=b > 0)


def accuracy(counts: ConfusionCounts) -> float:
    if counts.n <= 0:
        raise DataError("accuracy of an empty prediction set")
    return counts.correct / counts.n


def precision_recall_f(counts: ConfusionCounts) -> tuple[float, float, float]:
    """Macro-averaged precision and recall; F is the harmonic mean of the two
    macro values.  Any 0/0 is taken as 0."""
    p = float(np.mean(_ratio(counts.tp, counts.tp + counts.fp)))
    r = float(np.mean(_ratio(counts.tp, counts.tp + counts.fn)))
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def rand_index(true_labels, predicted_labels) -> float:
    t = np.asarray(true_labels)
    p = np.asarray(predicted_labels)
    if t.shape != p.shape:
        raise DataError("label vectors differ in length")
    n = t.size
    if n < 2:
        raise DataError("rand index needs at least two samples")
    _, ti = np.unique(t, return_inverse=True)
    _, pi = np.unique(p, return_inverse=True)
    table = np.zeros((ti.max() + 1, pi.max() + 1), dtype=np.int64)
    np.add.at(table, (ti, pi), 1)

    def pairs(x):
        x = np.asarray(x, dtype=np.int64)
        return int(np.sum(x * (x - 1) // 2))

    total = n * (n - 1) // 2
    same_both = pairs(table)
    same_true = pairs(table.sum(axis=1))
    same_pred = pairs(table.sum(axis=0))
    apart_both = total - same_true - same_pred + same_both
    return (same_both + apart_both) / total


def jaccard(counts: ConfusionCounts, positive_class: int = 1) -> float:
    tp = int(counts.tp[positive_class])
    den = tp + int(counts.fp[positive_class]) + int(counts.fn[positive_class])
    return tp / den if den else 0.0


def classification_report(y_true, y_pred, n_classes: int, positive_class: int) -> dict:
    counts = confusion_counts(y_true, y_pred, n_classes)
    p, r, f = precision_recall_f(counts)
    return {
        "accuracy": accuracy(counts),
        "precision": p,
        "recall": r,
        "f_measure": f,
        "rand_index": rand_index(y_true, y_pred),
        "jaccard": jaccard(counts, positive_class),
    }


METRIC_NAMES = ("accuracy", "precision", "recall", "f_measure", "rand_index", "jaccard")


def consequent_params_per_rule(consequent, outputs: int) -> int:
    """Stored consequent parameters for one retained rule.

    A two-class model decides on the difference of its two channels, so each
    rule needs one parameter; otherwise every nonzero channel counts.
    """
    if outputs == 2:
        return 1
    return max(1, int(np.count_nonzero(consequent)))


def model_complexity(model) -> int:
    """Antecedent (2 per selected feature) plus consequent parameter count."""
    return int(sum(2 * r.antecedent.length + consequent_params_per_rule(r.consequent, model.outputs)
                   for r in model.rules))


def baseline_complexity(d: int, K: int, n_classes: int = 2, shared_antecedents: bool = True) -> int:
    """Parameter count of a dense zero-order TSK system using all ``d`` features."""
    if n_classes <= 2:
        return (2 * d + 1) * K
    if shared_antecedents:
        return (2 * d + n_classes) * K
    return n_classes * (2 * d + 1) * K
