"""Per-class confusion counts for multi-label and multi-class tasks."""

from dataclasses import dataclass

import numpy as np
from sklearn.metrics import confusion_matrix

from framework.exceptions import DimensionError


@dataclass(frozen=True, eq=False)
class ConfusionCounts:
    """One-vs-rest TP/FP/FN/TN per class; every class sums to the sample count."""

    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray

    @property
    def num_classes(self) -> int:
        return int(self.tp.size)

    @property
    def num_samples(self) -> int:
        return int(self.tp[0] + self.fp[0] + self.fn[0] + self.tn[0]) if self.num_classes else 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        if other.num_classes != self.num_classes:
            raise DimensionError("Cannot merge counts of different tasks", shapes=[self.tp.shape, other.tp.shape])
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    @classmethod
    def empty(cls, num_classes: int) -> "ConfusionCounts":
        zeros = np.zeros(num_classes, dtype=np.int64)
        return cls(zeros, zeros.copy(), zeros.copy(), zeros.copy())

    @classmethod
    def from_multilabel(cls, predictions: np.ndarray, targets: np.ndarray) -> "ConfusionCounts":
        pred = np.asarray(predictions).astype(bool)
        true = np.asarray(targets).astype(bool)
        if pred.shape != true.shape or pred.ndim != 2:
            raise DimensionError("Predictions and targets must be equal (N, C) matrices", shapes=[pred.shape, true.shape])
        return cls(
            tp=(pred & true).sum(axis=0).astype(np.int64),
            fp=(pred & ~true).sum(axis=0).astype(np.int64),
            fn=(~pred & true).sum(axis=0).astype(np.int64),
            tn=(~pred & ~true).sum(axis=0).astype(np.int64),
        )

    @classmethod
    def from_multiclass(cls, predictions: np.ndarray, targets: np.ndarray, num_classes: int) -> "ConfusionCounts":
        pred = np.asarray(predictions, dtype=np.int64)
        true = np.asarray(targets, dtype=np.int64)
        if pred.shape != true.shape or pred.ndim != 1:
            raise DimensionError("Predictions and targets must be equal (N,) vectors", shapes=[pred.shape, true.shape])
        if pred.size == 0:
            return cls.empty(num_classes)
        # rows: true class, columns: predicted class
        matrix = confusion_matrix(true, pred, labels=list(range(num_classes)))
        tp = np.diag(matrix).astype(np.int64)
        fp = matrix.sum(axis=0) - tp
        fn = matrix.sum(axis=1) - tp
        tn = matrix.sum() - tp - fp - fn
        return cls(tp, fp.astype(np.int64), fn.astype(np.int64), tn.astype(np.int64))
