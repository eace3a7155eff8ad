"""F-scores and the aggregated task metrics."""

from typing import Sequence, Tuple, Union

import numpy as np

from framework.exceptions import ContractError

from .confusion import ConfusionCounts

Count = Union[int, float, np.ndarray]


def fbeta(tp: Count, fp: Count, fn: Count, beta: float = 1.0) -> Union[float, np.ndarray]:
    """``(1 + b^2) TP / ((1 + b^2) TP + b^2 FN + FP)``; 0 where the denominator is 0."""
    b2 = beta * beta
    tp, fp, fn = (np.asarray(v, dtype=np.float64) for v in (tp, fp, fn))
    num = (1.0 + b2) * tp
    den = num + b2 * fn + fp
    score = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(score) if score.ndim == 0 else score


def per_class_fbeta(counts: ConfusionCounts, beta: float = 1.0) -> np.ndarray:
    return np.atleast_1d(fbeta(counts.tp, counts.fp, counts.fn, beta))


def micro_macro_f1(counts: ConfusionCounts) -> Tuple[float, float]:
    """(micro-F1 over pooled counts, macro-F1 averaged over classes)."""
    micro = fbeta(counts.tp.sum(), counts.fp.sum(), counts.fn.sum(), 1.0)
    macro = float(per_class_fbeta(counts, 1.0).mean())
    return float(micro), macro


def f2_ciw(per_class_f2: Sequence[float], ciw: Sequence[float]) -> float:
    """Importance-weighted mean of per-class F2 scores."""
    f2 = np.asarray(per_class_f2, dtype=np.float64)
    w = np.asarray(ciw, dtype=np.float64)
    if f2.shape != w.shape:
        raise ContractError(
            f"Got {f2.size} F2 scores but {w.size} importance weights",
            details={"scores": f2.size, "weights": w.size},
        )
    return float((w * f2).sum() / w.sum())


def f1_normal(predictions: np.ndarray, targets: np.ndarray) -> float:
    """Binary F1 of the "no class present" event of a multi-label task."""
    pred_normal = ~np.asarray(predictions).astype(bool).any(axis=1)
    true_normal = ~np.asarray(targets).astype(bool).any(axis=1)
    tp = int((pred_normal & true_normal).sum())
    fp = int((pred_normal & ~true_normal).sum())
    fn = int((~pred_normal & true_normal).sum())
    return float(fbeta(tp, fp, fn, 1.0))
