"""F-scores, confusion counts, metric reports and the multi-task gain."""

from .confusion import ConfusionCounts
from .report import HEADLINE_METRICS, MetricReport, delta_mtl, evaluate_predictions
from .scores import f1_normal, f2_ciw, fbeta, micro_macro_f1, per_class_fbeta

__all__ = [
    "HEADLINE_METRICS",
    "ConfusionCounts",
    "MetricReport",
    "delta_mtl",
    "evaluate_predictions",
    "f1_normal",
    "f2_ciw",
    "fbeta",
    "micro_macro_f1",
    "per_class_fbeta",
]
