"""Per-task losses, class weighting and the task-weighted training objective."""

from .criterion import LossBreakdown, MultiTaskCriterion
from .losses import auxiliary_combine, multiclass_loss, multilabel_loss, total_loss
from .weights import (
    TaskWeights,
    ciw_vector,
    class_weights,
    default_primary_task,
    effective_number_weights,
)

__all__ = [
    "LossBreakdown",
    "MultiTaskCriterion",
    "TaskWeights",
    "auxiliary_combine",
    "ciw_vector",
    "class_weights",
    "default_primary_task",
    "effective_number_weights",
    "multiclass_loss",
    "multilabel_loss",
    "total_loss",
]
