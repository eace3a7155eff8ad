"""The full multi-task objective evaluated on one batch."""

from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from domain.graph import TaskSchema
from domain.model import TaskOutput
from domain.numerics import Tensor

from .losses import auxiliary_combine, multiclass_loss, multilabel_loss, total_loss
from .weights import TaskWeights


@dataclass
class LossBreakdown:
    total: Tensor
    final: Dict[str, float]
    aux: Dict[str, float]
    combined: Dict[str, float]


class MultiTaskCriterion:
    """
    Per task, the final-head loss and the auxiliary-head loss are mixed with
    ``omega``; the mixed task losses are then summed with the scaled task
    weights.
    """

    def __init__(
        self,
        schema: TaskSchema,
        task_weights: TaskWeights,
        class_weights: Mapping[str, np.ndarray],
        omega: float,
    ):
        self.schema = schema
        self.task_weights = task_weights
        self.class_weights = dict(class_weights)
        self.omega = omega

    def task_loss(self, name: str, logits: Tensor, targets: np.ndarray) -> Tensor:
        if self.schema.task(name).is_multi_label:
            return multilabel_loss(logits, targets, self.class_weights[name])
        return multiclass_loss(logits, targets, self.class_weights[name])

    def __call__(self, output: TaskOutput, targets: Mapping[str, np.ndarray]) -> LossBreakdown:
        final: Dict[str, Tensor] = {}
        aux: Dict[str, Tensor] = {}
        combined: Dict[str, Tensor] = {}
        for name in self.schema.names:
            final[name] = self.task_loss(name, output.logits[name], targets[name])
            if output.aux_logits[name] is output.logits[name]:
                aux[name] = final[name]
            else:
                aux[name] = self.task_loss(name, output.aux_logits[name], targets[name])
            combined[name] = auxiliary_combine(final[name], aux[name], self.omega)
        return LossBreakdown(
            total=total_loss(combined, self.task_weights),
            final={k: v.item() for k, v in final.items()},
            aux={k: v.item() for k, v in aux.items()},
            combined={k: v.item() for k, v in combined.items()},
        )
