"""Per-task model outputs and hard predictions."""

from dataclasses import dataclass
from typing import Dict

import numpy as np

from domain.graph import TaskSchema
from domain.numerics import Tensor
from framework.config.constants import DEFAULT_THRESHOLD
from framework.exceptions import ConfigurationException


@dataclass
class TaskOutput:
    """
    Logits of the final (``logits``) and auxiliary (``aux_logits``) heads,
    each ``(B, C_t)`` per task. For the disjointed-heads baseline both maps
    hold the same tensors.
    """

    schema: TaskSchema
    logits: Dict[str, Tensor]
    aux_logits: Dict[str, Tensor]

    def __len__(self) -> int:
        first = next(iter(self.logits.values()))
        return first.shape[0]

    def _activate(self, logits: Dict[str, Tensor]) -> Dict[str, np.ndarray]:
        out: Dict[str, np.ndarray] = {}
        for task in self.schema.tasks:
            s = logits[task.name]
            out[task.name] = (s.sigmoid() if task.is_multi_label else s.softmax_rows()).data
        return out

    @property
    def probabilities(self) -> Dict[str, np.ndarray]:
        """Final probability vectors: sigmoid for multi-label tasks, softmax otherwise."""
        return self._activate(self.logits)

    @property
    def aux_probabilities(self) -> Dict[str, np.ndarray]:
        return self._activate(self.aux_logits)


def predict(output: TaskOutput, threshold: float = DEFAULT_THRESHOLD) -> Dict[str, np.ndarray]:
    """
    Hard predictions per task.

    Multi-label tasks give a ``(B, C_t)`` 0/1 matrix (a class is predicted iff
    its probability reaches ``threshold``; an all-zero row is "Normal").
    Multi-class tasks give a ``(B,)`` argmax vector, ties going to the lowest
    class index.
    """
    if not 0.0 < threshold < 1.0:
        raise ConfigurationException(f"threshold must lie in (0, 1), got {threshold}", key="threshold")
    predictions: Dict[str, np.ndarray] = {}
    probabilities = output.probabilities
    for task in output.schema.tasks:
        probs = probabilities[task.name]
        if task.is_multi_label:
            predictions[task.name] = (probs >= threshold).astype(np.int64)
        else:
            predictions[task.name] = np.argmax(probs, axis=1).astype(np.int64)
    return predictions
