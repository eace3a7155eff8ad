"""Task weights and per-class weighting vectors."""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence

import numpy as np

from domain.graph import CooccurrenceMatrix, TaskSchema
from framework.config.models import ObjectiveSection
from framework.exceptions import ConfigurationException


@dataclass(frozen=True)
class TaskWeights:
    """
    Convex task weights ``lambda_t`` in schema order.

    The loss uses ``scaled`` (``lambda_t * T``) so that the weights of a
    T-task problem sum to T.
    """

    raw: Dict[str, float]

    def __post_init__(self):
        values = np.array(list(self.raw.values()), dtype=np.float64)
        if not self.raw or np.any(values < 0) or abs(values.sum() - 1.0) > 1e-12:
            raise ConfigurationException(
                f"Task weights must be non-negative and sum to 1, got {self.raw}",
                key="task_weights",
            )

    @property
    def num_tasks(self) -> int:
        return len(self.raw)

    @property
    def scaled(self) -> Dict[str, float]:
        return {name: w * self.num_tasks for name, w in self.raw.items()}

    @classmethod
    def uniform(cls, schema: TaskSchema) -> "TaskWeights":
        return cls({name: 1.0 / schema.num_tasks for name in schema.names})

    @classmethod
    def with_priority(cls, schema: TaskSchema, task: str, weight: float) -> "TaskWeights":
        """``weight`` for ``task``; the remaining mass is split evenly over the other tasks."""
        schema.task(task)
        if not 0.0 <= weight <= 1.0:
            raise ConfigurationException(f"Task weight must lie in [0, 1], got {weight}", key="primary_weight")
        if schema.num_tasks == 1:
            return cls({task: 1.0})
        rest = (1.0 - weight) / (schema.num_tasks - 1)
        raw = {name: (weight if name == task else rest) for name in schema.names}
        # absorb rounding so the sum check holds exactly
        raw[task] = 1.0 - sum(v for n, v in raw.items() if n != task)
        return cls(raw)

    @classmethod
    def from_config(cls, schema: TaskSchema, objective: ObjectiveSection) -> "TaskWeights":
        """
        Explicit ``task_weights`` win; otherwise ``primary_weight`` goes to
        ``primary_task`` (default: the first multi-label task, else the first task).
        """
        if objective.task_weights is not None:
            if set(objective.task_weights) != set(schema.names):
                raise ConfigurationException(
                    f"task_weights must name exactly the tasks {schema.names}",
                    key="task_weights",
                )
            return cls({name: float(objective.task_weights[name]) for name in schema.names})
        primary = objective.primary_task or default_primary_task(schema)
        return cls.with_priority(schema, primary, objective.primary_weight)


def default_primary_task(schema: TaskSchema) -> str:
    multi_label = schema.multi_label_tasks()
    return multi_label[0].name if multi_label else schema.names[0]


def effective_number_weights(counts: Sequence[int], beta: float) -> np.ndarray:
    """
    Class-balanced weights ``(1 - beta) / (1 - beta ** n_c)`` rescaled to sum
    to the number of classes.
    """
    if not 0.0 <= beta < 1.0:
        raise ConfigurationException(f"beta must lie in [0, 1), got {beta}", key="beta")
    n = np.asarray(counts, dtype=np.float64)
    if n.ndim != 1 or n.size == 0:
        raise ConfigurationException("Class counts must be a non-empty vector", key="counts")
    if np.any(n < 1):
        unseen = [int(i) for i in np.flatnonzero(n < 1)]
        raise ConfigurationException(
            f"Classes {unseen} never occur; effective-number weights are undefined",
            key="counts",
            details={"unseen": unseen},
        )
    raw = (1.0 - beta) / (1.0 - np.power(beta, n))
    return raw * (n.size / raw.sum())


def class_weights(
    schema: TaskSchema,
    objective: ObjectiveSection,
    counts: Optional[CooccurrenceMatrix] = None,
) -> Dict[str, np.ndarray]:
    """
    One weight vector per task.

    Multi-label tasks use the configured class importance weights when given
    (as positive-term multipliers). Every other task uses effective-number
    weights from the training counts, or ones under ``uniform`` weighting.
    """
    weights: Dict[str, np.ndarray] = {}
    for task in schema.tasks:
        if task.is_multi_label and objective.ciw:
            weights[task.name] = ciw_vector(task.class_names, objective.ciw)
        elif objective.class_weighting == "effective_number":
            if counts is None:
                raise ConfigurationException(
                    "effective_number weighting needs training class counts", key="class_weighting"
                )
            weights[task.name] = effective_number_weights(counts.class_counts(task.name), objective.beta)
        else:
            weights[task.name] = np.ones(task.num_classes)
    return weights


def ciw_vector(class_names: Sequence[str], ciw: Mapping[str, float]) -> np.ndarray:
    missing = [c for c in class_names if c not in ciw]
    if missing:
        raise ConfigurationException(f"No class importance weight for {missing}", key="ciw")
    return np.array([float(ciw[c]) for c in class_names])
