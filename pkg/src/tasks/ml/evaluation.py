"""Model evaluation jobs: batched prediction and metric reports."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from domain.data import LabeledRecord, iter_batches
from domain.graph import TaskSchema
from domain.metrics import MetricReport, evaluate_predictions
from domain.model import ModelBundle, predict
from domain.objectives import ciw_vector
from framework.config import ObjectiveSection
from framework.config.constants import DEFAULT_BATCH_SIZE
from framework.exceptions import DataValidationException
from framework.logging import get_logger

from .checkpoint import Checkpoint

logger = get_logger("tasks.ml.evaluation")

Predictions = Dict[str, np.ndarray]


def predict_records(
    model: ModelBundle,
    records: Sequence[LabeledRecord],
    threshold: float = 0.5,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> Tuple[Predictions, Predictions]:
    """Hard predictions and targets for ``records``, stacked in file order."""
    if not records:
        raise DataValidationException("No records to evaluate", field="records")
    predicted: Dict[str, List[np.ndarray]] = {name: [] for name in model.schema.names}
    targets: Dict[str, List[np.ndarray]] = {name: [] for name in model.schema.names}
    for batch in iter_batches(records, model.schema, batch_size):
        labels = predict(model(batch.features), threshold)
        for name in model.schema.names:
            predicted[name].append(labels[name])
            targets[name].append(batch.targets[name])
    return (
        {name: np.concatenate(parts) for name, parts in predicted.items()},
        {name: np.concatenate(parts) for name, parts in targets.items()},
    )


def metric_ciw(schema: TaskSchema, objective: ObjectiveSection) -> Optional[Dict[str, np.ndarray]]:
    """Class importance weights of the multi-label tasks, when configured."""
    if not objective.ciw:
        return None
    return {task.name: ciw_vector(task.class_names, objective.ciw) for task in schema.multi_label_tasks()}


def evaluate(
    model: ModelBundle,
    records: Sequence[LabeledRecord],
    objective: Optional[ObjectiveSection] = None,
    split: str = "val",
    baseline: Optional[MetricReport] = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> MetricReport:
    """
    Score ``model`` on ``records``.

    The report carries the model's parameter counts and, when ``baseline``
    is given, the multi-task gain against it.
    """
    objective = objective or ObjectiveSection()
    predictions, targets = predict_records(model, records, objective.threshold, batch_size)
    report = evaluate_predictions(
        model.schema, predictions, targets, ciw=metric_ciw(model.schema, objective), split=split
    )
    report.parameters = model.parameter_counts()
    if baseline is not None:
        report.with_delta(baseline)
    logger.debug(f"Evaluated {len(records)} {split} records")
    return report


def evaluate_checkpoint(
    checkpoint: Union[Checkpoint, str, Path],
    records: Sequence[LabeledRecord],
    schema: TaskSchema,
    split: str = "test",
    baseline: Optional[MetricReport] = None,
) -> MetricReport:
    """Evaluate a saved model; the dataset schema must equal the checkpoint's."""
    if not isinstance(checkpoint, Checkpoint):
        checkpoint = Checkpoint.load(checkpoint)
    checkpoint.schema.require_same(schema, what="Dataset")
    model = checkpoint.build_model(best=True)
    return evaluate(
        model,
        records,
        checkpoint.config.objective,
        split=split,
        baseline=baseline,
        batch_size=checkpoint.config.training.batch_size,
    )
