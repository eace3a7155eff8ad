"""Single-task baselines: one disjointed-head model per task."""

from typing import Dict, Tuple

from domain.metrics import MetricReport
from domain.model import ModelBundle
from framework.config import RunConfig, validate_config
from framework.logging import get_logger

from .evaluation import evaluate
from .training import Datasets, fit

logger = get_logger("tasks.ml.baselines")


def single_task_config(config: RunConfig, task: str) -> RunConfig:
    """``config`` switched to baseline mode with all task weight on ``task``."""
    data = config.to_dict()
    data["model"]["mode"] = "baseline"
    data["objective"].update({"task_weights": None, "primary_task": task})
    # no multi-task gain to select by
    data["training"].update({"selection_metric": "delta_mtl", "baseline_report": None})
    return validate_config(RunConfig, data, source=f"single-task config for {task}")


def merge_reports(reports: Dict[str, MetricReport], split: str) -> MetricReport:
    """Combine per-task reports into one report covering every task."""
    merged = MetricReport(split=split, tasks={}, headline={}, per_class={})
    for task, report in reports.items():
        merged.tasks.update(report.tasks)
        merged.headline.update(report.headline)
        merged.per_class.update(report.per_class)
        for key, value in report.parameters.items():
            merged.parameters[key] = merged.parameters.get(key, 0) + value
    return merged


def fit_single_task_baselines(
    config: RunConfig, datasets: Datasets, split: str = "val"
) -> Tuple[Dict[str, ModelBundle], MetricReport]:
    """
    Train one baseline model per task on the task-restricted schema and
    evaluate each on ``split``.

    The merged report is the reference the multi-task gain is measured
    against.
    """
    models: Dict[str, ModelBundle] = {}
    reports: Dict[str, MetricReport] = {}
    for task in datasets.schema.names:
        restricted = datasets.restrict(task)
        task_config = single_task_config(config, task)
        logger.info(f"Training single-task baseline for {task}")
        result = fit(task_config, restricted)
        models[task] = result.model
        reports[task] = evaluate(
            result.model,
            restricted.split(split),
            task_config.objective,
            split=split,
            batch_size=task_config.training.batch_size,
        )
    return models, merge_reports(reports, split)
