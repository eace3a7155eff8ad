"""Training, evaluation, checkpointing and search jobs."""

from .baselines import fit_single_task_baselines, merge_reports, single_task_config
from .checkpoint import Checkpoint
from .evaluation import evaluate, evaluate_checkpoint, metric_ciw, predict_records
from .optimizer import OptimizerState, Schedule, sgd_step
from .search import (
    SearchResult,
    Trial,
    default_search_space,
    initial_search_config,
    score_config,
    sequential_search,
    stage_candidates,
    task_weight_sweep,
)
from .training import Datasets, FitResult, Trainer, fit, load_baseline

__all__ = [
    "Checkpoint",
    "Datasets",
    "FitResult",
    "OptimizerState",
    "Schedule",
    "SearchResult",
    "Trainer",
    "Trial",
    "default_search_space",
    "evaluate",
    "evaluate_checkpoint",
    "fit",
    "fit_single_task_baselines",
    "initial_search_config",
    "load_baseline",
    "merge_reports",
    "metric_ciw",
    "predict_records",
    "score_config",
    "sequential_search",
    "sgd_step",
    "single_task_config",
    "stage_candidates",
    "task_weight_sweep",
]
