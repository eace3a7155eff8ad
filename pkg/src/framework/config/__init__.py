"""
CT-GNN Configuration Package.

Usage:
    from framework.config import load_run_config

    config = load_run_config("runs/gcn.json", overrides={"training.epochs": 5})
"""

from .constants import (
    APP_NAME,
    APP_VERSION,
    CHECKPOINT_FORMAT_VERSION,
    GRAPH_FORMAT_VERSION,
    HYPERPARAMETER_ROWS,
    REPORT_FORMAT_VERSION,
    SEARCH_INITIAL_VALUES,
    SEARCH_INVESTIGATED_RANGES,
)
from .manager import (
    load_config_model,
    load_run_config,
    nest_overrides,
    save_config,
    validate_config,
)
from .models import (
    DataSection,
    ModelSection,
    ObjectiveSection,
    OptimizerSection,
    RunConfig,
    SearchSpace,
    SyntheticSpec,
    TaskEntry,
    TrainingSection,
)
from .providers import EnvironmentProvider, FileProvider, deep_merge

__version__ = APP_VERSION

__all__ = [
    "APP_NAME",
    "APP_VERSION",
    "CHECKPOINT_FORMAT_VERSION",
    "GRAPH_FORMAT_VERSION",
    "HYPERPARAMETER_ROWS",
    "REPORT_FORMAT_VERSION",
    "SEARCH_INITIAL_VALUES",
    "SEARCH_INVESTIGATED_RANGES",
    "DataSection",
    "EnvironmentProvider",
    "FileProvider",
    "ModelSection",
    "ObjectiveSection",
    "OptimizerSection",
    "RunConfig",
    "SearchSpace",
    "SyntheticSpec",
    "TaskEntry",
    "TrainingSection",
    "deep_merge",
    "load_config_model",
    "load_run_config",
    "nest_overrides",
    "save_config",
    "validate_config",
]
