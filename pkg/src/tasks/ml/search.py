"""
Sequential hyperparameter search.

Stages run in a fixed order and each keeps its best value for all later
stages:

1. ``layers_and_width`` - grid over GNN depth and node embedding width
2. ``bottleneck`` - bottleneck width
3. ``heads`` - attention heads (GAT only)
4. ``tau`` - co-occurrence threshold
5. ``p`` - neighbour mass of the re-weighted adjacency (GCN only)

Every trial trains a full run and is scored by its best validation
selection score (the multi-task gain when a baseline report is supplied).
"""

from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd

from domain.metrics import MetricReport
from executors import ProcessExecutor
from framework.config import (
    SEARCH_INITIAL_VALUES,
    SEARCH_INVESTIGATED_RANGES,
    RunConfig,
    SearchSpace,
    validate_config,
)
from framework.config.constants import SEARCH_STAGES
from framework.exceptions import ConfigurationException
from framework.logging import get_logger

from .training import Datasets, fit

logger = get_logger("tasks.ml.search")

TrialRunner = Callable[[RunConfig], float]

_STAGE_FIELDS = {"bottleneck": "bottleneck_dim", "heads": "heads", "tau": "tau", "p": "p"}
_STAGE_KINDS = {"heads": "gat", "p": "gcn"}


@dataclass
class Trial:
    trial_id: str
    stage: str
    values: Dict[str, Any]
    score: Optional[float] = None
    status: str = "ok"  # 'ok', 'invalid'
    kept: bool = False
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SearchResult:
    best: RunConfig
    best_score: Optional[float] = None
    trace: List[Trial] = field(default_factory=list)

    def trace_frame(self) -> pd.DataFrame:
        rows = [
            {"trial_id": t.trial_id, "stage": t.stage, **t.values, "score": t.score, "status": t.status, "kept": t.kept}
            for t in self.trace
        ]
        return pd.DataFrame(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best": self.best.to_dict(),
            "best_score": self.best_score,
            "trace": [t.to_dict() for t in self.trace],
        }


def score_config(config: RunConfig, datasets: Datasets, baseline: Optional[MetricReport] = None) -> float:
    """Train ``config`` and return its best validation selection score."""
    result = fit(config, datasets, baseline)
    if result.best_score is None:
        raise ConfigurationException("Search trials need a validation split and at least one epoch", key="data.val")
    return result.best_score


def initial_search_config(kind: str = "gcn", base: Optional[RunConfig] = None) -> RunConfig:
    """Starting point of the search for ``kind``: the initial values on top of ``base``."""
    data = (base or RunConfig()).to_dict()
    data["model"]["gnn_kind"] = kind
    for key in ("num_layers", "embedding_dim", "bottleneck_dim", "tau", "p"):
        data["model"][key] = SEARCH_INITIAL_VALUES[key]
    if kind == "gat":
        data["model"]["heads"] = SEARCH_INITIAL_VALUES["heads"]
    data["objective"]["primary_weight"] = SEARCH_INITIAL_VALUES["primary_weight"]
    return validate_config(RunConfig, data, source="initial search config")


def default_search_space() -> SearchSpace:
    return SearchSpace(**{key: list(values) for key, values in SEARCH_INVESTIGATED_RANGES.items()})


def _values(candidates: Optional[List[Any]], current: Any, name: str) -> List[Any]:
    if candidates is None:
        return [current]
    if not candidates:
        raise ConfigurationException(f"Search space for {name} is empty", key=f"space.{name}")
    return list(candidates)


def stage_candidates(stage: str, space: SearchSpace, current: RunConfig) -> Optional[List[Dict[str, Any]]]:
    """Model-section updates tried by ``stage``, or None when the space leaves it out."""
    if stage == "layers_and_width":
        if space.num_layers is None and space.embedding_dim is None:
            return None
        layers = _values(space.num_layers, current.model.num_layers, "num_layers")
        widths = _values(space.embedding_dim, current.model.embedding_dim, "embedding_dim")
        return [{"num_layers": n, "embedding_dim": w} for n in layers for w in widths]
    name = _STAGE_FIELDS[stage]
    values = getattr(space, name)
    if values is None:
        return None
    return [{name: v} for v in _values(values, None, name)]


def _candidate(current: RunConfig, section: str, values: Dict[str, Any], trial_id: str) -> RunConfig:
    data = current.to_dict()
    data[section].update(values)
    return validate_config(RunConfig, data, source=f"trial {trial_id}")


def _run_stage(
    stage: str,
    section: str,
    candidates: Sequence[Dict[str, Any]],
    current: RunConfig,
    runner: TrialRunner,
    executor: Optional[ProcessExecutor],
    offset: int,
) -> List[Trial]:
    trials: List[Trial] = []
    configs: Dict[str, RunConfig] = {}
    for values in candidates:
        trial = Trial(trial_id=f"{offset + len(trials):03d}-{stage}", stage=stage, values=dict(values))
        try:
            configs[trial.trial_id] = _candidate(current, section, values, trial.trial_id)
        except ConfigurationException as e:
            trial.status = "invalid"
            trial.error = e.message
            logger.warning(f"Skipping invalid {stage} candidate {values}: {e.message}")
        trials.append(trial)
    if not configs:
        raise ConfigurationException(f"Search stage {stage} has no valid candidate", key=f"space.{stage}")

    if executor is not None:
        scores = executor.run_keyed(runner, {tid: (config,) for tid, config in configs.items()})
    else:
        scores = {tid: runner(config) for tid, config in configs.items()}

    best: Optional[Trial] = None
    best_score = float("-inf")
    for trial in trials:
        if trial.trial_id not in scores:
            continue
        trial.score = float(scores[trial.trial_id])
        logger.info(f"Trial {trial.trial_id} {trial.values}: score={trial.score:.4f}")
        # ties keep the earliest trial
        if best is None or trial.score > best_score:
            best, best_score = trial, trial.score
    assert best is not None
    best.kept = True
    return trials


def sequential_search(
    base: RunConfig,
    space: SearchSpace,
    datasets: Datasets,
    baseline: Optional[MetricReport] = None,
    runner: Optional[TrialRunner] = None,
    executor: Optional[ProcessExecutor] = None,
) -> SearchResult:
    """
    Run the search stages in order, keeping each stage's best value.

    Stages absent from ``space`` are skipped, as are ``heads`` for GCN and
    ``p`` for GAT. ``runner`` maps a candidate config to its score
    (default: train it on ``datasets``); with ``executor`` the trials of a
    stage run in parallel.
    """
    runner = runner or partial(score_config, datasets=datasets, baseline=baseline)
    kind = base.model.gnn_kind
    current = base
    result = SearchResult(best=base)

    for stage in SEARCH_STAGES:
        if stage in _STAGE_KINDS and _STAGE_KINDS[stage] != kind:
            logger.info(f"Skipping stage {stage} for {kind.upper()}")
            continue
        candidates = stage_candidates(stage, space, current)
        if candidates is None:
            logger.debug(f"Stage {stage} not in the search space")
            continue
        trials = _run_stage(stage, "model", candidates, current, runner, executor, len(result.trace))
        result.trace.extend(trials)
        kept = next(t for t in trials if t.kept)
        current = _candidate(current, "model", kept.values, kept.trial_id)
        result.best, result.best_score = current, kept.score
        logger.info(f"Stage {stage}: kept {kept.values} (score {kept.score:.4f})")
    return result


def task_weight_sweep(
    base: RunConfig,
    values: Sequence[float],
    datasets: Datasets,
    baseline: Optional[MetricReport] = None,
    runner: Optional[TrialRunner] = None,
    executor: Optional[ProcessExecutor] = None,
) -> SearchResult:
    """Retrain with each primary-task weight and score it on validation."""
    if not values:
        raise ConfigurationException("The task weight grid is empty", key="lambda_grid")
    runner = runner or partial(score_config, datasets=datasets, baseline=baseline)
    candidates = [{"primary_weight": float(v)} for v in values]
    trials = _run_stage("primary_weight", "objective", candidates, base, runner, executor, 0)
    kept = next(t for t in trials if t.kept)
    best = _candidate(base, "objective", kept.values, kept.trial_id)
    return SearchResult(best=best, best_score=kept.score, trace=trials)
