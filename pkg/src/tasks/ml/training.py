"""
Model training job.

``Trainer`` owns one run: it counts label co-occurrences on the training
split, builds the cross-task graph and the model, and then loops over
epochs (shuffle, batch, forward, loss, backward, SGD step). After every
epoch the validation split is scored and the best epoch's parameters are
remembered; ``finalize`` restores them.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from domain.data import LabeledRecord, iter_batches, load_dataset
from domain.graph import (
    CooccurrenceMatrix,
    CrossTaskGraph,
    TaskSchema,
    build_graph,
    count_cooccurrence,
    load_schema,
)
from domain.metrics import MetricReport
from domain.model import ModelBundle, build_model
from domain.numerics import Rng
from domain.objectives import MultiTaskCriterion, TaskWeights, class_weights
from framework.config import RunConfig
from framework.exceptions import (
    ConfigurationException,
    DataParseException,
    DataValidationException,
    NumericFailureError,
)
from framework.logging import get_logger, log_performance_context

from .checkpoint import Checkpoint
from .evaluation import evaluate
from .optimizer import OptimizerState, Schedule, sgd_step

logger = get_logger("tasks.ml.training")

HISTORY_COLUMNS = ["epoch", "task", "metric", "value"]


@dataclass
class Datasets:
    """Schema plus the train / val / test record lists of one run."""

    schema: TaskSchema
    train: List[LabeledRecord]
    val: List[LabeledRecord] = field(default_factory=list)
    test: List[LabeledRecord] = field(default_factory=list)

    @property
    def input_dim(self) -> int:
        if not self.train:
            raise DataValidationException("The training split is empty", field="train")
        return int(self.train[0].features.shape[0])

    def split(self, name: str) -> List[LabeledRecord]:
        if name not in ("train", "val", "test"):
            raise ConfigurationException(f"Unknown split {name!r}", key="split")
        return getattr(self, name)

    def restrict(self, task: str) -> "Datasets":
        """The same records labelled for ``task`` only."""
        schema = self.schema.restrict([task])

        def keep(records: List[LabeledRecord]) -> List[LabeledRecord]:
            return [LabeledRecord(r.id, r.features, {task: r.labels[task]}) for r in records]

        return Datasets(schema, keep(self.train), keep(self.val), keep(self.test))

    @classmethod
    def from_config(cls, config: RunConfig) -> "Datasets":
        data = config.data
        if not data.schema_path or not data.train:
            raise ConfigurationException("The run config needs data.schema and data.train", key="data")
        schema = load_schema(data.schema_path)

        def read(path: Optional[str]) -> List[LabeledRecord]:
            if path is None:
                return []
            return load_dataset(path, schema, water_task=data.water_task, water_scheme=data.water_scheme)

        datasets = cls(schema, read(data.train), read(data.val), read(data.test))
        logger.info(
            f"Loaded {len(datasets.train)} train, {len(datasets.val)} val and "
            f"{len(datasets.test)} test records for tasks {schema.names}"
        )
        return datasets


@dataclass
class FitResult:
    model: ModelBundle
    reports: List[MetricReport]
    history: pd.DataFrame
    best_epoch: Optional[int]
    best_score: Optional[float]
    trainer: "Trainer"


def load_baseline(config: RunConfig) -> Optional[MetricReport]:
    path = config.training.baseline_report
    return MetricReport.load(path) if path else None


class Trainer:
    """One training run, resumable from a checkpoint."""

    def __init__(
        self,
        config: RunConfig,
        datasets: Datasets,
        baseline: Optional[MetricReport] = None,
        graph: Optional[CrossTaskGraph] = None,
    ):
        self.config = config
        self.datasets = datasets
        self.schema = datasets.schema
        self.baseline = baseline

        objective = config.objective
        needs_counts = config.model.mode == "ctgnn" or objective.class_weighting == "effective_number"
        counts: Optional[CooccurrenceMatrix] = (
            count_cooccurrence(datasets.train, self.schema) if needs_counts else None
        )
        if config.model.mode == "ctgnn" and graph is None:
            assert counts is not None
            graph = build_graph(
                counts, config.model.tau, config.model.p, config.model.parsed_tau_overrides()
            )
        self.graph = graph if config.model.mode == "ctgnn" else None

        seed = config.training.seed
        self.model = build_model(self.schema, config.model, datasets.input_dim, seed=seed, graph=self.graph)
        self.criterion = MultiTaskCriterion(
            self.schema,
            TaskWeights.from_config(self.schema, objective),
            class_weights(self.schema, objective, counts),
            objective.omega,
        )
        self.schedule = Schedule.for_run(
            config.optimizer.lr, config.training.epochs, config.optimizer.milestones, config.optimizer.factor
        )
        self.optimizer = OptimizerState(
            lr=self.schedule.lr_at(0),
            momentum=config.optimizer.momentum,
            weight_decay=config.optimizer.weight_decay,
        )
        self.shuffle_rng = Rng(seed).child("shuffle")

        self.epoch = 0
        self.history: List[Dict[str, Any]] = []
        self.reports: List[MetricReport] = []
        self.best_epoch: Optional[int] = None
        self.best_score: Optional[float] = None
        self.best_state: Optional[Dict[str, np.ndarray]] = None
        self._check_selection()

    def _check_selection(self) -> None:
        metric = self.config.training.selection_metric
        if metric == "F2_CIW" and not self.schema.multi_label_tasks():
            raise ConfigurationException(
                "F2_CIW selection needs a multi-label task", key="training.selection_metric"
            )
        if metric == "delta_mtl" and self.baseline is None and self.datasets.val:
            logger.warning("No baseline report; selecting epochs by the mean headline metric")

    # -------------------------------------------------------------- epochs

    def selection_score(self, report: MetricReport) -> float:
        """Validation score used to pick the best epoch (higher is better)."""
        if self.config.training.selection_metric == "F2_CIW":
            return float(np.mean([report.tasks[t.name]["F2_CIW"] for t in self.schema.multi_label_tasks()]))
        if report.delta_mtl is not None:
            return float(report.delta_mtl)
        return float(np.mean(list(report.headline_values().values())))

    def _numeric_failure(self, batch: int, loss: float) -> NumericFailureError:
        norms = self.model.store.norms()
        # non-finite norms first
        ranked = sorted(norms.items(), key=lambda kv: -kv[1] if np.isfinite(kv[1]) else -np.inf)
        largest = dict(ranked[:3])
        logger.error(f"Non-finite loss {loss} at epoch {self.epoch + 1}, batch {batch}; largest norms {largest}")
        return NumericFailureError(
            f"Loss became {loss} at epoch {self.epoch + 1}, batch {batch}",
            details={"epoch": self.epoch + 1, "batch": batch, "loss": loss, "parameter_norms": largest},
        )

    def train_epoch(self) -> Dict[str, float]:
        """One pass over the shuffled training split; returns the mean losses."""
        self.optimizer.lr = self.schedule.lr_at(self.epoch)
        total = 0.0
        per_task = {name: 0.0 for name in self.schema.names}
        seen = 0
        batches = iter_batches(
            self.datasets.train, self.schema, self.config.training.batch_size, shuffle=self.shuffle_rng
        )
        for index, batch in enumerate(batches):
            breakdown = self.criterion(self.model(batch.features), batch.targets)
            loss = breakdown.total.item()
            if not np.isfinite(loss):
                raise self._numeric_failure(index, loss)
            breakdown.total.backward()
            sgd_step(self.model.store, self.optimizer)
            total += loss * len(batch)
            for name, value in breakdown.combined.items():
                per_task[name] += value * len(batch)
            seen += len(batch)

        losses = {name: value / seen for name, value in per_task.items()}
        losses["total"] = total / seen
        return losses

    def validate(self) -> Optional[MetricReport]:
        if not self.datasets.val:
            return None
        return evaluate(
            self.model,
            self.datasets.val,
            self.config.objective,
            split="val",
            baseline=self.baseline,
            batch_size=self.config.training.batch_size,
        )

    def _record(self, losses: Dict[str, float], report: Optional[MetricReport]) -> None:
        epoch = self.epoch
        rows = [{"epoch": epoch, "task": "train", "metric": "lr", "value": self.optimizer.lr}]
        rows.append({"epoch": epoch, "task": "train", "metric": "loss", "value": losses["total"]})
        rows.extend(
            {"epoch": epoch, "task": name, "metric": "loss", "value": losses[name]} for name in self.schema.names
        )
        if report is not None:
            for task, metrics in report.tasks.items():
                rows.extend({"epoch": epoch, "task": task, "metric": m, "value": v} for m, v in metrics.items())
            if report.delta_mtl is not None:
                rows.append({"epoch": epoch, "task": "val", "metric": "delta_mtl", "value": report.delta_mtl})
            rows.append({"epoch": epoch, "task": "val", "metric": "selection", "value": self.selection_score(report)})
        self.history.extend(rows)

    def step(self) -> Optional[MetricReport]:
        """Train one epoch, validate and update the best-epoch record."""
        losses = self.train_epoch()
        self.epoch += 1
        report = self.validate()
        self._record(losses, report)

        message = f"Epoch {self.epoch}/{self.config.training.epochs}: loss={losses['total']:.4f} lr={self.optimizer.lr:g}"
        if report is not None:
            self.reports.append(report)
            score = self.selection_score(report)
            message += f" val_score={score:.4f}"
            if self.best_score is None or score > self.best_score:
                self.best_score = score
                self.best_epoch = self.epoch
                self.best_state = self.model.store.state_dict()
                message += " (best)"
        logger.info(message)
        return report

    def train(self, until: Optional[int] = None) -> "Trainer":
        """Run epochs up to ``until`` (default: the configured epoch count)."""
        until = self.config.training.epochs if until is None else min(until, self.config.training.epochs)
        with log_performance_context("train", epochs=until - self.epoch, mode=self.config.model.mode):
            while self.epoch < until:
                self.step()
        return self

    def finalize(self) -> ModelBundle:
        """Load the best validation parameters, if any epoch was validated."""
        if self.best_state is not None:
            self.model.store.load_state_dict(self.best_state)
            logger.info(f"Restored parameters of epoch {self.best_epoch} (score {self.best_score:.4f})")
        return self.model

    # ------------------------------------------------------------ artifacts

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.history, columns=HISTORY_COLUMNS)

    def save_history(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.history_frame().to_csv(path, index=False)
        return path

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            config=self.config,
            schema=self.schema,
            input_dim=self.model.input_dim,
            epoch=self.epoch,
            parameters=self.model.store.state_dict(),
            graph=self.graph,
            best_parameters=self.best_state,
            best_epoch=self.best_epoch,
            best_score=self.best_score,
            optimizer=self.optimizer.state_dict(),
            rng_state=self.shuffle_rng.get_state(),
            history=list(self.history),
        )

    @classmethod
    def from_checkpoint(
        cls, checkpoint: Checkpoint, datasets: Datasets, baseline: Optional[MetricReport] = None
    ) -> "Trainer":
        """Continue a run; the datasets must use the checkpoint's schema."""
        checkpoint.schema.require_same(datasets.schema, what="Dataset")
        trainer = cls(checkpoint.config, datasets, baseline=baseline, graph=checkpoint.graph)
        trainer.model.store.load_state_dict(checkpoint.parameters)
        try:
            if checkpoint.optimizer is not None:
                trainer.optimizer = OptimizerState.from_state(checkpoint.optimizer)
            if checkpoint.rng_state is not None:
                trainer.shuffle_rng = Rng.from_state(checkpoint.rng_state)
        except (AttributeError, KeyError, TypeError, ValueError) as e:
            raise DataParseException(f"Checkpoint optimizer or RNG state is malformed: {e!r}") from e
        trainer.epoch = checkpoint.epoch
        trainer.history = list(checkpoint.history)
        trainer.best_epoch = checkpoint.best_epoch
        trainer.best_score = checkpoint.best_score
        trainer.best_state = (
            {k: v.copy() for k, v in checkpoint.best_parameters.items()}
            if checkpoint.best_parameters is not None
            else None
        )
        logger.info(f"Resuming from epoch {trainer.epoch}")
        return trainer


def fit(
    config: RunConfig,
    datasets: Datasets,
    baseline: Optional[MetricReport] = None,
) -> FitResult:
    """Train a model end to end and return it with its best validation parameters loaded."""
    trainer = Trainer(config, datasets, baseline=baseline).train()
    model = trainer.finalize()
    return FitResult(
        model=model,
        reports=list(trainer.reports),
        history=trainer.history_frame(),
        best_epoch=trainer.best_epoch,
        best_score=trainer.best_score,
        trainer=trainer,
    )
