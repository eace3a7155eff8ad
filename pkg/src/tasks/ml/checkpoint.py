"""
Training checkpoints.

A checkpoint is one versioned JSON document holding everything needed to
rebuild the model and continue training exactly where it stopped: the run
config, task schema, cross-task graph, current and best parameters, optimizer
velocity, the shuffle generator state and the metric history.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from domain.graph import CrossTaskGraph, TaskSchema, graph_from_dict, graph_to_dict
from domain.model import ModelBundle, build_model
from framework.config import CHECKPOINT_FORMAT_VERSION, RunConfig, validate_config
from framework.exceptions import DataParseException
from framework.logging import get_logger

logger = get_logger("tasks.ml.checkpoint")

_REQUIRED_FIELDS = ("format_version", "config", "schema", "input_dim", "epoch", "parameters")


def _arrays_to_lists(arrays: Dict[str, np.ndarray]) -> Dict[str, Any]:
    return {name: value.tolist() for name, value in arrays.items()}


def _lists_to_arrays(data: Dict[str, Any]) -> Dict[str, np.ndarray]:
    return {name: np.asarray(value, dtype=np.float64) for name, value in data.items()}


@dataclass
class Checkpoint:
    config: RunConfig
    schema: TaskSchema
    input_dim: int
    epoch: int
    parameters: Dict[str, np.ndarray]
    graph: Optional[CrossTaskGraph] = None
    best_parameters: Optional[Dict[str, np.ndarray]] = None
    best_epoch: Optional[int] = None
    best_score: Optional[float] = None
    optimizer: Optional[Dict[str, Any]] = None
    rng_state: Optional[Dict[str, Any]] = None
    history: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format_version": CHECKPOINT_FORMAT_VERSION,
            "config": self.config.to_dict(),
            "schema": self.schema.to_dict(),
            "graph": graph_to_dict(self.graph) if self.graph is not None else None,
            "input_dim": self.input_dim,
            "epoch": self.epoch,
            "best_epoch": self.best_epoch,
            "best_score": self.best_score,
            "parameters": _arrays_to_lists(self.parameters),
            "best_parameters": (
                _arrays_to_lists(self.best_parameters) if self.best_parameters is not None else None
            ),
            "optimizer": self.optimizer,
            "rng_state": self.rng_state,
            "history": list(self.history),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: str = "<checkpoint>") -> "Checkpoint":
        for name in _REQUIRED_FIELDS:
            if name not in data:
                raise DataParseException(f"Checkpoint is missing '{name}'", path=source, field=name)
        if data["format_version"] != CHECKPOINT_FORMAT_VERSION:
            raise DataParseException(
                f"Unsupported checkpoint version {data['format_version']}",
                path=source,
                field="format_version",
            )
        schema = TaskSchema.from_dict(data["schema"])
        graph = graph_from_dict(data["graph"], schema=schema, source=source) if data.get("graph") else None
        best = data.get("best_parameters")
        try:
            return cls(
                config=validate_config(RunConfig, data["config"], source=source),
                schema=schema,
                input_dim=int(data["input_dim"]),
                epoch=int(data["epoch"]),
                parameters=_lists_to_arrays(data["parameters"]),
                graph=graph,
                best_parameters=_lists_to_arrays(best) if best is not None else None,
                best_epoch=data.get("best_epoch"),
                best_score=data.get("best_score"),
                optimizer=data.get("optimizer"),
                rng_state=data.get("rng_state"),
                history=list(data.get("history", [])),
            )
        except (AttributeError, TypeError, ValueError) as e:
            raise DataParseException(f"Malformed checkpoint: {e}", path=source) from e

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f)
        logger.info(f"Saved checkpoint at epoch {self.epoch} to {path}")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Checkpoint":
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise DataParseException("Checkpoint not found", path=str(path)) from e
        except json.JSONDecodeError as e:
            raise DataParseException(
                f"Malformed checkpoint JSON: {e.msg}", path=str(path), line=e.lineno, column=e.colno
            ) from e
        if not isinstance(data, dict):
            raise DataParseException("Checkpoint root must be an object", path=str(path))
        return cls.from_dict(data, source=str(path))

    def build_model(self, best: bool = False) -> ModelBundle:
        """Rebuild the model with the current (or, with ``best``, the best validation) parameters."""
        model = build_model(
            self.schema,
            self.config.model,
            self.input_dim,
            seed=self.config.training.seed,
            graph=self.graph,
        )
        parameters = self.parameters
        if best and self.best_parameters is not None:
            parameters = self.best_parameters
        model.store.load_state_dict(parameters)
        return model
