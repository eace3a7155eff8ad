"""Labelled records and the JSON Lines dataset format."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Union

import numpy as np

from domain.graph.schema import TaskSchema, TaskSpec
from framework.exceptions import DataParseException, DataValidationException
from framework.logging import get_logger

from .water import water_level_class

logger = get_logger(__name__)

Label = Union[FrozenSet[int], int]


@dataclass(frozen=True, eq=False)
class LabeledRecord:
    """One sample: feature vector plus a label per task (index set or single index)."""

    id: str
    features: np.ndarray
    labels: Mapping[str, Label]

    def equals(self, other: "LabeledRecord") -> bool:
        return (
            self.id == other.id
            and np.array_equal(self.features, other.features)
            and dict(self.labels) == dict(other.labels)
        )


def make_record(
    record_id: str, features: Sequence[float], labels: Mapping[str, Any], schema: TaskSchema
) -> LabeledRecord:
    """Build a record from raw labels (indices or class names), validating against ``schema``."""
    return LabeledRecord(
        id=str(record_id),
        features=np.asarray(features, dtype=np.float64),
        labels=_normalize_labels(labels, schema, record_id=str(record_id)),
    )


def _resolve_class(value: Any, task: TaskSpec, record_id: str, line: Optional[int]) -> int:
    if isinstance(value, str):
        if value not in task.class_names:
            raise DataValidationException(
                f"Unknown class {value!r} for task {task.name}",
                record_id=record_id,
                line=line,
                field=f"labels.{task.name}",
            )
        return task.class_names.index(value)
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise DataValidationException(
            f"Class label {value!r} is neither an index nor a class name",
            record_id=record_id,
            line=line,
            field=f"labels.{task.name}",
        )
    if not 0 <= value < task.num_classes:
        raise DataValidationException(
            f"Class index {value} out of range for task {task.name} ({task.num_classes} classes)",
            record_id=record_id,
            line=line,
            field=f"labels.{task.name}",
        )
    return int(value)


def _normalize_labels(
    raw: Mapping[str, Any],
    schema: TaskSchema,
    record_id: str,
    line: Optional[int] = None,
    water_task: Optional[str] = None,
    water_scheme: str = "binned",
) -> Dict[str, Label]:
    unknown = sorted(set(raw) - set(schema.names))
    if unknown:
        raise DataValidationException(
            f"Unknown task {unknown[0]!r}", record_id=record_id, line=line, field=f"labels.{unknown[0]}"
        )
    labels: Dict[str, Label] = {}
    for task in schema.tasks:
        if task.name not in raw:
            raise DataValidationException(
                f"Missing label for task {task.name}",
                record_id=record_id,
                line=line,
                field=f"labels.{task.name}",
            )
        value = raw[task.name]
        if task.name == water_task:
            value = water_level_class(value, water_scheme)
        if task.is_multi_label:
            if not isinstance(value, (list, tuple, set, frozenset)):
                raise DataValidationException(
                    f"Task {task.name} expects a list of classes",
                    record_id=record_id,
                    line=line,
                    field=f"labels.{task.name}",
                )
            labels[task.name] = frozenset(_resolve_class(v, task, record_id, line) for v in value)
        else:
            labels[task.name] = _resolve_class(value, task, record_id, line)
    return labels


def parse_record_line(
    text: str,
    schema: TaskSchema,
    line: int,
    water_task: Optional[str] = None,
    water_scheme: str = "binned",
) -> LabeledRecord:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataParseException(f"Malformed JSON: {e.msg}", line=line, column=e.colno) from e
    if not isinstance(obj, dict):
        raise DataParseException("Record must be a JSON object", line=line)

    for name in ("id", "features", "labels"):
        if name not in obj:
            raise DataValidationException(f"Missing field '{name}'", line=line, field=name)
    record_id = str(obj["id"])

    features = obj["features"]
    if not isinstance(features, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in features
    ):
        raise DataValidationException(
            "Features must be a list of numbers", record_id=record_id, line=line, field="features"
        )
    if not isinstance(obj["labels"], dict):
        raise DataValidationException(
            "Labels must be an object keyed by task", record_id=record_id, line=line, field="labels"
        )

    labels = _normalize_labels(
        obj["labels"], schema, record_id, line=line, water_task=water_task, water_scheme=water_scheme
    )
    return LabeledRecord(record_id, np.asarray(features, dtype=np.float64), labels)


def load_dataset(
    path: Union[str, Path],
    schema: TaskSchema,
    water_task: Optional[str] = None,
    water_scheme: str = "binned",
) -> List[LabeledRecord]:
    """
    Read a JSON Lines dataset in file order.

    Each non-blank line is ``{"id": str, "features": [...], "labels": {task: ...}}``
    where a label is a class index or class name (a list of them for
    multi-label tasks).
    """
    path = Path(path)
    records: List[LabeledRecord] = []
    width: Optional[int] = None
    with open(path, "r", encoding="utf-8") as f:
        for line_number, text in enumerate(f, start=1):
            if not text.strip():
                continue
            try:
                record = parse_record_line(text, schema, line_number, water_task, water_scheme)
            except DataParseException as e:
                e.details.setdefault("path", str(path))
                raise
            if width is None:
                width = record.features.shape[0]
            elif record.features.shape[0] != width:
                raise DataValidationException(
                    f"Ragged features: expected {width} values, got {record.features.shape[0]}",
                    record_id=record.id,
                    line=line_number,
                    field="features",
                )
            records.append(record)
    logger.debug(f"Loaded {len(records)} records from {path}")
    return records


def record_to_dict(record: LabeledRecord) -> Dict[str, Any]:
    labels: Dict[str, Any] = {}
    for task, value in record.labels.items():
        labels[task] = sorted(value) if isinstance(value, frozenset) else int(value)
    return {"id": record.id, "features": record.features.tolist(), "labels": labels}


def save_dataset(records: Sequence[LabeledRecord], path: Union[str, Path]) -> None:
    """Write records as JSON Lines; reloading gives value-identical records."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record_to_dict(record)))
            f.write("\n")
