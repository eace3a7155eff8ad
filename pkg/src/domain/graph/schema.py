"""Task schema: ordered tasks, their kinds and class names, and the global node index."""

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from framework.exceptions import (
    DataParseException,
    DataValidationException,
    SchemaMismatchError,
    ValidationException,
)

LabelValue = Union[int, Iterable[int]]


class TaskKind(str, Enum):
    MULTI_LABEL = "multi_label"
    MULTI_CLASS = "multi_class"


@dataclass(frozen=True)
class TaskSpec:
    name: str
    kind: TaskKind
    class_names: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", TaskKind(self.kind))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if not self.name:
            raise ValidationException("Task name must not be empty")
        if ":" in self.name:
            # ":" separates task and class in node labels and tau override keys
            raise ValidationException(f"Task name {self.name!r} must not contain ':'", details={"task": self.name})
        if not self.class_names:
            raise ValidationException(f"Task {self.name} has no classes")
        if len(set(self.class_names)) != len(self.class_names):
            raise ValidationException(
                f"Class names of task {self.name} are not unique",
                details={"task": self.name},
            )

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def is_multi_label(self) -> bool:
        return self.kind is TaskKind.MULTI_LABEL

    def class_index(self, name: str) -> int:
        try:
            return self.class_names.index(name)
        except ValueError:
            raise DataValidationException(
                f"Unknown class {name!r} for task {self.name}", field=self.name
            ) from None


@dataclass(frozen=True)
class TaskSchema:
    """Ordered task list; class ``c`` of task ``t`` is node ``sum(C_s for s < t) + c``."""

    tasks: Tuple[TaskSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise ValidationException("A schema needs at least one task")
        names = [t.name for t in self.tasks]
        if len(set(names)) != len(names):
            raise ValidationException("Task names are not unique", details={"tasks": names})
        if self.num_nodes < 2:
            raise ValidationException("A schema needs at least two classes in total")

    # ------------------------------------------------------------------ shape

    @property
    def names(self) -> List[str]:
        return [t.name for t in self.tasks]

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)

    @property
    def sizes(self) -> List[int]:
        return [t.num_classes for t in self.tasks]

    @property
    def num_nodes(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> List[int]:
        return [int(x) for x in np.concatenate([[0], np.cumsum(self.sizes)[:-1]])]

    def task(self, name: str) -> TaskSpec:
        for t in self.tasks:
            if t.name == name:
                return t
        raise ValidationException(f"Unknown task: {name}", details={"task": name})

    def task_position(self, name: str) -> int:
        return self.names.index(self.task(name).name)

    def node_slice(self, name: str) -> slice:
        i = self.task_position(name)
        start = self.offsets[i]
        return slice(start, start + self.tasks[i].num_classes)

    def node_index(self, task: str, class_index: int) -> int:
        return self.node_slice(task).start + class_index

    def node_labels(self) -> List[str]:
        return [f"{t.name}:{c}" for t in self.tasks for c in t.class_names]

    def multi_label_tasks(self) -> List[TaskSpec]:
        return [t for t in self.tasks if t.is_multi_label]

    # ------------------------------------------------------------- labels

    def encode_labels(
        self, labels: Mapping[str, LabelValue], record_id: Optional[str] = None
    ) -> np.ndarray:
        """Validate one record's labels and return its C-long indicator row."""
        unknown = set(labels) - set(self.names)
        if unknown:
            raise DataValidationException(
                f"Unknown task(s) {sorted(unknown)}", record_id=record_id, field=sorted(unknown)[0]
            )
        row = np.zeros(self.num_nodes, dtype=np.int64)
        for t, offset in zip(self.tasks, self.offsets):
            if t.name not in labels:
                raise DataValidationException(
                    f"Missing label for task {t.name}", record_id=record_id, field=t.name
                )
            for c in _as_indices(labels[t.name], t, record_id):
                row[offset + c] = 1
        return row

    def restrict(self, task_names: Sequence[str]) -> "TaskSchema":
        """Sub-schema keeping ``task_names`` in this schema's order."""
        for name in task_names:
            self.task(name)
        return TaskSchema(tuple(t for t in self.tasks if t.name in set(task_names)))

    # -------------------------------------------------------------- files

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tasks": [
                {"name": t.name, "kind": t.kind.value, "classes": list(t.class_names)}
                for t in self.tasks
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TaskSchema":
        try:
            return cls(
                tuple(
                    TaskSpec(entry["name"], TaskKind(entry["kind"]), tuple(entry["classes"]))
                    for entry in data["tasks"]
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataParseException(f"Malformed schema: {e}", field="tasks") from e

    def require_same(self, other: "TaskSchema", what: str = "artifact") -> None:
        if self != other:
            raise SchemaMismatchError(
                f"{what} schema does not match", expected=self.to_dict(), actual=other.to_dict()
            )


def _as_indices(value: LabelValue, task: TaskSpec, record_id: Optional[str]) -> List[int]:
    if task.is_multi_label:
        if isinstance(value, (int, np.integer)) or isinstance(value, str):
            raise DataValidationException(
                f"Task {task.name} expects a list of class indices",
                record_id=record_id,
                field=task.name,
            )
        indices = list(value)
    else:
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise DataValidationException(
                f"Task {task.name} expects a single class index",
                record_id=record_id,
                field=task.name,
            )
        indices = [value]
    for c in indices:
        if isinstance(c, bool) or not isinstance(c, (int, np.integer)) or not 0 <= c < task.num_classes:
            raise DataValidationException(
                f"Label {c!r} out of range for task {task.name} ({task.num_classes} classes)",
                record_id=record_id,
                field=task.name,
            )
    return [int(c) for c in indices]


def load_schema(path: Union[str, Path]) -> TaskSchema:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise DataParseException(
            f"Malformed schema JSON: {e.msg}", path=str(path), line=e.lineno, column=e.colno
        ) from e
    return TaskSchema.from_dict(data)


def save_schema(schema: TaskSchema, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(schema.to_dict(), f, indent=2)
