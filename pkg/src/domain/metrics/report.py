"""
Metric reports: evaluation of hard predictions, the average relative
multi-task gain against a single-task baseline, and JSON / text / CSV
rendering.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from domain.graph import TaskSchema
from framework.config.constants import REPORT_FORMAT_VERSION
from framework.exceptions import ContractError, DataParseException
from framework.logging import get_logger

from .confusion import ConfusionCounts
from .scores import f1_normal, f2_ciw, micro_macro_f1, per_class_fbeta

logger = get_logger("domain.metrics")

# metrics entering the multi-task gain, by task kind
HEADLINE_METRICS = {
    "multi_label": ("F2_CIW", "F1_Normal"),
    "multi_class": ("MF1", "mF1"),
}

MetricKey = Tuple[str, str]


@dataclass
class MetricReport:
    split: str
    tasks: Dict[str, Dict[str, float]]
    headline: Dict[str, List[str]]
    per_class: Dict[str, Dict[str, float]] = field(default_factory=dict)
    delta_mtl: Optional[float] = None
    parameters: Dict[str, int] = field(default_factory=dict)

    def headline_values(self) -> Dict[MetricKey, float]:
        return {(task, m): self.tasks[task][m] for task, metrics in self.headline.items() for m in metrics}

    def with_delta(self, baseline: "MetricReport") -> "MetricReport":
        self.delta_mtl = delta_mtl(self, baseline)
        return self

    # ------------------------------------------------------------ rendering

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "split": self.split,
            "delta_mtl": self.delta_mtl,
            "parameters": dict(self.parameters),
            "headline": {k: list(v) for k, v in self.headline.items()},
            "tasks": {k: dict(v) for k, v in self.tasks.items()},
            "per_class": {k: dict(v) for k, v in self.per_class.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], source: Optional[str] = None) -> "MetricReport":
        try:
            return cls(
                split=str(data.get("split", "")),
                tasks={t: {m: float(v) for m, v in ms.items()} for t, ms in data["tasks"].items()},
                headline={t: list(ms) for t, ms in data["headline"].items()},
                per_class={t: {c: float(v) for c, v in cs.items()} for t, cs in data.get("per_class", {}).items()},
                delta_mtl=data.get("delta_mtl"),
                parameters={k: int(v) for k, v in data.get("parameters", {}).items()},
            )
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise DataParseException(f"Malformed metric report: {e}", path=source) from e

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2))
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "MetricReport":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as e:
            raise DataParseException("Metric report not found", path=str(path)) from e
        except json.JSONDecodeError as e:
            raise DataParseException(f"Invalid JSON: {e.msg}", path=str(path), line=e.lineno, column=e.colno) from e
        return cls.from_dict(data, source=str(path))

    def table(self) -> pd.DataFrame:
        """One row per task, one column per metric (percent)."""
        frame = pd.DataFrame.from_dict(self.tasks, orient="index") * 100.0
        frame.index.name = "task"
        return frame

    def render_table(self) -> str:
        lines = [f"split: {self.split}"]
        if self.delta_mtl is not None:
            lines.append(f"delta_mtl: {self.delta_mtl * 100.0:+.2f}%")
        if self.parameters:
            lines.append("parameters: " + ", ".join(f"{k}={v}" for k, v in self.parameters.items()))
        lines.append(self.table().to_string(float_format=lambda v: f"{v:6.2f}", na_rep="-"))
        return "\n".join(lines)

    def per_class_frame(self) -> pd.DataFrame:
        """Long-format per-class scores: task, class, metric, score."""
        rows = [
            {
                "task": task,
                "class": name,
                "metric": "F2" if "F2_CIW" in self.headline.get(task, []) else "F1",
                "score": score,
            }
            for task, classes in self.per_class.items()
            for name, score in classes.items()
        ]
        return pd.DataFrame(rows, columns=["task", "class", "metric", "score"])


def evaluate_predictions(
    schema: TaskSchema,
    predictions: Mapping[str, np.ndarray],
    targets: Mapping[str, np.ndarray],
    ciw: Optional[Mapping[str, np.ndarray]] = None,
    split: str = "val",
) -> MetricReport:
    """
    Score hard predictions of every task.

    Multi-label tasks get per-class F2, F2_CIW (uniform weights unless
    ``ciw`` names the task), F1_Normal and micro/macro F1. Multi-class tasks
    get per-class F1 and micro/macro F1.
    """
    tasks: Dict[str, Dict[str, float]] = {}
    per_class: Dict[str, Dict[str, float]] = {}
    headline: Dict[str, List[str]] = {}
    for task in schema.tasks:
        pred, true = predictions[task.name], targets[task.name]
        if task.is_multi_label:
            counts = ConfusionCounts.from_multilabel(pred, true)
            f2 = per_class_fbeta(counts, 2.0)
            weights = np.ones(task.num_classes) if not ciw or task.name not in ciw else ciw[task.name]
            micro, macro = micro_macro_f1(counts)
            tasks[task.name] = {
                "F2_CIW": f2_ciw(f2, weights),
                "F1_Normal": f1_normal(pred, true),
                "MF1": macro,
                "mF1": micro,
            }
            per_class[task.name] = dict(zip(task.class_names, f2.tolist()))
        else:
            counts = ConfusionCounts.from_multiclass(pred, true, task.num_classes)
            micro, macro = micro_macro_f1(counts)
            tasks[task.name] = {"MF1": macro, "mF1": micro}
            per_class[task.name] = dict(zip(task.class_names, per_class_fbeta(counts, 1.0).tolist()))
        headline[task.name] = list(HEADLINE_METRICS[task.kind.value])
    return MetricReport(split=split, tasks=tasks, headline=headline, per_class=per_class)


def delta_mtl(
    multi: Union[MetricReport, Mapping[MetricKey, float]],
    baseline: Union[MetricReport, Mapping[MetricKey, float]],
) -> float:
    """
    Mean relative gain ``(M_m - M_b) / M_b`` over all headline (task, metric)
    pairs. Pairs with a zero baseline value are skipped with a warning.
    """
    m = multi.headline_values() if isinstance(multi, MetricReport) else dict(multi)
    b = baseline.headline_values() if isinstance(baseline, MetricReport) else dict(baseline)
    if set(m) != set(b):
        raise ContractError(
            "Reports do not cover the same (task, metric) entries",
            details={"multi": sorted(map(list, m)), "baseline": sorted(map(list, b))},
        )
    gains = []
    for key in m:
        if b[key] == 0:
            logger.warning(f"Baseline {key[0]}/{key[1]} is zero; excluded from delta_mtl")
            continue
        gains.append((m[key] - b[key]) / b[key])
    if not gains:
        raise ContractError("No (task, metric) entry has a non-zero baseline")
    return float(np.mean(gains))
