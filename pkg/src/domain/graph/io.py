"""JSON serialization of cross-task graphs."""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from framework.config.constants import GRAPH_FORMAT_VERSION
from framework.exceptions import DataParseException, SchemaMismatchError

from .adjacency import CrossTaskGraph
from .schema import TaskSchema

_REQUIRED_FIELDS = ("schema", "shape", "tau", "p", "binary", "weighted")


def graph_to_dict(graph: CrossTaskGraph) -> Dict[str, Any]:
    return {
        "format_version": GRAPH_FORMAT_VERSION,
        "schema": graph.schema.to_dict(),
        "shape": [graph.num_nodes, graph.num_nodes],
        "tau": graph.tau,
        "tau_overrides": {f"{i}:{j}": v for (i, j), v in graph.tau_overrides.items()},
        "p": graph.p,
        "binary": graph.binary.astype(int).tolist(),
        "weighted": graph.weighted.tolist(),
    }


def graph_from_dict(
    data: Dict[str, Any], schema: Optional[TaskSchema] = None, source: str = "<graph>"
) -> CrossTaskGraph:
    """Rebuild a graph; ``schema`` (when given) must match the embedded one."""
    for name in _REQUIRED_FIELDS:
        if name not in data:
            raise DataParseException(f"Graph file is missing '{name}'", path=source, field=name)

    embedded = TaskSchema.from_dict(data["schema"])
    if schema is not None:
        schema.require_same(embedded, what="Graph")

    c = embedded.num_nodes
    if data["shape"] != [c, c]:
        raise SchemaMismatchError(
            f"Graph shape {data['shape']} does not match the {c} schema classes",
            expected=[c, c],
            actual=data["shape"],
        )
    try:
        binary = np.asarray(data["binary"], dtype=np.int64)
        weighted = np.asarray(data["weighted"], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise DataParseException(f"Graph matrices are not numeric: {e}", path=source) from e

    overrides = {}
    for key, value in (data.get("tau_overrides") or {}).items():
        parts = key.split(":")
        if len(parts) != 2:
            raise DataParseException(
                f"Bad tau override key {key!r}", path=source, field="tau_overrides"
            )
        overrides[(parts[0], parts[1])] = _number(value, source, f"tau_overrides.{key}")

    return CrossTaskGraph(
        embedded,
        binary,
        weighted,
        tau=_number(data["tau"], source, "tau"),
        p=_number(data["p"], source, "p"),
        tau_overrides=overrides,
    )


def _number(value: Any, source: str, field: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise DataParseException(f"Graph field '{field}' is not a number: {value!r}", path=source, field=field) from e


def export_graph(graph: CrossTaskGraph, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(graph_to_dict(graph), f, indent=1)


def import_graph(path: Union[str, Path], schema: Optional[TaskSchema] = None) -> CrossTaskGraph:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataParseException(
            f"Malformed graph JSON: {e.msg}", path=str(path), line=e.lineno, column=e.colno
        ) from e
    if not isinstance(data, dict):
        raise DataParseException("Graph file root must be an object", path=str(path))
    return graph_from_dict(data, schema=schema, source=str(path))
