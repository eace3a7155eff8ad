"""Inspection helpers for built graphs."""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from framework.exceptions import ValidationException

from .adjacency import CrossTaskGraph

ADJACENCY_KINDS = ("binary", "weighted", "normalized")


@dataclass
class GraphSummary:
    num_nodes: int
    num_edges: int
    self_loops: int
    density: float
    isolated_nodes: List[str] = field(default_factory=list)
    edges_by_pair: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def summarize_graph(graph: CrossTaskGraph) -> GraphSummary:
    """Edge statistics of the binary adjacency, self-loops excluded from edge counts."""
    schema = graph.schema
    off = graph.binary.copy()
    np.fill_diagonal(off, 0)
    c = graph.num_nodes
    labels = schema.node_labels()

    by_pair = {}
    for i in schema.names:
        for j in schema.names:
            by_pair[f"{i}<-{j}"] = int(off[schema.node_slice(i), schema.node_slice(j)].sum())

    return GraphSummary(
        num_nodes=c,
        num_edges=int(off.sum()),
        self_loops=int(np.trace(graph.binary)),
        density=float(off.sum() / (c * (c - 1))),
        isolated_nodes=[labels[u] for u in range(c) if off[u].sum() == 0],
        edges_by_pair=by_pair,
    )


def adjacency_frame(graph: CrossTaskGraph, kind: str = "weighted") -> pd.DataFrame:
    """Node-labelled adjacency matrix; rows receive, columns send."""
    if kind not in ADJACENCY_KINDS:
        raise ValidationException(f"Unknown adjacency kind: {kind}", details={"kind": kind})
    matrix = {"binary": graph.binary, "weighted": graph.weighted, "normalized": graph.normalized}[kind]
    labels = graph.schema.node_labels()
    return pd.DataFrame(matrix, index=pd.Index(labels, name="node"), columns=labels)
