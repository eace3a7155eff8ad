"""Task schema and cross-task class graph construction."""

from .adjacency import (
    CrossTaskGraph,
    assemble,
    binarize,
    build_graph,
    conditional_probabilities,
    reweight,
    symmetric_normalize,
)
from .cooccurrence import CooccurrenceMatrix, count_cooccurrence, label_indicator
from .io import export_graph, graph_from_dict, graph_to_dict, import_graph
from .schema import TaskKind, TaskSchema, TaskSpec, load_schema, save_schema
from .summary import ADJACENCY_KINDS, GraphSummary, adjacency_frame, summarize_graph

__all__ = [
    "ADJACENCY_KINDS",
    "CooccurrenceMatrix",
    "CrossTaskGraph",
    "GraphSummary",
    "TaskKind",
    "TaskSchema",
    "TaskSpec",
    "adjacency_frame",
    "assemble",
    "binarize",
    "build_graph",
    "conditional_probabilities",
    "count_cooccurrence",
    "export_graph",
    "graph_from_dict",
    "graph_to_dict",
    "import_graph",
    "label_indicator",
    "load_schema",
    "reweight",
    "save_schema",
    "summarize_graph",
    "symmetric_normalize",
]
