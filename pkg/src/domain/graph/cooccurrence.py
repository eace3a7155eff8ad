"""Class co-occurrence counting over a labelled corpus."""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Sequence, Tuple

import numpy as np

from .schema import TaskSchema

if TYPE_CHECKING:
    from domain.data.records import LabeledRecord


@dataclass(frozen=True, eq=False)
class CooccurrenceMatrix:
    """
    Pairwise class counts over all C nodes.

    ``counts[u, v]`` is the number of records in which nodes u and v are both
    present; the diagonal holds per-class occurrence counts.
    """

    schema: TaskSchema
    counts: np.ndarray
    num_records: int

    def block(self, row_task: str, col_task: str) -> np.ndarray:
        return self.counts[self.schema.node_slice(row_task), self.schema.node_slice(col_task)]

    def blocks(self) -> Dict[Tuple[str, str], np.ndarray]:
        return {(i, j): self.block(i, j) for i in self.schema.names for j in self.schema.names}

    def class_counts(self, task: str) -> np.ndarray:
        return np.diag(self.block(task, task)).copy()


def label_indicator(records: Sequence["LabeledRecord"], schema: TaskSchema) -> np.ndarray:
    """N x C 0/1 matrix of present classes; validates every record against ``schema``."""
    if not records:
        return np.zeros((0, schema.num_nodes), dtype=np.int64)
    return np.stack([schema.encode_labels(r.labels, record_id=r.id) for r in records])


def count_cooccurrence(records: Sequence["LabeledRecord"], schema: TaskSchema) -> CooccurrenceMatrix:
    indicator = label_indicator(records, schema)
    return CooccurrenceMatrix(
        schema=schema, counts=indicator.T @ indicator, num_records=len(records)
    )
