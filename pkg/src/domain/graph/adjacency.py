"""
Cross-task adjacency construction.

Counts become per task-pair conditional probabilities, are thresholded into
binary blocks, laid out as one C x C matrix and re-weighted so that every row
carries self-loop mass ``1 - p`` and neighbour mass ``p``. Entry ``[u, v]`` is
the weight of the edge from node v into node u.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from framework.exceptions import ConfigurationException, ContractError, SchemaMismatchError
from framework.logging import get_logger

from .cooccurrence import CooccurrenceMatrix
from .schema import TaskSchema

logger = get_logger(__name__)

TaskPair = Tuple[str, str]


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigurationException(f"{name} must lie in [0, 1], got {value}", key=name)


def conditional_probabilities(counts: CooccurrenceMatrix) -> Dict[TaskPair, np.ndarray]:
    """
    ``P[i, j][u, v]``: probability of class u of task i given class v of task j.

    The conditioning count is the class count of v for i == j and the column
    sum of the block otherwise; columns with no occurrences are all zero.
    """
    probabilities: Dict[TaskPair, np.ndarray] = {}
    for (i, j), block in counts.blocks().items():
        block = block.astype(np.float64)
        totals = np.diag(block) if i == j else block.sum(axis=0)
        probabilities[(i, j)] = np.divide(
            block, totals[None, :], out=np.zeros_like(block), where=totals[None, :] > 0
        )
    return probabilities


def binarize(
    probabilities: Mapping[TaskPair, np.ndarray],
    tau: float,
    overrides: Optional[Mapping[TaskPair, float]] = None,
) -> Dict[TaskPair, np.ndarray]:
    """Keep an edge wherever the conditional probability reaches the pair's threshold."""
    _check_unit_interval("tau", tau)
    overrides = dict(overrides or {})
    for pair, value in overrides.items():
        _check_unit_interval(f"tau[{pair[0]}:{pair[1]}]", value)
    return {
        pair: (p >= overrides.get(pair, tau)).astype(np.int64)
        for pair, p in probabilities.items()
    }


def assemble(blocks: Mapping[TaskPair, np.ndarray], schema: TaskSchema) -> np.ndarray:
    """Lay the task-pair blocks out in task order as one C x C matrix."""
    matrix = np.zeros((schema.num_nodes, schema.num_nodes), dtype=np.int64)
    for i in schema.names:
        for j in schema.names:
            if (i, j) not in blocks:
                raise ContractError(
                    f"Missing adjacency block ({i}, {j})", details={"block": [i, j]}
                )
            rows, cols = schema.node_slice(i), schema.node_slice(j)
            block = np.asarray(blocks[(i, j)])
            expected = (rows.stop - rows.start, cols.stop - cols.start)
            if block.shape != expected:
                raise ContractError(
                    f"Block ({i}, {j}) has shape {block.shape}, expected {expected}",
                    details={"block": [i, j]},
                )
            matrix[rows, cols] = block
    return matrix


def reweight(binary: np.ndarray, p: float) -> np.ndarray:
    """Spread neighbour mass ``p`` evenly over each row's incoming edges."""
    _check_unit_interval("p", p)
    off = np.asarray(binary, dtype=np.float64).copy()
    np.fill_diagonal(off, 0.0)
    degree = off.sum(axis=1)
    has_neighbors = degree > 0
    weighted = np.divide(
        off * p, degree[:, None], out=np.zeros_like(off), where=has_neighbors[:, None]
    )
    np.fill_diagonal(weighted, np.where(has_neighbors, 1.0 - p, 1.0))
    return weighted


def symmetric_normalize(weighted: np.ndarray) -> np.ndarray:
    """``D^-1/2 W D^-1/2`` with D the in-degree (row sums); zero-degree rows stay zero."""
    w = np.asarray(weighted, dtype=np.float64)
    degree = w.sum(axis=1)
    scale = np.divide(1.0, np.sqrt(degree), out=np.zeros_like(degree), where=degree > 0)
    return scale[:, None] * w * scale[None, :]


@dataclass(frozen=True, eq=False)
class CrossTaskGraph:
    schema: TaskSchema
    binary: np.ndarray
    weighted: np.ndarray
    tau: float
    p: float
    tau_overrides: Dict[TaskPair, float] = field(default_factory=dict)

    def __post_init__(self):
        expected = (self.schema.num_nodes, self.schema.num_nodes)
        for name in ("binary", "weighted"):
            matrix = getattr(self, name)
            if matrix.shape != expected:
                raise SchemaMismatchError(
                    f"{name} adjacency has shape {matrix.shape}, schema needs {expected}",
                    expected=list(expected),
                    actual=list(matrix.shape),
                )

    @property
    def num_nodes(self) -> int:
        return self.schema.num_nodes

    def equals(self, other: "CrossTaskGraph") -> bool:
        """Exact equality of schema, matrices and construction parameters."""
        return (
            self.schema == other.schema
            and np.array_equal(self.binary, other.binary)
            and np.array_equal(self.weighted, other.weighted)
            and self.tau == other.tau
            and self.p == other.p
            and self.tau_overrides == other.tau_overrides
        )

    @cached_property
    def normalized(self) -> np.ndarray:
        return symmetric_normalize(self.weighted)

    @classmethod
    def identity(cls, schema: TaskSchema) -> "CrossTaskGraph":
        """Graph with only self-loops (no cross-class message passing)."""
        eye = np.eye(schema.num_nodes)
        return cls(schema, eye.astype(np.int64), eye, tau=1.0, p=0.0)


def build_graph(
    counts: CooccurrenceMatrix,
    tau: float,
    p: float,
    tau_overrides: Optional[Mapping[TaskPair, float]] = None,
) -> CrossTaskGraph:
    """Full pipeline from counts to a re-weighted cross-task graph."""
    schema = counts.schema
    overrides = dict(tau_overrides or {})
    for pair in overrides:
        schema.task(pair[0]), schema.task(pair[1])

    binary = assemble(binarize(conditional_probabilities(counts), tau, overrides), schema)
    # every observed class keeps its self-loop
    seen = np.diag(counts.counts) > 0
    binary[np.diag_indices_from(binary)] = np.where(seen, 1, np.diag(binary))
    weighted = reweight(binary, p)

    edges = int(binary.sum() - np.trace(binary))
    logger.info(
        f"Built cross-task graph: {schema.num_nodes} nodes, {edges} edges "
        f"(tau={tau}, p={p}, records={counts.num_records})"
    )
    return CrossTaskGraph(schema, binary, weighted, tau=tau, p=p, tau_overrides=overrides)
