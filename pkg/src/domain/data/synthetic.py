"""
Correlated multi-task synthetic data.

Each record draws a latent context. Per task, with probability ``rho`` its
labels come from that context's class table, otherwise from the
context-free marginal. Features are the sum of the drawn classes' prototype
vectors plus Gaussian noise, so per-class evidence is linear while the shared
context ties the tasks together.
"""

from typing import Dict, List, Tuple

import numpy as np

from domain.graph.schema import TaskSchema
from domain.numerics import Rng
from framework.config.models import SyntheticSpec
from framework.exceptions import ConfigurationException
from framework.logging import get_logger

from .records import LabeledRecord

logger = get_logger(__name__)

_TOLERANCE = 1e-9


def planted_tables(schema: TaskSchema, contexts: int) -> Dict[str, List[List[float]]]:
    """Deterministic tables: context k selects class ``k mod C_t`` in every task."""
    tables = {}
    for task in schema.tasks:
        rows = np.zeros((contexts, task.num_classes))
        rows[np.arange(contexts), np.arange(contexts) % task.num_classes] = 1.0
        tables[task.name] = rows.tolist()
    return tables


def _random_tables(schema: TaskSchema, contexts: int, rng: Rng) -> Dict[str, np.ndarray]:
    tables = {}
    for task in schema.tasks:
        c = task.num_classes
        if task.is_multi_label:
            active = rng.random((contexts, c)) < min(0.5, 2.0 / c)
            tables[task.name] = np.where(active, 0.9, 0.05)
        else:
            tables[task.name] = rng.generator.dirichlet(np.full(c, 0.3), size=contexts)
    return tables


def _validate_table(name: str, table: np.ndarray, contexts: int, classes: int, multi_label: bool) -> None:
    if table.shape != (contexts, classes):
        raise ConfigurationException(
            f"Table for task {name} has shape {table.shape}, expected {(contexts, classes)}",
            key=f"context_tables.{name}",
        )
    if np.any(table < 0) or np.any(table > 1) or not np.all(np.isfinite(table)):
        raise ConfigurationException(
            f"Table for task {name} has entries outside [0, 1]", key=f"context_tables.{name}"
        )
    if not multi_label and np.any(np.abs(table.sum(axis=1) - 1.0) > _TOLERANCE):
        raise ConfigurationException(
            f"Rows of the table for task {name} must sum to 1", key=f"context_tables.{name}"
        )


def _sample_categorical(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs, axis=1)
    return np.minimum((cdf < u[:, None] * cdf[:, -1:]).sum(axis=1), probs.shape[1] - 1)


def generate_synthetic(spec: SyntheticSpec) -> Tuple[TaskSchema, List[LabeledRecord]]:
    """Generate ``spec.n_records`` schema-valid records; deterministic given ``spec.seed``."""
    schema = TaskSchema.from_dict(spec.schema_dict())
    k, n = spec.contexts, spec.n_records
    root = Rng(spec.seed)

    weights = np.full(k, 1.0 / k) if spec.context_weights is None else np.asarray(spec.context_weights, float)
    if weights.shape != (k,) or np.any(weights < 0) or abs(weights.sum() - 1.0) > _TOLERANCE:
        raise ConfigurationException(
            "context_weights must be K non-negative values summing to 1", key="context_weights"
        )

    if spec.context_tables is None:
        tables = _random_tables(schema, k, root.child("tables"))
    else:
        missing = set(schema.names) - set(spec.context_tables)
        if missing:
            raise ConfigurationException(
                f"context_tables lacks task(s) {sorted(missing)}", key="context_tables"
            )
        tables = {name: np.asarray(spec.context_tables[name], float) for name in schema.names}

    marginals = {}
    for task in schema.tasks:
        table = tables[task.name]
        _validate_table(task.name, table, k, task.num_classes, task.is_multi_label)
        if spec.marginals and task.name in spec.marginals:
            marginal = np.asarray(spec.marginals[task.name], float)
            _validate_table(task.name, marginal[None, :], 1, task.num_classes, task.is_multi_label)
        else:
            marginal = weights @ table
        marginals[task.name] = marginal

    label_rng = root.child("labels")
    context = label_rng.choice(k, size=n, p=weights)
    indicator_blocks = []
    labels_by_task: Dict[str, list] = {}
    for task in schema.tasks:
        use_context = label_rng.random(n) < spec.rho
        probs = np.where(use_context[:, None], tables[task.name][context], marginals[task.name][None, :])
        if task.is_multi_label:
            present = label_rng.random((n, task.num_classes)) < probs
            labels_by_task[task.name] = [frozenset(np.flatnonzero(row).tolist()) for row in present]
            indicator_blocks.append(present.astype(np.float64))
        else:
            drawn = _sample_categorical(probs, label_rng.random(n))
            labels_by_task[task.name] = drawn.tolist()
            indicator_blocks.append(np.eye(task.num_classes)[drawn])

    feature_rng = root.child("features")
    prototypes = feature_rng.normal(0.0, 1.0, size=(schema.num_nodes, spec.feature_dim))
    indicator = np.concatenate(indicator_blocks, axis=1) if n else np.zeros((0, schema.num_nodes))
    features = indicator @ prototypes + spec.noise * feature_rng.normal(size=(n, spec.feature_dim))

    width = max(6, len(str(n)))
    records = [
        LabeledRecord(
            id=f"syn-{i:0{width}d}",
            features=features[i],
            labels={name: labels_by_task[name][i] for name in schema.names},
        )
        for i in range(n)
    ]
    logger.info(
        f"Generated {n} synthetic records: {schema.num_tasks} tasks, {schema.num_nodes} classes, "
        f"K={k}, rho={spec.rho}"
    )
    return schema, records
