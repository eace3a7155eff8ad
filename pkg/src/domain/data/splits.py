"""Dataset splits and mini-batching."""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from domain.graph.schema import TaskSchema
from domain.numerics import Rng
from framework.exceptions import ConfigurationException

from .records import LabeledRecord


@dataclass
class Batch:
    """Stacked features and per-task targets of a mini-batch.

    Multi-label targets are B x C_t 0/1 float matrices, multi-class targets
    B-long integer index vectors.
    """

    ids: List[str]
    features: np.ndarray
    targets: Dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.ids)


def split(
    records: Sequence[LabeledRecord], fractions: Sequence[float], seed: int
) -> Tuple[List[LabeledRecord], List[LabeledRecord], List[LabeledRecord]]:
    """
    Shuffle deterministically and cut into train/val/test.

    Sizes are the floors of ``fraction * n``; leftover records go one each to
    the splits with the largest fractional parts (ties to the earlier split).
    A zero fraction always yields an empty split.
    """
    fractions = [float(f) for f in fractions]
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigurationException(
            f"Split fractions must be three non-negative values summing to 1, got {fractions}",
            key="fractions",
        )
    n = len(records)
    order = Rng(seed).permutation(n)
    exact = np.asarray(fractions) * n
    sizes = np.floor(exact + 1e-9).astype(int)
    ranked = [i for i in np.argsort(-(exact - sizes), kind="stable") if fractions[i] > 0]
    for i in ranked[: max(0, n - int(sizes.sum()))]:
        sizes[i] += 1
    n_train, n_val = int(sizes[0]), int(sizes[1])
    shuffled = [records[i] for i in order]
    return shuffled[:n_train], shuffled[n_train:n_train + n_val], shuffled[n_train + n_val:]


def collate(records: Sequence[LabeledRecord], schema: TaskSchema) -> Batch:
    targets: Dict[str, np.ndarray] = {}
    for task in schema.tasks:
        if task.is_multi_label:
            matrix = np.zeros((len(records), task.num_classes))
            for row, record in enumerate(records):
                matrix[row, list(record.labels[task.name])] = 1.0
            targets[task.name] = matrix
        else:
            targets[task.name] = np.array([record.labels[task.name] for record in records], dtype=np.int64)
    features = (
        np.stack([r.features for r in records]) if records else np.zeros((0, 0))
    )
    return Batch(ids=[r.id for r in records], features=features, targets=targets)


def iter_batches(
    records: Sequence[LabeledRecord],
    schema: TaskSchema,
    batch_size: int,
    shuffle: Optional[Union[int, Rng]] = None,
) -> Iterator[Batch]:
    """
    Yield batches in file order or, with ``shuffle`` (a seed or a live Rng),
    in a permuted order. The final partial batch is kept.
    """
    if batch_size < 1:
        raise ConfigurationException(f"batch_size must be >= 1, got {batch_size}", key="batch_size")
    order = np.arange(len(records))
    if shuffle is not None:
        rng = Rng(shuffle) if isinstance(shuffle, int) else shuffle
        order = rng.permutation(len(records))
    for start in range(0, len(records), batch_size):
        yield collate([records[i] for i in order[start:start + batch_size]], schema)
