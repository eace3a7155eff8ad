"""Records, dataset files, water labels, synthetic generation and batching."""

from .records import (
    LabeledRecord,
    load_dataset,
    make_record,
    record_to_dict,
    save_dataset,
)
from .splits import Batch, collate, iter_batches, split
from .synthetic import generate_synthetic, planted_tables
from .water import discretize_water, water_level_class

__all__ = [
    "Batch",
    "LabeledRecord",
    "collate",
    "discretize_water",
    "generate_synthetic",
    "iter_batches",
    "load_dataset",
    "make_record",
    "planted_tables",
    "record_to_dict",
    "save_dataset",
    "split",
    "water_level_class",
]
