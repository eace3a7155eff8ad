import json

import numpy as np
import pytest
from sklearn.metrics import mutual_info_score

from domain.data import (
    discretize_water,
    generate_synthetic,
    iter_batches,
    load_dataset,
    planted_tables,
    save_dataset,
    split,
    water_level_class,
)
from domain.graph import TaskSchema, build_graph, count_cooccurrence
from framework.config import SyntheticSpec
from framework.exceptions import (
    ConfigurationException,
    DataParseException,
    DataValidationException,
)

TASKS = [
    {"name": "defect", "kind": "multi_label", "classes": ["crack", "root", "deposit"]},
    {"name": "water", "kind": "multi_class", "classes": ["l0", "l1", "l2", "l3"]},
    {"name": "shape", "kind": "multi_class", "classes": ["circular", "square", "oval"]},
    {"name": "material", "kind": "multi_class", "classes": ["concrete", "clay", "plastic"]},
]


def schema():
    return TaskSchema.from_dict({"tasks": TASKS})


def test_water_bins():
    expected = [0, 1, 2, 3, 3, 3, 3, 3, 3, 3, 3]
    assert [discretize_water(level) for level in range(0, 101, 10)] == expected
    assert water_level_class(70, "raw") == 7
    for bad in (5, -10, 110, "20"):
        with pytest.raises(DataValidationException):
            discretize_water(bad)


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert load_dataset(path, schema()) == []


def test_load_golden_file(tmp_path):
    path = tmp_path / "golden.jsonl"
    path.write_text(
        '{"id": "a", "features": [1.0, 2.0], "labels": {"defect": [], "water": 0, "shape": "oval", "material": 1}}\n'
        "\n"
        '{"id": "b", "features": [0.5, -1], "labels": {"defect": ["crack", 2], "water": 3, "shape": 0, "material": "plastic"}}\n'
        '{"id": "c", "features": [0, 0], "labels": {"defect": [1], "water": "l2", "shape": 1, "material": 0}}\n'
    )
    records = load_dataset(path, schema())
    assert [r.id for r in records] == ["a", "b", "c"]
    assert records[0].labels["defect"] == frozenset()
    assert records[0].labels["shape"] == 2
    assert records[1].labels["defect"] == frozenset({0, 2})
    assert records[1].labels["material"] == 2
    assert records[2].labels["water"] == 2
    assert np.array_equal(records[1].features, [0.5, -1.0])


def test_load_discretizes_raw_water_levels(tmp_path):
    path = tmp_path / "water.jsonl"
    path.write_text(
        '{"id": "a", "features": [1.0], "labels": {"defect": [], "water": 40, "shape": 0, "material": 0}}\n'
    )
    records = load_dataset(path, schema(), water_task="water")
    assert records[0].labels["water"] == 3


def test_unknown_class_names_line_and_field(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(
        '{"id": "a", "features": [1.0], "labels": {"defect": [], "water": 0, "shape": 0, "material": 0}}\n'
        '{"id": "b", "features": [1.0], "labels": {"defect": ["rust"], "water": 0, "shape": 0, "material": 0}}\n'
    )
    with pytest.raises(DataValidationException) as exc:
        load_dataset(path, schema())
    assert exc.value.details["line"] == 2
    assert exc.value.details["field"] == "labels.defect"


def test_ragged_and_malformed_lines(tmp_path):
    path = tmp_path / "ragged.jsonl"
    path.write_text(
        '{"id": "a", "features": [1.0, 2.0], "labels": {"defect": [], "water": 0, "shape": 0, "material": 0}}\n'
        '{"id": "b", "features": [1.0], "labels": {"defect": [], "water": 0, "shape": 0, "material": 0}}\n'
    )
    with pytest.raises(DataValidationException) as exc:
        load_dataset(path, schema())
    assert exc.value.details["field"] == "features"

    path.write_text('{"id": "a", "features": [1.0\n')
    with pytest.raises(DataParseException) as parse_exc:
        load_dataset(path, schema())
    assert parse_exc.value.details["line"] == 1


def synthetic_spec(**overrides):
    base = {"tasks": TASKS, "contexts": 4, "rho": 0.9, "noise": 0.5, "feature_dim": 8, "n_records": 300, "seed": 3}
    base.update(overrides)
    return SyntheticSpec.model_validate(base)


def test_synthetic_is_deterministic_and_valid():
    schema_a, first = generate_synthetic(synthetic_spec(n_records=1000))
    _, second = generate_synthetic(synthetic_spec(n_records=1000))
    assert len(first) == 1000
    assert all(a.equals(b) for a, b in zip(first, second))
    for record in first:
        schema_a.encode_labels(record.labels, record.id)


def test_synthetic_rejects_bad_tables():
    tables = planted_tables(schema(), 4)
    tables["water"][0] = [0.5, 0.2, 0.0, 0.0]
    with pytest.raises(ConfigurationException):
        generate_synthetic(synthetic_spec(context_tables=tables))


def mean_cross_task_mi(records):
    water = [r.labels["water"] for r in records]
    shape = [r.labels["shape"] for r in records]
    material = [r.labels["material"] for r in records]
    crack = [int(0 in r.labels["defect"]) for r in records]
    pairs = [(water, shape), (water, material), (shape, material), (crack, water)]
    return float(np.mean([mutual_info_score(a, b) for a, b in pairs]))


def test_independent_tasks_when_rho_is_zero():
    _, records = generate_synthetic(synthetic_spec(rho=0.0, n_records=10000))
    assert mean_cross_task_mi(records) < 0.01


def test_mutual_information_grows_with_rho():
    values = []
    for rho in (0.0, 0.5, 1.0):
        values.append(np.mean([
            mean_cross_task_mi(generate_synthetic(synthetic_spec(rho=rho, n_records=10000, seed=s))[1])
            for s in range(3)
        ]))
    assert values[0] <= values[1] <= values[2]


def test_planted_edges_are_recovered():
    tasks = [
        {"name": "a", "kind": "multi_label", "classes": ["x", "y", "z"]},
        {"name": "b", "kind": "multi_class", "classes": ["x", "y", "z"]},
        {"name": "c", "kind": "multi_class", "classes": ["x", "y", "z"]},
    ]
    spec = SyntheticSpec.model_validate(
        {"tasks": tasks, "contexts": 3, "rho": 1.0, "n_records": 200, "seed": 1,
         "context_tables": planted_tables(TaskSchema.from_dict({"tasks": tasks}), 3)}
    )
    schema_, records = generate_synthetic(spec)
    graph = build_graph(count_cooccurrence(records, schema_), tau=0.5, p=0.2)
    planted = np.array([[int(u % 3 == v % 3) for v in range(9)] for u in range(9)])
    assert np.array_equal(graph.binary, planted)


def test_save_load_round_trip(tmp_path):
    schema_, records = generate_synthetic(synthetic_spec(n_records=50))
    path = tmp_path / "ds.jsonl"
    save_dataset(records, path)
    loaded = load_dataset(path, schema_)
    assert all(a.equals(b) for a, b in zip(records, loaded))
    assert json.loads(path.read_text().splitlines()[0])["id"] == records[0].id


def test_split_sizes_and_partition():
    _, records = generate_synthetic(synthetic_spec(n_records=100))
    train, val, test = split(records, (0.8, 0.1, 0.1), seed=0)
    assert (len(train), len(val), len(test)) == (80, 10, 10)
    ids = [r.id for r in train + val + test]
    assert sorted(ids) == sorted(r.id for r in records)
    assert len(set(ids)) == 100
    with pytest.raises(ConfigurationException):
        split(records, (0.5, 0.2, 0.2), seed=0)


def test_split_never_fills_a_zero_fraction():
    _, records = generate_synthetic(synthetic_spec(n_records=5))
    assert [len(part) for part in split(records, (0.5, 0.5, 0.0), seed=0)] == [3, 2, 0]
    assert [len(part) for part in split(records, (0.0, 0.5, 0.5), seed=0)] == [0, 3, 2]
    assert [len(part) for part in split(records, (1.0, 0.0, 0.0), seed=0)] == [5, 0, 0]
    _, records = generate_synthetic(synthetic_spec(n_records=7))
    assert [len(part) for part in split(records, (0.6, 0.2, 0.2), seed=0)] == [4, 2, 1]


def test_batches_are_deterministic_and_keep_partial_batch():
    schema_, records = generate_synthetic(synthetic_spec(n_records=25))
    first = [b.ids for b in iter_batches(records, schema_, 10, shuffle=4)]
    second = [b.ids for b in iter_batches(records, schema_, 10, shuffle=4)]
    assert first == second
    assert [len(ids) for ids in first] == [10, 10, 5]
    batch = next(iter_batches(records, schema_, 10))
    assert batch.features.shape == (10, 8)
    assert batch.targets["defect"].shape == (10, 3)
    assert batch.targets["water"].dtype == np.int64
    with pytest.raises(ConfigurationException):
        next(iter_batches(records, schema_, 0))
