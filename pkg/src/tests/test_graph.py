import json

import numpy as np
import pandas as pd
import pytest

from domain.data import LabeledRecord
from domain.graph import (
    CrossTaskGraph,
    TaskKind,
    TaskSchema,
    TaskSpec,
    adjacency_frame,
    assemble,
    binarize,
    build_graph,
    conditional_probabilities,
    count_cooccurrence,
    export_graph,
    import_graph,
    reweight,
    summarize_graph,
    symmetric_normalize,
)
from framework.exceptions import (
    ConfigurationException,
    ContractError,
    DataParseException,
    DataValidationException,
    SchemaMismatchError,
    ValidationException,
)


def two_task_schema():
    return TaskSchema(
        (
            TaskSpec("defect", TaskKind.MULTI_LABEL, ("crack", "root")),
            TaskSpec("water", TaskKind.MULTI_CLASS, ("low", "high")),
        )
    )


def random_schema(rng, num_tasks=4):
    tasks = []
    for t in range(num_tasks):
        kind = TaskKind.MULTI_LABEL if t == 0 else TaskKind.MULTI_CLASS
        size = int(rng.integers(2, 7))
        tasks.append(TaskSpec(f"task{t}", kind, tuple(f"c{c}" for c in range(size))))
    return TaskSchema(tuple(tasks))


def random_records(rng, schema, n):
    records = []
    for i in range(n):
        labels = {}
        for task in schema.tasks:
            if task.is_multi_label:
                labels[task.name] = frozenset(np.flatnonzero(rng.random(task.num_classes) < 0.3).tolist())
            else:
                labels[task.name] = int(rng.integers(task.num_classes))
        records.append(LabeledRecord(f"r{i}", np.zeros(2), labels))
    return records


def brute_force_graph(records, schema, tau, p):
    """Loop-based reference: counts, conditionals, threshold, self-loops, re-weighting."""
    c = schema.num_nodes
    present = []
    for r in records:
        nodes = set()
        for task, offset in zip(schema.tasks, schema.offsets):
            value = r.labels[task.name]
            for cls in (value if task.is_multi_label else [value]):
                nodes.add(offset + cls)
        present.append(nodes)

    counts = np.zeros((c, c), dtype=np.int64)
    for nodes in present:
        for u in range(c):
            for v in range(c):
                if u in nodes and v in nodes:
                    counts[u, v] += 1

    task_of = [t for t, task in enumerate(schema.tasks) for _ in range(task.num_classes)]
    prob = np.zeros((c, c))
    for u in range(c):
        for v in range(c):
            if task_of[u] == task_of[v]:
                denom = counts[v, v]
            else:
                denom = sum(counts[w, v] for w in range(c) if task_of[w] == task_of[u])
            prob[u, v] = counts[u, v] / denom if denom > 0 else 0.0

    binary = (prob >= tau).astype(int)
    for u in range(c):
        if counts[u, u] > 0:
            binary[u, u] = 1

    weighted = np.zeros((c, c))
    for u in range(c):
        neighbours = [v for v in range(c) if v != u and binary[u, v]]
        if neighbours:
            weighted[u, u] = 1 - p
            for v in neighbours:
                weighted[u, v] = p / len(neighbours)
        else:
            weighted[u, u] = 1.0
    return counts, prob, binary, weighted


def test_schema_node_index():
    schema = two_task_schema()
    assert schema.num_nodes == 4
    assert schema.node_index("water", 1) == 3
    assert schema.node_labels() == ["defect:crack", "defect:root", "water:low", "water:high"]
    assert TaskSchema.from_dict(schema.to_dict()) == schema
    assert schema.restrict(["water"]).names == ["water"]


def test_task_names_must_not_contain_colon():
    with pytest.raises(ValidationException):
        TaskSpec("defect:a", TaskKind.MULTI_LABEL, ("crack", "root"))
    with pytest.raises(ValidationException):
        TaskSchema.from_dict({"tasks": [{"name": "pipe:shape", "kind": "multi_class", "classes": ["a", "b"]}]})


def test_single_record_counts():
    schema = two_task_schema()
    counts = count_cooccurrence([LabeledRecord("a", np.zeros(1), {"defect": frozenset({0}), "water": 0})], schema)
    expected = np.zeros((2, 2), dtype=int)
    expected[0, 0] = 1
    assert np.array_equal(counts.block("defect", "water"), expected)
    assert counts.counts.sum() == 4


def test_empty_corpus_counts_are_zero():
    counts = count_cooccurrence([], two_task_schema())
    assert not counts.counts.any()
    assert counts.num_records == 0


def test_out_of_range_label_names_record():
    schema = two_task_schema()
    bad = LabeledRecord("bad-7", np.zeros(1), {"defect": frozenset({5}), "water": 0})
    with pytest.raises(DataValidationException) as exc:
        count_cooccurrence([bad], schema)
    assert "bad-7" in str(exc.value)


def test_counts_match_brute_force_and_are_symmetric(rng):
    schema = random_schema(rng)
    records = random_records(rng, schema, 50)
    counts = count_cooccurrence(records, schema)
    expected, *_ = brute_force_graph(records, schema, 0.5, 0.2)
    assert np.array_equal(counts.counts, expected)
    for i in schema.names:
        for j in schema.names:
            assert np.array_equal(counts.block(i, j), counts.block(j, i).T)


def test_conditional_probability_cases():
    schema = two_task_schema()
    counts = count_cooccurrence([], schema)
    block = np.array([[2, 0], [1, 3]])
    counts.counts[0:2, 2:4] = block
    counts.counts[2:4, 0:2] = block.T
    P = conditional_probabilities(counts)
    np.testing.assert_allclose(P[("defect", "water")], [[2 / 3, 0], [1 / 3, 1]])
    assert np.array_equal(binarize(P, 0.5)[("defect", "water")], [[1, 0], [0, 1]])
    assert not P[("water", "water")].any()  # unseen classes give zero columns


def test_binarize_tau_bounds_and_monotonicity(rng):
    schema = random_schema(rng)
    P = conditional_probabilities(count_cooccurrence(random_records(rng, schema, 40), schema))
    with pytest.raises(ConfigurationException):
        binarize(P, 1.5)
    assert all(b.all() for b in binarize(P, 0.0).values())
    low, high = binarize(P, 0.1), binarize(P, 0.4)
    for pair in P:
        assert np.all(low[pair] >= high[pair])


def test_assemble_layout_and_missing_block():
    schema = two_task_schema()
    blocks = {(i, j): np.full((2, 2), 10 * a + b) for a, i in enumerate(schema.names) for b, j in enumerate(schema.names)}
    matrix = assemble(blocks, schema)
    assert matrix[0, 3] == 1 and matrix[3, 0] == 10 and matrix[2, 2] == 11
    del blocks[("water", "defect")]
    with pytest.raises(ContractError):
        assemble(blocks, schema)


def test_reweight_cases():
    binary = np.array([[1, 1, 1], [0, 1, 0], [0, 1, 1]])
    w = reweight(binary, 0.2)
    np.testing.assert_allclose(w[0], [0.8, 0.1, 0.1])
    assert w[1, 1] == 1.0
    np.testing.assert_allclose(reweight(binary, 0.0), np.eye(3))
    with pytest.raises(ConfigurationException):
        reweight(binary, -0.1)


def test_symmetric_normalize():
    assert np.array_equal(symmetric_normalize(np.eye(3)), np.eye(3))
    w = np.array([[1.0, 2.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.0]])
    d = w.sum(axis=1)
    out = symmetric_normalize(w)
    for u in range(2):
        for v in range(2):
            assert out[u, v] == pytest.approx(w[u, v] / np.sqrt(d[u] * d[v]))
    assert not out[2].any()
    stochastic = reweight(np.ones((3, 3)), 0.3)
    np.testing.assert_allclose(symmetric_normalize(stochastic), stochastic, atol=1e-15)


@pytest.mark.parametrize("seed", range(20))
def test_pipeline_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    schema = random_schema(rng)
    records = random_records(rng, schema, int(rng.integers(1, 101)))
    tau, p = float(rng.choice([0.0, 0.05, 0.25, 0.5])), float(rng.uniform(0, 1))
    counts = count_cooccurrence(records, schema)
    graph = build_graph(counts, tau=tau, p=p)
    ref_counts, ref_prob, ref_binary, ref_weighted = brute_force_graph(records, schema, tau, p)

    assert np.array_equal(counts.counts, ref_counts)
    P = conditional_probabilities(counts)
    for i in schema.names:
        for j in schema.names:
            np.testing.assert_allclose(
                P[(i, j)], ref_prob[schema.node_slice(i), schema.node_slice(j)], atol=1e-12, rtol=0
            )
    assert np.array_equal(graph.binary, ref_binary)
    np.testing.assert_allclose(graph.weighted, ref_weighted, atol=1e-12, rtol=0)

    off = graph.binary - np.diag(np.diag(graph.binary))
    for u in range(schema.num_nodes):
        if off[u].any():
            assert abs(graph.weighted[u].sum() - 1.0) < 1e-12
        else:
            assert graph.weighted[u, u] == 1.0


def test_graph_round_trip_is_exact(tmp_path, rng):
    schema = random_schema(rng, 3)
    graph = build_graph(count_cooccurrence(random_records(rng, schema, 30), schema), 0.05, 0.37,
                        tau_overrides={("task0", "task1"): 0.4})
    path = tmp_path / "graph.json"
    export_graph(graph, path)
    assert import_graph(path, schema).equals(graph)


def test_import_rejects_wrong_schema_and_malformed_json(tmp_path, rng):
    graph = build_graph(count_cooccurrence([], two_task_schema()), 0.05, 0.2)
    path = tmp_path / "graph.json"
    export_graph(graph, path)
    other = TaskSchema((TaskSpec("water", TaskKind.MULTI_CLASS, ("a", "b", "c")),))
    with pytest.raises(SchemaMismatchError):
        import_graph(path, other)

    data = json.loads(path.read_text())
    data["shape"] = [3, 3]
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaMismatchError):
        import_graph(path)

    path.write_text('{\n  "schema": [1, 2,\n')
    with pytest.raises(DataParseException) as exc:
        import_graph(path)
    assert exc.value.details["line"] >= 2


def test_import_rejects_non_numeric_fields(tmp_path):
    graph = build_graph(count_cooccurrence([], two_task_schema()), 0.05, 0.2)
    path = tmp_path / "graph.json"
    export_graph(graph, path)
    data = json.loads(path.read_text())
    data["tau"] = "high"
    path.write_text(json.dumps(data))
    with pytest.raises(DataParseException) as exc:
        import_graph(path)
    assert exc.value.details["field"] == "tau"


def test_import_hand_written_two_node_graph(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(
        json.dumps(
            {
                "format_version": 1,
                "schema": {"tasks": [{"name": "t", "kind": "multi_label", "classes": ["a", "b"]}]},
                "shape": [2, 2],
                "tau": 0.5,
                "p": 0.2,
                "binary": [[1, 1], [0, 1]],
                "weighted": [[0.8, 0.2], [0.0, 1.0]],
            }
        )
    )
    graph = import_graph(path)
    assert np.array_equal(graph.binary, [[1, 1], [0, 1]])
    assert np.array_equal(graph.weighted, [[0.8, 0.2], [0.0, 1.0]])
    assert graph.tau == 0.5 and graph.p == 0.2


def test_summary_and_adjacency_frame(rng):
    schema = two_task_schema()
    records = [
        LabeledRecord("a", np.zeros(1), {"defect": frozenset({0}), "water": 1}),
        LabeledRecord("b", np.zeros(1), {"defect": frozenset(), "water": 0}),
    ]
    graph = build_graph(count_cooccurrence(records, schema), tau=0.5, p=0.2)
    summary = summarize_graph(graph)
    assert summary.num_edges == 2  # crack <-> high
    assert summary.edges_by_pair["defect<-water"] == 1
    assert "defect:root" in summary.isolated_nodes
    frame = adjacency_frame(graph, "weighted")
    assert isinstance(frame, pd.DataFrame)
    assert frame.loc["defect:crack", "water:high"] == pytest.approx(0.2)


def test_identity_graph_is_self_loops_only():
    graph = CrossTaskGraph.identity(two_task_schema())
    assert np.array_equal(graph.normalized, np.eye(4))
