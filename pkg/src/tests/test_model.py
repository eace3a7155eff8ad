import numpy as np
import pytest

from domain.graph import CrossTaskGraph, TaskSchema, reweight
from domain.model import TaskOutput, build_model, expected_decoder_parameter_count, predict
from domain.numerics import Tensor
from domain.objectives import MultiTaskCriterion, TaskWeights
from framework.config import ModelSection
from framework.exceptions import ConfigurationException, ContractError, DimensionError

TASKS = [
    {"name": "defect", "kind": "multi_label", "classes": ["crack", "root", "deposit"]},
    {"name": "shape", "kind": "multi_class", "classes": ["circular", "oval"]},
]


def schema():
    return TaskSchema.from_dict({"tasks": TASKS})


def toy_graph(s=None, p=0.2):
    s = s or schema()
    binary = np.array(
        [
            [1, 1, 0, 1, 0],
            [0, 1, 1, 0, 1],
            [1, 0, 1, 1, 0],
            [0, 1, 1, 1, 0],
            [1, 0, 0, 1, 1],
        ]
    )
    return CrossTaskGraph(s, binary, reweight(binary, p), tau=0.3, p=p)


def small_config(**overrides):
    values = dict(
        gnn_kind="gcn",
        num_layers=2,
        embedding_dim=8,
        bottleneck_dim=3,
        heads=2,
        encoder_hidden_dim=5,
        encoder_dim=6,
    )
    values.update(overrides)
    return ModelSection(**values)


def relu(x):
    return np.maximum(x, 0.0)


def softmax(x):
    e = np.exp(x - x.max())
    return e / e.sum()


def encoder_reference(model, x):
    p = model.store
    h = relu(x @ p["encoder.0.weight"].data + p["encoder.0.bias"].data)
    return relu(h @ p["encoder.1.weight"].data + p["encoder.1.bias"].data)


def gcn_reference(model, x):
    """Single-sample evaluation of the CT-GCN pipeline written out step by step."""
    p = model.store
    s = model.schema
    z = encoder_reference(model, x)
    nodes = []
    for t in s.tasks:
        compressed = relu(z @ p[f"decoder.{t.name}.bottleneck.weight"].data)
        nodes.append(relu(compressed @ p[f"decoder.{t.name}.embedding"].data).reshape(t.num_classes, -1))
    h = np.vstack(nodes)
    a_hat = model.graph.normalized
    for i in range(model.config.num_layers):
        h = relu(a_hat @ h @ p[f"decoder.gnn.{i}.weight"].data) + h
    scores = (h * p["decoder.projection.weight"].data).sum(axis=1) + p["decoder.projection.bias"].data
    return {t.name: scores[s.node_slice(t.name)] for t in s.tasks}


def test_forward_matches_step_by_step_reference(rng):
    model = build_model(schema(), small_config(), input_dim=4, seed=1, graph=toy_graph())
    x = rng.normal(size=(2, 4))
    out = model(x)
    for b in range(2):
        expected = gcn_reference(model, x[b])
        for name, logits in out.logits.items():
            np.testing.assert_allclose(logits.data[b], expected[name], atol=1e-12)
    probs = out.probabilities
    assert probs["defect"].shape == (2, 3)
    np.testing.assert_allclose(probs["shape"].sum(axis=1), 1.0, atol=1e-9)
    assert np.all((probs["defect"] > 0) & (probs["defect"] < 1))


@pytest.mark.parametrize("kind", ["gcn", "gat"])
def test_batch_equals_stacked_single_samples(kind, rng):
    model = build_model(schema(), small_config(gnn_kind=kind), input_dim=4, seed=2, graph=toy_graph())
    x = rng.normal(size=(5, 4))
    batched = model(x)
    for b in range(5):
        single = model(x[b:b + 1])
        for name in batched.logits:
            np.testing.assert_allclose(batched.logits[name].data[b], single.logits[name].data[0], atol=1e-12)
            np.testing.assert_allclose(batched.aux_logits[name].data[b], single.aux_logits[name].data[0], atol=1e-12)


def test_zero_projection_gives_uniform_outputs(rng):
    model = build_model(schema(), small_config(), input_dim=4, seed=0, graph=toy_graph())
    model.store["decoder.projection.weight"].data[:] = 0.0
    model.store["decoder.projection.bias"].data[:] = 0.0
    probs = model(rng.normal(size=(3, 4))).probabilities
    np.testing.assert_allclose(probs["shape"], 0.5)
    np.testing.assert_allclose(probs["defect"], 0.5)


def test_baseline_matches_linear_heads(rng):
    model = build_model(schema(), small_config(mode="baseline"), input_dim=4, seed=4)
    x = rng.normal(size=(3, 4))
    out = model.forward_baseline(x)
    z = encoder_reference(model, x)
    p = model.store
    for name in ("defect", "shape"):
        expected = z @ p[f"baseline.{name}.weight"].data + p[f"baseline.{name}.bias"].data
        np.testing.assert_allclose(out.logits[name].data, expected, atol=1e-12)
        assert out.aux_logits[name] is out.logits[name]
    np.testing.assert_allclose(out.probabilities["shape"][0], softmax(out.logits["shape"].data[0]))


def test_baseline_zero_weights_uniform(rng):
    model = build_model(schema(), small_config(mode="baseline"), input_dim=4, seed=4)
    for name, tensor in model.store.with_prefix("baseline."):
        tensor.data[:] = 0.0
    np.testing.assert_allclose(model(rng.normal(size=(2, 4))).probabilities["shape"], 0.5)


def test_modes_share_encoder_initialization():
    ctgnn = build_model(schema(), small_config(), input_dim=4, seed=7, graph=toy_graph())
    baseline = build_model(schema(), small_config(mode="baseline"), input_dim=4, seed=7)
    for name, tensor in ctgnn.store.with_prefix("encoder."):
        assert np.array_equal(tensor.data, baseline.store[name].data)


def test_graph_ablation_reduces_to_projected_embeddings(rng):
    s = schema()
    model = build_model(s, small_config(), input_dim=4, seed=3, graph=CrossTaskGraph.identity(s))
    for _, tensor in model.store.with_prefix("decoder.gnn."):
        tensor.data[:] = 0.0
    x = rng.normal(size=(3, 4))
    decoder = model.decoder
    z = decoder.task_features(model.encoder(Tensor(x)))
    direct = decoder.project(decoder.node_embeddings(z)).data
    out = model(x)
    for t in s.tasks:
        np.testing.assert_allclose(out.logits[t.name].data, direct[:, s.node_slice(t.name)], atol=1e-12)


@pytest.mark.parametrize(
    "kind,shared,task_dim",
    [("gcn", False, None), ("gcn", True, None), ("gat", False, 3), ("gat", True, 6)],
)
def test_decoder_parameter_count_closed_form(kind, shared, task_dim):
    config = small_config(gnn_kind=kind, shared_bottleneck=shared, task_decoder_dim=task_dim)
    model = build_model(schema(), config, input_dim=4, seed=0, graph=toy_graph())
    expected = expected_decoder_parameter_count(
        schema(), config.encoder_dim, kind, config.num_layers, config.embedding_dim, config.bottleneck_dim, shared, task_dim
    )
    assert model.num_parameters("decoder.") == expected
    assert model.decoder.parameter_count() == expected
    assert model.parameter_counts()["total"] == model.num_parameters("encoder.") + expected


def test_published_row_parameter_count():
    s = TaskSchema.from_dict(
        {
            "tasks": [
                {"name": "defect", "kind": "multi_label", "classes": [f"d{i}" for i in range(17)]},
                {"name": "water", "kind": "multi_class", "classes": ["0", "1", "2", "3"]},
                {"name": "shape", "kind": "multi_class", "classes": [f"s{i}" for i in range(6)]},
                {"name": "material", "kind": "multi_class", "classes": [f"m{i}" for i in range(7)]},
            ]
        }
    )
    # 34 nodes, d_DEC=2048, CT-GCN row
    expected = 4 * 2048 * 32 + 34 * 32 * 512 + 3 * 512 * 512 + 34 * 513 + (2048 * 34 + 34)
    assert expected_decoder_parameter_count(s, 2048, "gcn", 3, 512, 32) == expected


@pytest.mark.parametrize("kind,layers", [("gcn", 1), ("gcn", 3), ("gat", 1), ("gat", 3)])
def test_end_to_end_gradients(kind, layers, rng, gradient_error):
    s = schema()
    model = build_model(s, small_config(gnn_kind=kind, num_layers=layers), input_dim=4, seed=5, graph=toy_graph())
    criterion = MultiTaskCriterion(
        s,
        TaskWeights.with_priority(s, "defect", 0.9),
        {"defect": np.array([1.5, 0.5, 1.0]), "shape": np.array([0.8, 1.2])},
        omega=0.75,
    )
    x = rng.normal(size=(3, 4))
    targets = {"defect": np.array([[1.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]]), "shape": np.array([0, 1, 1])}

    def loss():
        return criterion(model(x), targets).total

    assert gradient_error(loss, [t for _, t in model.store.items()]) < 1e-5


def test_graph_schema_mismatch():
    other = TaskSchema.from_dict({"tasks": [TASKS[0], {"name": "water", "kind": "multi_class", "classes": ["a", "b"]}]})
    with pytest.raises(ConfigurationException):
        build_model(schema(), small_config(), input_dim=4, graph=toy_graph(other))


def test_ctgnn_needs_graph():
    with pytest.raises(ConfigurationException):
        build_model(schema(), small_config(), input_dim=4)


def test_feature_width_mismatch():
    model = build_model(schema(), small_config(), input_dim=4, graph=toy_graph())
    with pytest.raises(DimensionError):
        model(np.zeros((2, 3)))


def test_forward_baseline_needs_baseline_mode():
    model = build_model(schema(), small_config(), input_dim=4, graph=toy_graph())
    with pytest.raises(ContractError):
        model.forward_baseline(np.zeros((1, 4)))


def fixed_output(defect, shape):
    s = schema()
    logits = {
        "defect": Tensor(np.log(np.asarray(defect) / (1 - np.asarray(defect)))),
        "shape": Tensor(np.log(np.asarray(shape))),
    }
    return TaskOutput(s, logits, logits)


def test_predict_threshold_and_normal():
    out = fixed_output([[0.6, 0.4, 0.5], [0.2, 0.3, 0.1]], [[0.5, 0.5], [0.3, 0.7]])
    labels = predict(out, 0.5)
    assert labels["defect"].tolist() == [[1, 0, 1], [0, 0, 0]]
    assert labels["shape"].tolist() == [0, 1]


def test_predict_threshold_range():
    out = fixed_output([[0.6, 0.4, 0.1]], [[0.5, 0.5]])
    for threshold in (0.0, 1.0):
        with pytest.raises(ConfigurationException):
            predict(out, threshold)
