"""
Cross-task GNN decoder and the disjointed-heads baseline.

The decoder turns the encoder output ``x`` into one embedding per class
node, refines the embeddings over the cross-task graph and projects every
refined node to a scalar logit:

    z_t       = f_DEC,t(x)                 (identity unless a task decoder width is set)
    z~_t      = act(z_t B_t)
    z-_{t,c}  = act(z~_t E_{t,c})
    Z^        = GNN(stack(z-))             (C, B, d_EMB)
    s_{t,c}   = <Z^_{t,c}, w_{t,c}> + b_{t,c}

Auxiliary logits come from independent linear heads on ``z_t``.
"""

from typing import Dict, List, Optional

from domain.gnn import GnnStack
from domain.graph import CrossTaskGraph, TaskSchema
from domain.numerics import ParamStore, Rng, Tensor, activation, concat, init
from framework.exceptions import ConfigurationException

from .encoder import Linear
from .output import TaskOutput


class CtgnnDecoder:
    def __init__(
        self,
        schema: TaskSchema,
        graph: CrossTaskGraph,
        input_dim: int,
        store: ParamStore,
        rng: Rng,
        kind: str = "gcn",
        num_layers: int = 3,
        embedding_dim: int = 512,
        bottleneck_dim: int = 32,
        heads: int = 1,
        skip: bool = True,
        shared_bottleneck: bool = False,
        task_decoder_dim: Optional[int] = None,
        activation_name: str = "relu",
        init_kind: str = "uniform_fan_in",
        aux_rng: Optional[Rng] = None,
    ):
        if graph.schema != schema or graph.num_nodes != schema.num_nodes:
            raise ConfigurationException(
                f"Graph has {graph.num_nodes} nodes for tasks {graph.schema.names}, "
                f"model schema has {schema.num_nodes} for {schema.names}",
                key="graph",
            )
        self.schema = schema
        self.graph = graph
        self.input_dim = input_dim
        self.embedding_dim = embedding_dim
        self.bottleneck_dim = bottleneck_dim
        self.shared_bottleneck = shared_bottleneck
        self.activation = activation(activation_name)
        self.decoder_dim = task_decoder_dim or input_dim

        self.task_decoders: Dict[str, Linear] = {}
        if task_decoder_dim is not None:
            for t in schema.tasks:
                self.task_decoders[t.name] = Linear(
                    f"decoder.{t.name}.task", input_dim, task_decoder_dim, store, rng, init_kind=init_kind
                )

        self.bottlenecks: Dict[str, Tensor] = {}
        if shared_bottleneck:
            shared = store.add(
                "decoder.bottleneck.weight", init(init_kind, [self.decoder_dim, bottleneck_dim], rng)
            )
            self.bottlenecks = {t.name: shared for t in schema.tasks}
        else:
            for t in schema.tasks:
                self.bottlenecks[t.name] = store.add(
                    f"decoder.{t.name}.bottleneck.weight",
                    init(init_kind, [self.decoder_dim, bottleneck_dim], rng),
                )

        # E_{t,c} for all classes of a task side by side: column block c is E_{t,c}
        self.embeddings: Dict[str, Tensor] = {
            t.name: store.add(
                f"decoder.{t.name}.embedding",
                init(init_kind, [bottleneck_dim, t.num_classes * embedding_dim], rng),
            )
            for t in schema.tasks
        }

        self.gnn = GnnStack(
            kind,
            num_layers,
            embedding_dim,
            graph,
            store,
            rng,
            heads=heads,
            skip=skip,
            activation_name=activation_name,
            init_kind=init_kind,
            prefix="decoder.gnn",
        )

        c = schema.num_nodes
        self.projection_weight = store.add(
            "decoder.projection.weight", init(init_kind, [c, embedding_dim], rng, fan_in=embedding_dim)
        )
        self.projection_bias = store.add(
            "decoder.projection.bias", init(init_kind, [c], rng, fan_in=embedding_dim)
        )

        aux_rng = aux_rng or rng
        self.aux_heads: Dict[str, Linear] = {
            t.name: Linear(f"decoder.aux.{t.name}", self.decoder_dim, t.num_classes, store, aux_rng, init_kind=init_kind)
            for t in schema.tasks
        }

    def task_features(self, x: Tensor) -> Dict[str, Tensor]:
        """``z_t`` for every task."""
        if not self.task_decoders:
            return {t.name: x for t in self.schema.tasks}
        return {name: self.activation(layer(x)) for name, layer in self.task_decoders.items()}

    def node_embeddings(self, z: Dict[str, Tensor]) -> Tensor:
        """Stacked class embeddings ``(C, B, d_EMB)`` in global node order."""
        blocks: List[Tensor] = []
        for t in self.schema.tasks:
            compressed = self.activation(z[t.name] @ self.bottlenecks[t.name])
            b = compressed.shape[0]
            per_class = self.activation(compressed @ self.embeddings[t.name])
            blocks.append(per_class.reshape(b, t.num_classes, self.embedding_dim).transpose(1, 0, 2))
        return blocks[0] if len(blocks) == 1 else concat(blocks, axis=0)

    def project(self, refined: Tensor) -> Tensor:
        """One scalar per class node: ``(C, B, d)`` -> ``(B, C)``."""
        per_sample = refined.transpose(1, 0, 2) * self.projection_weight
        return per_sample.sum(axis=2) + self.projection_bias

    def __call__(self, x: Tensor) -> TaskOutput:
        z = self.task_features(x)
        scores = self.project(self.gnn(self.node_embeddings(z)))
        logits = {t.name: scores[:, self.schema.node_slice(t.name)] for t in self.schema.tasks}
        aux = {name: head(z[name]) for name, head in self.aux_heads.items()}
        return TaskOutput(self.schema, logits, aux)

    def parameter_count(self) -> int:
        return expected_decoder_parameter_count(
            self.schema,
            self.input_dim,
            self.gnn.kind,
            self.gnn.num_layers,
            self.embedding_dim,
            self.bottleneck_dim,
            self.shared_bottleneck,
            None if not self.task_decoders else self.decoder_dim,
        )


class BaselineHeads:
    """T disjointed linear classifiers on the shared encoder output."""

    def __init__(
        self,
        schema: TaskSchema,
        input_dim: int,
        store: ParamStore,
        rng: Rng,
        init_kind: str = "uniform_fan_in",
    ):
        self.schema = schema
        self.heads: Dict[str, Linear] = {
            t.name: Linear(f"baseline.{t.name}", input_dim, t.num_classes, store, rng, init_kind=init_kind)
            for t in schema.tasks
        }

    def __call__(self, x: Tensor) -> TaskOutput:
        logits = {name: head(x) for name, head in self.heads.items()}
        return TaskOutput(self.schema, logits, logits)

    def parameter_count(self) -> int:
        return sum(Linear.parameter_count(h.d_in, h.d_out) for h in self.heads.values())


def expected_decoder_parameter_count(
    schema: TaskSchema,
    input_dim: int,
    kind: str,
    num_layers: int,
    embedding_dim: int,
    bottleneck_dim: int,
    shared_bottleneck: bool = False,
    task_decoder_dim: Optional[int] = None,
) -> int:
    """Closed-form size of a :class:`CtgnnDecoder` including its auxiliary heads."""
    sizes = schema.sizes
    decoder_dim = task_decoder_dim or input_dim
    total = 0
    if task_decoder_dim is not None:
        total += schema.num_tasks * Linear.parameter_count(input_dim, task_decoder_dim)
    total += decoder_dim * bottleneck_dim * (1 if shared_bottleneck else schema.num_tasks)
    total += sum(sizes) * bottleneck_dim * embedding_dim
    total += GnnStack.parameter_count(kind, num_layers, embedding_dim)
    total += sum(sizes) * (embedding_dim + 1)
    total += sum(Linear.parameter_count(decoder_dim, c) for c in sizes)
    return total
