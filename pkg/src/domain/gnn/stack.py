"""Homogeneous stack of message-passing layers with identity skip connections."""

from typing import List, Union

from domain.graph import CrossTaskGraph
from domain.numerics import ParamStore, Rng, Tensor
from framework.exceptions import DimensionError, ValidationException

from .layers import GatLayer, GcnLayer

Layer = Union[GcnLayer, GatLayer]


class GnnStack:
    """
    ``L`` layers of width ``d_EMB``. With ``skip`` set each layer's activated
    output is added to its input.

    GCN layers use the symmetrically normalized re-weighted adjacency, GAT
    layers attend over the binary adjacency.
    """

    def __init__(
        self,
        kind: str,
        num_layers: int,
        width: int,
        graph: CrossTaskGraph,
        store: ParamStore,
        rng: Rng,
        heads: int = 1,
        skip: bool = True,
        activation_name: str = "relu",
        init_kind: str = "uniform_fan_in",
        prefix: str = "gnn",
    ):
        if kind not in ("gcn", "gat"):
            raise ValidationException(f"Unknown GNN kind: {kind}", details={"kind": kind})
        self.kind = kind
        self.width = width
        self.num_nodes = graph.num_nodes
        self.skip = skip
        self.layers: List[Layer] = []
        for i in range(num_layers):
            name = f"{prefix}.{i}"
            if kind == "gcn":
                layer: Layer = GcnLayer(
                    name, width, width, graph.normalized, store, rng, activation_name, init_kind
                )
            else:
                layer = GatLayer(
                    name, width, width, heads, graph.binary, store, rng, activation_name, init_kind
                )
            self.layers.append(layer)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def __call__(self, embeddings: Tensor) -> Tensor:
        if embeddings.ndim not in (2, 3) or embeddings.shape[0] != self.num_nodes or embeddings.shape[-1] != self.width:
            raise DimensionError(
                f"GNN stack expects ({self.num_nodes}, [B,] {self.width}) node embeddings",
                shapes=[embeddings.shape, (self.num_nodes, self.width)],
            )
        h = embeddings
        for layer in self.layers:
            out = layer(h)
            h = out + h if self.skip else out
        return h

    @staticmethod
    def parameter_count(kind: str, num_layers: int, width: int) -> int:
        """GCN: L*d^2; GAT: L*(d^2 + 2d) independent of the head count."""
        per_layer = width * width if kind == "gcn" else width * width + 2 * width
        return num_layers * per_layer
