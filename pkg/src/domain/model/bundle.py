"""Model assembly: encoder stub plus either the CT-GNN decoder or baseline heads."""

from typing import Any, Dict, Optional

from domain.graph import CrossTaskGraph, TaskSchema
from domain.numerics import ParamStore, Rng, Tensor
from framework.config.models import ModelSection
from framework.exceptions import ConfigurationException, ContractError, DimensionError
from framework.logging import get_logger

from .decoder import BaselineHeads, CtgnnDecoder
from .encoder import EncoderStub
from .output import TaskOutput

logger = get_logger("domain.model")


class ModelBundle:
    """
    Everything a run trains: the parameter store, the encoder and the head
    selected by ``config.mode``.

    Sub-modules draw their initial values from named children of the run
    seed, so a CT-GNN model and a baseline model built with the same seed
    start from the same encoder.
    """

    def __init__(
        self,
        schema: TaskSchema,
        config: ModelSection,
        input_dim: int,
        seed: int = 0,
        graph: Optional[CrossTaskGraph] = None,
    ):
        self.schema = schema
        self.config = config
        self.graph = graph
        self.seed = seed
        self.store = ParamStore()
        root = Rng(seed)

        self.encoder = EncoderStub(
            input_dim,
            config.encoder_hidden_dim,
            config.encoder_dim,
            self.store,
            root.child("encoder"),
            activation_name=config.activation,
        )
        self.decoder: Optional[CtgnnDecoder] = None
        self.baseline: Optional[BaselineHeads] = None

        if config.mode == "ctgnn":
            if graph is None:
                raise ConfigurationException("The CT-GNN model needs a cross-task graph", key="graph")
            self.decoder = CtgnnDecoder(
                schema,
                graph,
                config.encoder_dim,
                self.store,
                root.child("decoder"),
                kind=config.gnn_kind,
                num_layers=config.num_layers,
                embedding_dim=config.embedding_dim,
                bottleneck_dim=config.bottleneck_dim,
                heads=config.heads,
                skip=config.skip,
                shared_bottleneck=config.shared_bottleneck,
                task_decoder_dim=config.task_decoder_dim,
                activation_name=config.activation,
                aux_rng=root.child("aux"),
            )
        else:
            self.baseline = BaselineHeads(schema, config.encoder_dim, self.store, root.child("baseline"))

        logger.debug(
            f"Built {config.mode} model ({config.gnn_kind}) with "
            f"{self.num_parameters()} parameters over {schema.num_nodes} class nodes"
        )

    @property
    def mode(self) -> str:
        return self.config.mode

    @property
    def input_dim(self) -> int:
        return self.encoder.input_dim

    def _encode(self, features: Any) -> Tensor:
        features = Tensor.coerce(features)
        if features.ndim != 2 or features.shape[1] != self.input_dim:
            raise DimensionError(
                f"Model expects (B, {self.input_dim}) features", shapes=[features.shape, (self.input_dim,)]
            )
        return self.encoder(features)

    def forward(self, features: Any) -> TaskOutput:
        """Run the head selected by the model mode."""
        if self.decoder is not None:
            return self.decoder(self._encode(features))
        return self.forward_baseline(features)

    __call__ = forward

    def forward_baseline(self, features: Any) -> TaskOutput:
        if self.baseline is None:
            raise ContractError("forward_baseline() needs a model built in baseline mode")
        return self.baseline(self._encode(features))

    def num_parameters(self, prefix: str = "") -> int:
        return self.store.num_parameters(prefix)

    def parameter_counts(self) -> Dict[str, int]:
        """Total, encoder and head parameter counts."""
        head = "decoder." if self.decoder is not None else "baseline."
        return {
            "total": self.num_parameters(),
            "encoder": self.num_parameters("encoder."),
            "decoder": self.num_parameters(head),
        }


def build_model(
    schema: TaskSchema,
    config: ModelSection,
    input_dim: int,
    seed: int = 0,
    graph: Optional[CrossTaskGraph] = None,
) -> ModelBundle:
    if graph is not None:
        if graph.schema != schema:
            raise ConfigurationException(
                f"Graph tasks {graph.schema.names} do not match the model tasks {schema.names}",
                key="graph",
            )
    return ModelBundle(schema, config, input_dim, seed=seed, graph=graph)
