"""GCN and GAT message passing over the cross-task graph."""

from .layers import GatLayer, GcnLayer, as_batched
from .stack import GnnStack

__all__ = ["GatLayer", "GcnLayer", "GnnStack", "as_batched"]
