"""
Message-passing layers over the cross-task class graph.

Node features are laid out as ``(C, B, d)``: one row per class node, one
column per sample in the batch. A ``(C, d)`` input is treated as a single
sample and returned in the same layout.
"""

from typing import List, Tuple

import numpy as np

from domain.numerics import (
    ParamStore,
    Rng,
    Tensor,
    activation,
    attend,
    concat,
    init,
    masked_softmax,
    pairwise_add,
    propagate,
)
from framework.config.constants import ATTENTION_SLOPE
from framework.exceptions import ConfigurationException, DimensionError


def as_batched(features: Tensor) -> Tuple[Tensor, bool]:
    if features.ndim == 2:
        c, d = features.shape
        return features.reshape(c, 1, d), True
    if features.ndim != 3:
        raise DimensionError("Node features must be (C, d) or (C, B, d)", shapes=[features.shape])
    return features, False


def _unbatch(out: Tensor, squeeze: bool) -> Tensor:
    if squeeze:
        c, _, d = out.shape
        return out.reshape(c, d)
    return out


class GcnLayer:
    """``sigma(A_hat . H . W)`` with a fixed normalized adjacency."""

    def __init__(
        self,
        name: str,
        d_in: int,
        d_out: int,
        adjacency: np.ndarray,
        store: ParamStore,
        rng: Rng,
        activation_name: str = "relu",
        init_kind: str = "uniform_fan_in",
    ):
        self.name = name
        self.d_in, self.d_out = d_in, d_out
        self.adjacency = np.asarray(adjacency, dtype=np.float64)
        self.activation = activation(activation_name)
        self.weight = store.add(f"{name}.weight", init(init_kind, [d_in, d_out], rng))

    def _check(self, x: Tensor) -> None:
        c, _, d = x.shape
        if d != self.d_in or c != self.adjacency.shape[0]:
            raise DimensionError(
                f"{self.name} expects ({self.adjacency.shape[0]}, B, {self.d_in}) input",
                shapes=[x.shape, (self.adjacency.shape[0], self.d_in)],
            )

    def __call__(self, features: Tensor) -> Tensor:
        x, squeeze = as_batched(features)
        self._check(x)
        c, b, d = x.shape
        transformed = (x.reshape(c * b, d) @ self.weight).reshape(c, b, self.d_out)
        return _unbatch(self.activation(propagate(self.adjacency, transformed)), squeeze)


class GatLayer:
    """Multi-head graph attention restricted to the binary adjacency mask; heads are concatenated."""

    def __init__(
        self,
        name: str,
        d_in: int,
        d_out: int,
        heads: int,
        mask: np.ndarray,
        store: ParamStore,
        rng: Rng,
        activation_name: str = "relu",
        init_kind: str = "uniform_fan_in",
        slope: float = ATTENTION_SLOPE,
    ):
        if heads < 1 or d_out % heads != 0:
            raise ConfigurationException(
                f"heads ({heads}) must divide the layer width ({d_out})", key="heads"
            )
        self.name = name
        self.d_in, self.d_out, self.heads = d_in, d_out, heads
        self.head_dim = d_out // heads
        self.mask = np.asarray(mask) != 0
        self.slope = slope
        self.activation = activation(activation_name)
        self.weights: List[Tensor] = []
        self.attention: List[Tensor] = []
        for h in range(heads):
            self.weights.append(
                store.add(f"{name}.head{h}.weight", init(init_kind, [d_in, self.head_dim], rng))
            )
            self.attention.append(
                store.add(
                    f"{name}.head{h}.attention",
                    init(init_kind, [2 * self.head_dim, 1], rng, fan_in=2 * self.head_dim),
                )
            )

    def _heads(self, x: Tensor):
        c, b, d = x.shape
        if d != self.d_in or c != self.mask.shape[0]:
            raise DimensionError(
                f"{self.name} expects ({self.mask.shape[0]}, B, {self.d_in}) input",
                shapes=[x.shape, (self.mask.shape[0], self.d_in)],
            )
        flat = x.reshape(c * b, d)
        dh = self.head_dim
        for weight, attention in zip(self.weights, self.attention):
            projected = flat @ weight
            target_score = (projected @ attention[:dh]).reshape(c, b)
            source_score = (projected @ attention[dh:]).reshape(c, b)
            scores = pairwise_add(target_score, source_score).leaky_relu(self.slope)
            yield masked_softmax(scores, self.mask), projected.reshape(c, b, dh)

    def __call__(self, features: Tensor) -> Tensor:
        x, squeeze = as_batched(features)
        outputs = [self.activation(attend(alpha, values)) for alpha, values in self._heads(x)]
        out = outputs[0] if len(outputs) == 1 else concat(outputs, axis=2)
        return _unbatch(out, squeeze)

    def attention_weights(self, features: Tensor) -> List[np.ndarray]:
        """Per-head attention matrices ``alpha[u, v]`` (``(C, C, B)`` for batched input)."""
        x, squeeze = as_batched(Tensor.coerce(features).detach())
        weights = [alpha.data for alpha, _ in self._heads(x)]
        return [w[:, :, 0] for w in weights] if squeeze else weights
