"""Affine layers and the feed-forward encoder stub feeding every decoder."""

from typing import List

from domain.numerics import ParamStore, Rng, Tensor, activation, init
from framework.exceptions import DimensionError


class Linear:
    """``x @ W + b`` with ``W`` of shape ``(d_in, d_out)``."""

    def __init__(
        self,
        name: str,
        d_in: int,
        d_out: int,
        store: ParamStore,
        rng: Rng,
        bias: bool = True,
        init_kind: str = "uniform_fan_in",
    ):
        self.name = name
        self.d_in, self.d_out = d_in, d_out
        self.weight = store.add(f"{name}.weight", init(init_kind, [d_in, d_out], rng))
        self.bias = (
            store.add(f"{name}.bias", init(init_kind, [d_out], rng, fan_in=d_in)) if bias else None
        )

    def __call__(self, x: Tensor) -> Tensor:
        if x.ndim != 2 or x.shape[1] != self.d_in:
            raise DimensionError(f"{self.name} expects (B, {self.d_in}) input", shapes=[x.shape, (self.d_in,)])
        out = x @ self.weight
        return out + self.bias if self.bias is not None else out

    @staticmethod
    def parameter_count(d_in: int, d_out: int, bias: bool = True) -> int:
        return d_in * d_out + (d_out if bias else 0)


class EncoderStub:
    """
    Two activated affine layers ``d_in -> hidden -> d_ENC``.

    Stands in for an image backbone: the decoders only see its output
    ``x`` of width ``output_dim``.
    """

    def __init__(
        self,
        input_dim: int,
        hidden_dim: int,
        output_dim: int,
        store: ParamStore,
        rng: Rng,
        activation_name: str = "relu",
        init_kind: str = "uniform_fan_in",
    ):
        self.widths: List[int] = [input_dim, hidden_dim, output_dim]
        self.activation = activation(activation_name)
        self.layers = [
            Linear(f"encoder.{i}", d_in, d_out, store, rng, init_kind=init_kind)
            for i, (d_in, d_out) in enumerate(zip(self.widths, self.widths[1:]))
        ]

    @property
    def input_dim(self) -> int:
        return self.widths[0]

    @property
    def output_dim(self) -> int:
        return self.widths[-1]

    def __call__(self, features: Tensor) -> Tensor:
        features = Tensor.coerce(features)
        if features.ndim != 2 or features.shape[1] != self.input_dim:
            raise DimensionError(
                f"Encoder expects (B, {self.input_dim}) features",
                shapes=[features.shape, (self.input_dim,)],
            )
        h = features
        for layer in self.layers:
            h = self.activation(layer(h))
        return h

    def parameter_count(self) -> int:
        return sum(Linear.parameter_count(a, b) for a, b in zip(self.widths, self.widths[1:]))
