"""Dense tensors with reverse-mode gradients, parameter storage and seeded init."""

from .ops import (
    activation,
    attend,
    backward,
    concat,
    elementwise,
    masked_softmax,
    matmul,
    pairwise_add,
    propagate,
    stack,
)
from .params import INIT_KINDS, ParamStore, init
from .rng import Rng
from .tensor import Tensor

__all__ = [
    "INIT_KINDS",
    "ParamStore",
    "Rng",
    "Tensor",
    "activation",
    "attend",
    "backward",
    "concat",
    "elementwise",
    "init",
    "masked_softmax",
    "matmul",
    "pairwise_add",
    "propagate",
    "stack",
]
