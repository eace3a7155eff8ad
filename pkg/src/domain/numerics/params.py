"""Named parameter storage and initializers."""

import math
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from framework.exceptions import ContractError, SchemaMismatchError, ValidationException

from .rng import Rng
from .tensor import Tensor

INIT_KINDS = ("uniform_fan_in", "zeros", "ones")


def init(
    kind: str,
    shape: Sequence[int],
    rng: Optional[Rng] = None,
    fan_in: Optional[int] = None,
) -> Tensor:
    """
    Create a trainable tensor.

    ``uniform_fan_in`` draws from U(-1/sqrt(fan_in), +1/sqrt(fan_in)) with
    ``fan_in`` defaulting to ``shape[0]``.
    """
    shape = tuple(int(s) for s in shape)
    if not shape:
        raise ContractError("init() needs a non-empty shape")
    if any(s <= 0 for s in shape):
        raise ContractError(f"init() shape has a zero-sized dimension: {shape}", details={"shape": list(shape)})

    if kind == "zeros":
        data = np.zeros(shape)
    elif kind == "ones":
        data = np.ones(shape)
    elif kind == "uniform_fan_in":
        if rng is None:
            raise ContractError("uniform_fan_in initialization needs an Rng")
        bound = 1.0 / math.sqrt(fan_in or shape[0])
        data = rng.uniform(-bound, bound, shape)
    else:
        raise ValidationException(f"Unknown init kind: {kind}", details={"kind": kind})
    return Tensor(data, requires_grad=True)


class ParamStore:
    """Insertion-ordered map of parameter name to leaf tensor."""

    def __init__(self):
        self._params: Dict[str, Tensor] = {}

    def add(self, name: str, tensor: Tensor) -> Tensor:
        if name in self._params:
            raise ValidationException(f"Duplicate parameter name: {name}", details={"name": name})
        tensor.requires_grad = True
        self._params[name] = tensor
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def names(self) -> List[str]:
        return list(self._params)

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._params.items())

    def with_prefix(self, prefix: str) -> List[Tuple[str, Tensor]]:
        return [(n, t) for n, t in self._params.items() if n.startswith(prefix)]

    def zero_grad(self) -> None:
        for tensor in self._params.values():
            tensor.grad = None

    def num_parameters(self, prefix: str = "") -> int:
        return sum(t.size for n, t in self._params.items() if n.startswith(prefix))

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        missing = set(self._params) - set(state)
        unexpected = set(state) - set(self._params)
        if missing or unexpected:
            raise SchemaMismatchError(
                "Parameter names do not match the model",
                expected=sorted(missing),
                actual=sorted(unexpected),
            )
        for name, tensor in self._params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != tensor.shape:
                raise SchemaMismatchError(
                    f"Parameter {name} has shape {value.shape}, model expects {tensor.shape}",
                    expected=list(tensor.shape),
                    actual=list(value.shape),
                )
            tensor.data = value.copy()
            tensor.grad = None

    def norms(self) -> Dict[str, float]:
        return {name: float(np.linalg.norm(t.data)) for name, t in self._params.items()}
