"""Dense float64 tensors with a reverse-mode gradient tape.

Each operation returns a new ``Tensor`` remembering its parents and a closure
mapping the output gradient onto parent gradients. ``backward`` walks the tape
in reverse topological order and accumulates into the ``grad`` buffers of leaf
tensors created with ``requires_grad=True``.

Broadcasting is limited to scalar<->tensor and row<->matrix (a shape that is
a suffix of the other, ignoring leading ones).
"""

from __future__ import annotations

from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from framework.exceptions import ContractError, DimensionError, DomainError

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence]
GradFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


def _strip_leading_ones(shape: Tuple[int, ...]) -> Tuple[int, ...]:
    i = 0
    while i < len(shape) and shape[i] == 1:
        i += 1
    return shape[i:]


def _check_broadcast(a: Tuple[int, ...], b: Tuple[int, ...]) -> None:
    if a == b:
        return
    if int(np.prod(a)) == 1 or int(np.prod(b)) == 1:
        return
    sa, sb = _strip_leading_ones(a), _strip_leading_ones(b)
    short, long_ = (sa, sb) if len(sa) <= len(sb) else (sb, sa)
    if long_[len(long_) - len(short):] == short:
        return
    raise DimensionError("Shapes are not broadcast-compatible", shapes=[a, b])


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    g = grad
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


class Tensor:
    """Row-major float64 array participating in the gradient tape."""

    # numpy defers binary operators to Tensor
    __array_priority__ = 1000

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        _parents: Iterable["Tensor"] = (),
        _grad_fn: Optional[GradFn] = None,
        _op: str = "",
    ):
        if isinstance(data, Tensor):
            data = data.data
        self.data = np.array(data, dtype=np.float64, order="C")
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self._parents: Tuple[Tensor, ...] = tuple(_parents)
        self._grad_fn = _grad_fn
        self._op = _op

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self._op or 'leaf'}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return not self._parents

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def zero_grad(self) -> None:
        self.grad = None

    @staticmethod
    def coerce(value: ArrayLike) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    @staticmethod
    def _result(
        data: np.ndarray, parents: Sequence["Tensor"], grad_fn: GradFn, op: str
    ) -> "Tensor":
        needs = any(p.requires_grad for p in parents)
        return Tensor(
            data,
            requires_grad=needs,
            _parents=parents if needs else (),
            _grad_fn=grad_fn if needs else None,
            _op=op,
        )

    # ------------------------------------------------------------------ tape

    def _topological_order(self) -> List["Tensor"]:
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return order

    def backward(self) -> None:
        """Accumulate d(self)/d(leaf) into every reachable leaf's ``grad``."""
        if self.data.size != 1:
            raise ContractError(
                f"backward() needs a scalar loss, got shape {self.shape}",
                details={"shape": list(self.shape)},
            )
        if not self.requires_grad:
            return

        grads = {id(self): np.ones_like(self.data)}
        for node in reversed(self._topological_order()):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.is_leaf:
                node.grad = g.copy() if node.grad is None else node.grad + g
                continue
            assert node._grad_fn is not None
            for parent, pg in zip(node._parents, node._grad_fn(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = grads[key] + pg if key in grads else pg

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other: ArrayLike) -> "Tensor":
        other = Tensor.coerce(other)
        _check_broadcast(self.shape, other.shape)
        a_shape, b_shape = self.shape, other.shape

        def grad_fn(g: np.ndarray):
            return _unbroadcast(g, a_shape), _unbroadcast(g, b_shape)

        return Tensor._result(self.data + other.data, (self, other), grad_fn, "add")

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        return self * -1.0

    def __sub__(self, other: ArrayLike) -> "Tensor":
        return self + (-Tensor.coerce(other))

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return Tensor.coerce(other) + (-self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        other = Tensor.coerce(other)
        _check_broadcast(self.shape, other.shape)
        a, b = self.data, other.data

        def grad_fn(g: np.ndarray):
            return _unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape)

        return Tensor._result(a * b, (self, other), grad_fn, "mul")

    __rmul__ = __mul__

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        other = Tensor.coerce(other)
        if self.ndim != 2 or other.ndim != 2 or self.shape[1] != other.shape[0]:
            raise DimensionError(
                "matmul inner dimensions disagree", shapes=[self.shape, other.shape]
            )
        a, b = self.data, other.data

        def grad_fn(g: np.ndarray):
            return g @ b.T, a.T @ g

        return Tensor._result(a @ b, (self, other), grad_fn, "matmul")

    # ------------------------------------------------------------ reductions

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        shape = self.shape

        def grad_fn(g: np.ndarray):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape).copy(),)

        return Tensor._result(self.data.sum(axis=axis, keepdims=keepdims), (self,), grad_fn, "sum")

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        count = self.data.size if axis is None else self.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # ---------------------------------------------------------------- shapes

    def reshape(self, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        original = self.shape
        try:
            out = self.data.reshape(shape)
        except ValueError as exc:
            raise DimensionError("Cannot reshape", shapes=[original, shape]) from exc

        def grad_fn(g: np.ndarray):
            return (g.reshape(original),)

        return Tensor._result(out, (self,), grad_fn, "reshape")

    @property
    def T(self) -> "Tensor":
        return self.transpose()

    def transpose(self, *axes: int) -> "Tensor":
        """Permute axes (reverse them when none are given)."""
        order = tuple(axes) if axes else tuple(reversed(range(self.ndim)))
        inverse = tuple(np.argsort(order))

        def grad_fn(g: np.ndarray):
            return (g.transpose(inverse),)

        return Tensor._result(self.data.transpose(order), (self,), grad_fn, "transpose")

    def __getitem__(self, index) -> "Tensor":
        shape = self.shape

        def grad_fn(g: np.ndarray):
            full = np.zeros(shape)
            np.add.at(full, index, g)
            return (full,)

        return Tensor._result(self.data[index], (self,), grad_fn, "getitem")

    # ------------------------------------------------------------ pointwise

    def relu(self) -> "Tensor":
        x = self.data

        def grad_fn(g: np.ndarray):
            return (g * (x > 0),)

        return Tensor._result(np.maximum(x, 0.0), (self,), grad_fn, "relu")

    def leaky_relu(self, slope: float = 0.2) -> "Tensor":
        x = self.data

        def grad_fn(g: np.ndarray):
            return (g * np.where(x > 0, 1.0, slope),)

        return Tensor._result(np.where(x > 0, x, slope * x), (self,), grad_fn, "leaky_relu")

    def sigmoid(self) -> "Tensor":
        y = _stable_sigmoid(self.data)

        def grad_fn(g: np.ndarray):
            return (g * y * (1.0 - y),)

        return Tensor._result(y, (self,), grad_fn, "sigmoid")

    def log_sigmoid(self) -> "Tensor":
        x = self.data
        y = -(np.maximum(-x, 0.0) + np.log1p(np.exp(-np.abs(x))))

        def grad_fn(g: np.ndarray):
            return (g * _stable_sigmoid(-x),)

        return Tensor._result(y, (self,), grad_fn, "log_sigmoid")

    def exp(self) -> "Tensor":
        y = np.exp(self.data)

        def grad_fn(g: np.ndarray):
            return (g * y,)

        return Tensor._result(y, (self,), grad_fn, "exp")

    def log(self) -> "Tensor":
        x = self.data
        if np.any(x <= 0):
            raise DomainError(
                "log() of a non-positive value",
                details={"min": float(x.min()) if x.size else None},
            )

        def grad_fn(g: np.ndarray):
            return (g / x,)

        return Tensor._result(np.log(x), (self,), grad_fn, "log")

    def softmax_rows(self) -> "Tensor":
        """Softmax along the last axis."""
        x = self.data
        shifted = np.exp(x - x.max(axis=-1, keepdims=True))
        y = shifted / shifted.sum(axis=-1, keepdims=True)

        def grad_fn(g: np.ndarray):
            return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

        return Tensor._result(y, (self,), grad_fn, "softmax_rows")

    def log_softmax_rows(self) -> "Tensor":
        """Log-softmax along the last axis via log-sum-exp."""
        x = self.data
        m = x.max(axis=-1, keepdims=True)
        lse = m + np.log(np.exp(x - m).sum(axis=-1, keepdims=True))
        y = x - lse
        soft = np.exp(y)

        def grad_fn(g: np.ndarray):
            return (g - soft * g.sum(axis=-1, keepdims=True),)

        return Tensor._result(y, (self,), grad_fn, "log_softmax_rows")


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
