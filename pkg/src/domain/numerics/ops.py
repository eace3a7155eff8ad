"""Functional entry points and multi-input operations on ``Tensor``."""

from typing import Callable, Dict, Sequence

import numpy as np

from framework.exceptions import DimensionError, ValidationException

from .tensor import ArrayLike, Tensor


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    return Tensor.coerce(a) @ Tensor.coerce(b)


def backward(loss: Tensor) -> None:
    loss.backward()


_UNARY: Dict[str, Callable[..., Tensor]] = {
    "relu": Tensor.relu,
    "leaky_relu": Tensor.leaky_relu,
    "sigmoid": Tensor.sigmoid,
    "softmax_rows": Tensor.softmax_rows,
    "log_softmax_rows": Tensor.log_softmax_rows,
    "log_sigmoid": Tensor.log_sigmoid,
    "exp": Tensor.exp,
    "log": Tensor.log,
}


def elementwise(op: str, *inputs: ArrayLike, **kwargs) -> Tensor:
    """Dispatch a pointwise operation by name (``add``, ``mul`` or a unary op)."""
    tensors = [Tensor.coerce(x) for x in inputs]
    if op == "add":
        return tensors[0] + tensors[1]
    if op == "mul":
        return tensors[0] * tensors[1]
    fn = _UNARY.get(op)
    if fn is None:
        raise ValidationException(f"Unknown elementwise op: {op}", details={"op": op})
    return fn(tensors[0], **kwargs)


def activation(name: str) -> Callable[[Tensor], Tensor]:
    """Nonlinearity by config name."""
    if name == "relu":
        return Tensor.relu
    if name == "leaky_relu":
        return Tensor.leaky_relu
    raise ValidationException(f"Unknown activation: {name}", details={"activation": name})


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [Tensor.coerce(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise DimensionError("Cannot concatenate", shapes=[t.shape for t in tensors]) from exc
    cuts = np.cumsum(sizes)[:-1]

    def grad_fn(g: np.ndarray):
        return tuple(np.split(g, cuts, axis=axis))

    return Tensor._result(out, tensors, grad_fn, "concat")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [Tensor.coerce(t) for t in tensors]
    shapes = {t.shape for t in tensors}
    if len(shapes) != 1:
        raise DimensionError("Cannot stack", shapes=[t.shape for t in tensors])
    out = np.stack([t.data for t in tensors], axis=axis)

    def grad_fn(g: np.ndarray):
        return tuple(np.take(g, i, axis=axis) for i in range(len(tensors)))

    return Tensor._result(out, tensors, grad_fn, "stack")


def pairwise_add(dst: Tensor, src: Tensor) -> Tensor:
    """``out[u, v, ...] = dst[u, ...] + src[v, ...]`` for per-node score tensors."""
    if dst.shape != src.shape:
        raise DimensionError("pairwise_add operands differ", shapes=[dst.shape, src.shape])
    out = dst.data[:, None, ...] + src.data[None, :, ...]

    def grad_fn(g: np.ndarray):
        return g.sum(axis=1), g.sum(axis=0)

    return Tensor._result(out, (dst, src), grad_fn, "pairwise_add")


def masked_softmax(scores: Tensor, mask: np.ndarray) -> Tensor:
    """
    Softmax over axis 1 of ``scores[u, v, ...]`` restricted to ``mask[u, v] != 0``.

    Rows whose mask is empty produce all-zero weights.
    """
    mask = np.asarray(mask) != 0
    if mask.shape != scores.shape[:2]:
        raise DimensionError("Mask does not match scores", shapes=[mask.shape, scores.shape])
    m = np.broadcast_to(mask.reshape(mask.shape + (1,) * (scores.ndim - 2)), scores.shape)
    e = scores.data
    peak = np.where(m, e, -np.inf).max(axis=1, keepdims=True)
    peak = np.where(np.isfinite(peak), peak, 0.0)
    ex = np.where(m, np.exp(np.where(m, e - peak, 0.0)), 0.0)
    den = ex.sum(axis=1, keepdims=True)
    alpha = np.divide(ex, den, out=np.zeros_like(ex), where=den > 0)

    def grad_fn(g: np.ndarray):
        return (alpha * (g - (g * alpha).sum(axis=1, keepdims=True)),)

    return Tensor._result(alpha, (scores,), grad_fn, "masked_softmax")


def attend(alpha: Tensor, values: Tensor) -> Tensor:
    """Aggregate ``values[v, b, d]`` with weights ``alpha[u, v, b]`` into ``out[u, b, d]``."""
    if alpha.ndim != 3 or values.ndim != 3 or alpha.shape[1:] != values.shape[:2]:
        raise DimensionError("attend operands disagree", shapes=[alpha.shape, values.shape])
    a, v = alpha.data, values.data
    out = np.einsum("uvb,vbd->ubd", a, v)

    def grad_fn(g: np.ndarray):
        return np.einsum("ubd,vbd->uvb", g, v), np.einsum("ubd,uvb->vbd", g, a)

    return Tensor._result(out, (alpha, values), grad_fn, "attend")


def propagate(adjacency: np.ndarray, features: Tensor) -> Tensor:
    """Fixed-weight aggregation ``out[u, ...] = sum_v adjacency[u, v] * features[v, ...]``."""
    adj = np.asarray(adjacency, dtype=np.float64)
    if adj.ndim != 2 or adj.shape[1] != features.shape[0]:
        raise DimensionError("Adjacency does not match node count", shapes=[adj.shape, features.shape])
    flat = features.data.reshape(features.shape[0], -1)
    out = (adj @ flat).reshape((adj.shape[0],) + features.shape[1:])
    rest = features.shape

    def grad_fn(g: np.ndarray):
        return ((adj.T @ g.reshape(g.shape[0], -1)).reshape(rest),)

    return Tensor._result(out, (features,), grad_fn, "propagate")
