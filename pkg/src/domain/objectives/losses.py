"""Per-task losses and their combination into the training objective."""

from typing import Mapping

import numpy as np

from domain.numerics import Tensor
from framework.exceptions import ConfigurationException, ContractError, DataValidationException, DimensionError

from .weights import TaskWeights


def _check_weights(weights: np.ndarray, num_classes: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (num_classes,):
        raise DimensionError("Class weights do not match the class count", shapes=[w.shape, (num_classes,)])
    return w


def multilabel_loss(logits: Tensor, targets: np.ndarray, pos_weights: np.ndarray) -> Tensor:
    """
    Weighted binary cross-entropy averaged over batch and classes:
    ``-[w_c y log sigmoid(s) + (1 - y) log sigmoid(-s)]``.
    """
    y = np.asarray(targets, dtype=np.float64)
    if y.shape != logits.shape:
        raise DimensionError("Targets do not match the logits", shapes=[y.shape, logits.shape])
    if not np.all((y == 0.0) | (y == 1.0)):
        raise DataValidationException("Multi-label targets must be 0 or 1", field="targets")
    w = _check_weights(pos_weights, logits.shape[1])
    positive = logits.log_sigmoid() * (y * w)
    negative = (-logits).log_sigmoid() * (1.0 - y)
    return -(positive + negative).mean()


def multiclass_loss(logits: Tensor, target_index: np.ndarray, class_weights: np.ndarray) -> Tensor:
    """Weighted cross-entropy ``-w[y] log softmax(s)[y]`` averaged over the batch."""
    idx = np.asarray(target_index)
    b, c = logits.shape
    if idx.shape != (b,):
        raise DimensionError("Target indices do not match the batch", shapes=[idx.shape, (b,)])
    if not np.issubdtype(idx.dtype, np.integer) or np.any(idx < 0) or np.any(idx >= c):
        raise DataValidationException(f"Class indices must lie in [0, {c})", field="targets")
    w = _check_weights(class_weights, c)
    picked = np.zeros((b, c))
    picked[np.arange(b), idx] = w[idx]
    return -(logits.log_softmax_rows() * picked).sum(axis=1).mean()


def auxiliary_combine(loss_final: Tensor, loss_aux: Tensor, omega: float) -> Tensor:
    """``omega * loss_final + (1 - omega) * loss_aux``."""
    if not 0.0 <= omega <= 1.0:
        raise ConfigurationException(f"omega must lie in [0, 1], got {omega}", key="omega")
    return Tensor.coerce(loss_final) * omega + Tensor.coerce(loss_aux) * (1.0 - omega)


def total_loss(per_task_losses: Mapping[str, Tensor], weights: TaskWeights) -> Tensor:
    """``sum_t (lambda_t * T) * L_t``."""
    if set(per_task_losses) != set(weights.raw):
        raise ContractError(
            f"Got losses for {sorted(per_task_losses)} but weights for {sorted(weights.raw)}",
            details={"losses": sorted(per_task_losses), "weights": sorted(weights.raw)},
        )
    scaled = weights.scaled
    terms = [Tensor.coerce(per_task_losses[name]) * scaled[name] for name in weights.raw]
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total
