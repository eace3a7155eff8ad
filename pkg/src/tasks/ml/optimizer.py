"""SGD with heavy-ball momentum, coupled weight decay and a step schedule."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from domain.numerics import ParamStore
from framework.config.constants import DEFAULT_EPOCHS, DEFAULT_MILESTONES
from framework.exceptions import ConfigurationException, ContractError


@dataclass
class OptimizerState:
    lr: float
    momentum: float = 0.0
    weight_decay: float = 0.0
    velocity: Dict[str, np.ndarray] = field(default_factory=dict)

    def state_dict(self) -> Dict[str, Any]:
        return {
            "lr": self.lr,
            "momentum": self.momentum,
            "weight_decay": self.weight_decay,
            "velocity": {name: v.tolist() for name, v in self.velocity.items()},
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "OptimizerState":
        return cls(
            lr=float(state["lr"]),
            momentum=float(state["momentum"]),
            weight_decay=float(state["weight_decay"]),
            velocity={name: np.asarray(v, dtype=np.float64) for name, v in state["velocity"].items()},
        )


def sgd_step(store: ParamStore, state: OptimizerState) -> None:
    """
    One update of every parameter in ``store``:
    ``g' = g + wd * theta; v = mu * v + g'; theta = theta - lr * v``.
    Gradients are cleared afterwards.
    """
    missing = [name for name, p in store.items() if p.grad is None]
    if missing:
        raise ContractError(f"No gradient for {len(missing)} parameter(s): {missing[:5]}", details={"missing": missing})
    for name, param in store.items():
        g = param.grad + state.weight_decay * param.data
        v = state.velocity.get(name)
        v = g if v is None else state.momentum * v + g
        state.velocity[name] = v
        param.data = param.data - state.lr * v
    store.zero_grad()


class Schedule:
    """Learning rate multiplied by ``factor`` at every milestone epoch (0-based)."""

    def __init__(self, base_lr: float, milestones: Sequence[int] = (), factor: float = 0.01):
        milestones = [int(m) for m in milestones]
        if any(b <= a for a, b in zip(milestones, milestones[1:])):
            raise ConfigurationException(f"milestones must be strictly increasing: {milestones}", key="milestones")
        self.base_lr = base_lr
        self.milestones: List[int] = milestones
        self.factor = factor

    def lr_at(self, epoch: int) -> float:
        drops = sum(1 for m in self.milestones if epoch >= m)
        return self.base_lr * self.factor ** drops

    @classmethod
    def for_run(
        cls, base_lr: float, epochs: int, milestones: Optional[Sequence[int]] = None, factor: float = 0.01
    ) -> "Schedule":
        """Explicit milestones, or the default ones scaled to ``epochs``."""
        if milestones is None:
            scaled = sorted({int(round(m * epochs / DEFAULT_EPOCHS)) for m in DEFAULT_MILESTONES})
            milestones = [m for m in scaled if 0 < m < epochs]
        return cls(base_lr, milestones, factor)
