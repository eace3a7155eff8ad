from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import pytest

from framework.logging import setup_logging

setup_logging(environment="testing")


def max_relative_gradient_error(
    loss_fn: Callable[[], "object"], params: Sequence["object"], h: float = 1e-6
) -> float:
    """Largest relative gap between tape gradients and central differences."""
    for p in params:
        p.grad = None
    loss_fn().backward()
    analytic = [p.grad.copy() if p.grad is not None else np.zeros_like(p.data) for p in params]

    worst = 0.0
    for p, a in zip(params, analytic):
        flat = p.data.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_fn().item()
            flat[i] = orig - h
            down = loss_fn().item()
            flat[i] = orig
            numeric = (up - down) / (2 * h)
            ai = a.reshape(-1)[i]
            worst = max(worst, abs(ai - numeric) / max(abs(ai), abs(numeric), 1e-4))
    return worst


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def gradient_error():
    return max_relative_gradient_error
