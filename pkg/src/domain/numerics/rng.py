"""Seeded, splittable random number source."""

import zlib
from typing import Any, Dict, Optional, Sequence

import numpy as np

from framework.exceptions import ValidationException


class Rng:
    """
    PCG64 generator keyed by a 64-bit seed.

    ``child(name)`` derives an independent stream from the seed and the name
    alone, so a component's initialization does not depend on what other
    components drew before it.
    """

    def __init__(self, seed: int, _sequence: Optional[np.random.SeedSequence] = None):
        if seed < 0 or seed >= 2**64:
            raise ValidationException(f"Seed must be a 64-bit non-negative integer: {seed}")
        self.seed = int(seed)
        self._sequence = _sequence or np.random.SeedSequence(self.seed)
        self.generator = np.random.Generator(np.random.PCG64(self._sequence))

    def child(self, name: str) -> "Rng":
        key = zlib.crc32(name.encode("utf-8"))
        sequence = np.random.SeedSequence(
            self._sequence.entropy, spawn_key=tuple(self._sequence.spawn_key) + (key,)
        )
        return Rng(self.seed, _sequence=sequence)

    def uniform(self, low: float, high: float, size: Sequence[int]) -> np.ndarray:
        return self.generator.uniform(low, high, size=tuple(size))

    def normal(self, loc: float = 0.0, scale: float = 1.0, size: Any = None) -> np.ndarray:
        return self.generator.normal(loc, scale, size=size)

    def random(self, size: Any = None) -> np.ndarray:
        return self.generator.random(size=size)

    def choice(self, n: int, size: Any = None, p: Optional[np.ndarray] = None) -> np.ndarray:
        return self.generator.choice(n, size=size, p=p)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def get_state(self) -> Dict[str, Any]:
        """JSON-serializable generator state."""
        state = self.generator.bit_generator.state
        return {
            "seed": self.seed,
            "spawn_key": [int(k) for k in self._sequence.spawn_key],
            "bit_generator": state["bit_generator"],
            "state": {k: int(v) for k, v in state["state"].items()},
            "has_uint32": int(state["has_uint32"]),
            "uinteger": int(state["uinteger"]),
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "Rng":
        sequence = np.random.SeedSequence(state["seed"], spawn_key=tuple(state["spawn_key"]))
        rng = cls(state["seed"], _sequence=sequence)
        rng.generator.bit_generator.state = {
            "bit_generator": state["bit_generator"],
            "state": dict(state["state"]),
            "has_uint32": state["has_uint32"],
            "uinteger": state["uinteger"],
        }
        return rng
