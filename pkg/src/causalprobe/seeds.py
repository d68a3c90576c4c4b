"""Splittable random seeds.

A Seed is a root value plus a stream key path. Child seeds are derived by
extending the path; two seeds with different paths yield statistically
independent generators, and the derivation itself is pure, so any component
can re-derive the exact stream it needs without threading generator state
around. This is what makes branched re-simulation possible: an intervention
at step t leaves every other (step, role) stream untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

_KEY_BOUND = 2**32
_VALUE_BOUND = 2**64


@dataclass(frozen=True)
class Seed:
    value: int
    path: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not (0 <= self.value < _VALUE_BOUND):
            raise ValueError(f"seed value out of range: {self.value}")
        for k in self.path:
            if not (0 <= k < _KEY_BOUND):
                raise ValueError(f"stream key out of range: {k}")

    def child(self, *keys: int) -> "Seed":
        """Derive a child seed by appending stream keys to the path."""
        return Seed(self.value, self.path + tuple(keys))

    def generator(self) -> np.random.Generator:
        """Build a fresh generator for this seed's stream.

        Every call returns an identical, independent generator; drawing from
        one never affects another.
        """
        seq = np.random.SeedSequence(entropy=self.value, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(seq))

    def to_json(self) -> dict[str, Any]:
        return {"value": self.value, "path": list(self.path)}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Seed":
        return cls(int(data["value"]), tuple(int(k) for k in data["path"]))
