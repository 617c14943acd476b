"""Deterministic splittable randomness.

Every stochastic step in the package draws from a :class:`SeedSpec`: a master
seed plus a derivation path of integer labels. Identical ``(master_seed,
path)`` pairs always produce the identical stream; children derived with
different labels are statistically independent. The underlying generator is
numpy's counter-based Philox4x64, keyed through ``numpy.random.SeedSequence``
with the path as the spawn key, so replay is exact within this implementation
(bit-identity across languages is not a goal).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

__all__ = ["SeedSpec"]

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1


@dataclass(frozen=True)
class SeedSpec:
    """A master seed with a derivation path.

    Parameters
    ----------
    master_seed : int
        64-bit master seed.
    path : tuple of int
        Derivation labels (32-bit each), root first.
    """

    master_seed: int
    path: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 bits")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))
        for label in self.path:
            if not 0 <= label <= _MASK32:
                raise ValueError("path labels must fit in 32 bits")

    def derive(self, label: int) -> "SeedSpec":
        """Child seed for ``label``; extends the derivation path."""
        if not 0 <= int(label) <= _MASK32:
            raise ValueError("derivation label must fit in 32 bits")
        return SeedSpec(self.master_seed, self.path + (int(label),))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this spec's stream."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))
