"""Deterministic pseudo-random generator for reproducible sampling.

splitmix64 with the published increment constant; reports that sample
randomly are byte-identical across runs and platforms because the stream
depends only on the 64-bit seed.
"""

from __future__ import annotations

__all__ = ["SplitMix64"]

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        # top 53 bits give a double in [0, 1)
        fraction = (self.next_uint64() >> 11) * 2.0 ** -53
        return lo + fraction * (hi - lo)
