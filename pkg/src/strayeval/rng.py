"""Portable seeded pseudo-random source.

Scene generation must be bit-identical across platforms and library
versions, so it cannot depend on any external generator whose stream is
not contractually frozen. This module implements splitmix64, a tiny
counter-based generator with a published reference:

    state_k = (seed + k * 0x9E3779B97F4A7C15) mod 2^64        (k = 1, 2, ...)
    z = state_k
    z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9  mod 2^64
    z = (z XOR (z >> 27)) * 0x94D049BB133111EB  mod 2^64
    output_k = z XOR (z >> 31)

Floats take the top 53 bits: u = (output >> 11) * 2^-53, uniform in [0, 1).
The scalar class and the vectorized stream produce the same sequence for
the same seed.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SplitMix64", "splitmix64_stream", "stream_floats"]

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_FLOAT = 2.0 ** -53


class SplitMix64:
    """Sequential splitmix64 over python ints."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * _TO_FLOAT

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()


def splitmix64_stream(seed: int, count: int) -> np.ndarray:
    """The first ``count`` outputs for ``seed`` as a uint64 array.

    Counter-based form of the scalar generator; uint64 arithmetic wraps,
    which is exactly the mod-2^64 the algorithm requires.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    k = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK) + k * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def stream_floats(seed: int, count: int) -> np.ndarray:
    """Vectorized uniform [0, 1) floats, matching SplitMix64.next_float."""
    return (splitmix64_stream(seed, count) >> np.uint64(11)).astype(
        np.float64
    ) * _TO_FLOAT
