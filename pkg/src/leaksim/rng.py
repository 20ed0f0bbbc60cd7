"""Deterministic counter-based uniform streams.

Monte Carlo points must be reproducible under any chunking or worker
count, so every trial owns a stream derived purely from (base seed,
point index, trial index).  A splitmix64 mixer gives cheap stream
construction at arbitrary trial indices without replaying predecessors.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# 2**-53, converts the top 53 bits of a mixed word to [0, 1).
_TO_UNIT = 1.1102230246251565e-16


def mix64(value: int) -> int:
    """Finalizing 64-bit mixer (full avalanche, bijective)."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def derive_point_seed(base_seed: int, point_index: int) -> int:
    """Seed for one sweep point, independent of every other point."""
    if point_index < 0:
        raise ValueError("point_index must be non-negative")
    return mix64((base_seed + GOLDEN * (point_index + 1)) & MASK64)


def derive_trial_seed(point_seed: int, trial_index: int) -> int:
    """Seed for one trial of a point; depends only on the pair of indices."""
    if trial_index < 0:
        raise ValueError("trial_index must be non-negative")
    return mix64((point_seed + GOLDEN * (trial_index + 1)) & MASK64)


class CounterStream:
    """Splitmix64 uniform stream; the canonical per-trial randomness source.

    Exposes the same ``uniform()`` call shape as ``numpy.random.Generator``
    so either can drive the reference simulator.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def uniform(self) -> float:
        self._state = (self._state + GOLDEN) & MASK64
        return (mix64(self._state) >> 11) * _TO_UNIT
