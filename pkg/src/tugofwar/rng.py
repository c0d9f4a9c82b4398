"""SplitMix64 pseudo-random bits, reproducible across platforms.

The simulator needs coin tosses that are bit-identical for a given seed no
matter how episodes are batched or scheduled.  SplitMix64 (Steele, Lea &
Flood, "Fast splittable pseudorandom number generators") is a published
64-bit generator small enough to state exactly: the state advances by a
fixed odd constant and the output is a finalizing mix of the state.  Both a
scalar form and a numpy-vectorized form are provided; they produce the same
streams.

Episode ``i`` of a run seeded with ``seed`` uses the generator state
``episode_seed(seed, i)``, so results do not depend on execution order.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 output function applied to a single 64-bit integer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Scalar SplitMix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_raw(self) -> int:
        """One uniform 64-bit draw."""
        self._state = (self._state + GAMMA) & _MASK
        return mix64(self._state)

    def coin(self) -> bool:
        """Fair coin: the top bit of one uniform 64-bit draw."""
        return bool(self.next_raw() >> 63)


def episode_seed(seed: int, index: int) -> int:
    """Deterministic per-episode seed mixing ``(seed, index)``."""
    return mix64((seed & _MASK) ^ mix64((index + 1) * GAMMA))


def episode_seeds(seed: int, n: int) -> np.ndarray:
    """Vectorized ``episode_seed`` for indices ``0..n-1`` (uint64 array)."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    mixed = _mix64_vec(idx * np.uint64(GAMMA))
    return _mix64_vec(np.uint64(seed & _MASK) ^ mixed)


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def advance_and_draw(states: np.ndarray) -> np.ndarray:
    """Advance vectorized streams in place and return one draw per stream."""
    states += np.uint64(GAMMA)
    return _mix64_vec(states.copy())
