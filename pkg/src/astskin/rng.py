"""SplitMix64: the single random source used throughout astskin.

Everything stochastic (simulator noise, shuffles, bootstrap draws, GP
subsampling) is driven by this generator so that results are reproducible
from a seed alone, independent of numpy's bit-generator versions.

Algorithm (version 1, do not change without bumping ``GENERATOR_VERSION``)::

    state  <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2**64)
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2**64)
    output <- z ^ (z >> 31)

Derived quantities:

* uniform in [0, 1): ``(output >> 11) * 2**-53``
* standard normal: Box-Muller on two consecutive uniforms ``u1, u2``,
  ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`` (the sine branch is discarded)
* integer in [0, m): ``floor(uniform * m)``
* Fisher-Yates shuffle: for ``i = n-1 .. 1`` draw ``j`` in ``[0, i]`` and swap
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "splitmix64"
GENERATOR_VERSION = 1

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1

_GAMMA = np.uint64(GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_TWO_POW_M53 = 2.0**-53


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Counter-based 64-bit generator; cheap to vectorize and to port."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be non-negative")
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self.state) + steps * _GAMMA
            out = _mix(states)
        self.state = (self.state + n * GAMMA) & MASK64
        return out

    def next_int(self) -> int:
        return int(self.next_u64(1)[0])

    def uniform(self, n: int) -> np.ndarray:
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53

    def normal(self, n: int) -> np.ndarray:
        u = self.uniform(2 * n)
        u1, u2 = u[0::2], u[1::2]
        return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)

    def integers(self, m: int, n: int) -> np.ndarray:
        """``n`` draws from ``[0, m)``."""
        if m <= 0:
            raise ValueError("m must be positive")
        idx = np.floor(self.uniform(n) * m).astype(np.int64)
        # guards the (impossible in exact arithmetic) rounding up to m
        return np.minimum(idx, m - 1)

    def permutation(self, n: int) -> np.ndarray:
        perm = np.arange(n, dtype=np.int64)
        if n < 2:
            return perm
        u = self.uniform(n - 1)
        for step, i in enumerate(range(n - 1, 0, -1)):
            j = min(int(u[step] * (i + 1)), i)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def spawn(self, n: int) -> list[int]:
        """Child seeds for independent sub-streams."""
        return [int(v) for v in self.next_u64(n)]
