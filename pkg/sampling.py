"""
Seeded sampling with a fixed 64-bit state-advance contract.

SplitMix64: state += 0x9E3779B97F4A7C15, then
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)
all mod 2^64. Any implementation following these steps reproduces the same
sample streams, so scan tables can be regenerated from the logged seeds.
"""
import logging
from typing import Iterator, List, MutableSequence, Sequence

import numpy as np

from geometry import PointSet

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Seeded generator; every draw advances the state by exactly one step"""

    def __init__(self, seed: int):
        self._seed = seed & MASK64
        self._state = self._seed

    @property
    def seed(self) -> int:
        return self._seed

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return mix64(self._state)

    def __iter__(self) -> Iterator[int]:
        while True:
            yield self.next_u64()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection"""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        threshold = (1 << 64) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n

    def randint(self, a: int, b: int) -> int:
        """Uniform integer N with a <= N <= b"""
        return a + self.below(b - a + 1)

    def random(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits"""
        return (self.next_u64() >> 11) / float(1 << 53)

    def shuffle(self, seq: MutableSequence) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def sample_indices(self, n: int, k: int) -> List[int]:
        """k distinct indices from range(n), partial Fisher-Yates: position i swaps with i + below(n - i)"""
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} distinct values from {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def choice(self, seq: Sequence):
        return seq[self.below(len(seq))]


def derive_seed(seed: int, cell: int) -> int:
    """Independent seed for one scan cell: first output of SplitMix64(seed ^ cell)"""
    return SplitMix64((seed ^ cell) & MASK64).next_u64()


def random_subset(rng: SplitMix64, q: int, d: int, size: int) -> PointSet:
    """Uniform subset of F_q^d of the given size"""
    return PointSet.from_indices(q, d, np.asarray(rng.sample_indices(q ** d, size), dtype=np.int64))


def random_subset_any_size(rng: SplitMix64, q: int, d: int, min_size: int = 1) -> PointSet:
    """Size uniform in [min_size, q^d], then a uniform subset of that size"""
    return random_subset(rng, q, d, rng.randint(min_size, q ** d))


def random_field_subset(rng: SplitMix64, q: int, size: int) -> List[int]:
    return sorted(rng.sample_indices(q, size))


def random_function(rng: SplitMix64, n: int, scale: float = 1.0) -> List[float]:
    """n nonnegative values; about a quarter of them exact zeros"""
    return [0.0 if rng.below(4) == 0 else scale * rng.random() for _ in range(n)]
