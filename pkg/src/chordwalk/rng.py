"""Seeded randomness for the whole package.

Every randomized routine draws from SplitMix64, a 64-bit counter-based
generator: output i is a fixed avalanche mix of ``seed + (i+1) * GAMMA``.
Because the i-th output depends only on (seed, i), sequences are
reproducible across platforms and immune to ambient entropy.

Stream splitting: independent trials derive their stream as ``seed ^ i``
for trial index i. The mix function decorrelates neighbouring seeds, so
xor-indexed streams are statistically independent for our purposes.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_seed(seed: int, index: int) -> int:
    """Seed for the index-th independent stream (trial index XOR rule)."""
    return (seed ^ index) & MASK64


class SplitMix64:
    """Stateful view over the counter sequence of one stream."""

    __slots__ = ("counter",)

    def __init__(self, seed: int):
        self.counter = seed & MASK64

    def next_u64(self) -> int:
        self.counter = (self.counter + GAMMA) & MASK64
        return mix64(self.counter)

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        # largest multiple of bound that fits in 64 bits
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def next_float(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)
