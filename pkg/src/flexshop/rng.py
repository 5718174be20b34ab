"""Deterministic 64-bit pseudo-random numbers for reproducible instance synthesis.

The stream is xoshiro256** (Blackman/Vigna) with its state seeded from a single
64-bit value through splitmix64, the seeding procedure the xoshiro authors
recommend.  Both algorithms are published and tiny, which is the point: an
instance is defined by (parameters, seed), and anyone can re-derive the exact
stream from this file alone.  Reference outputs are frozen in
``tests/data/rng_reference.json`` and compared against an independently written
C implementation of the same two algorithms.

Bounded draws use rejection sampling, never a bare modulo, so every value in
``[lo, hi]`` is exactly equally likely.  Probability draws are expressed as
integer fractions (``bernoulli(975, 1000)``) for the same reason.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once. Returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class Rng:
    """xoshiro256** stream with unbiased helpers for the generator's draws."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        state = seed
        state, self._s0 = splitmix64(state)
        state, self._s1 = splitmix64(state)
        state, self._s2 = splitmix64(state)
        state, self._s3 = splitmix64(state)

    def next_u64(self) -> int:
        result = (_rotl((self._s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (self._s1 << 17) & _MASK64
        self._s2 ^= self._s0
        self._s3 ^= self._s1
        self._s1 ^= self._s2
        self._s0 ^= self._s3
        self._s2 ^= t
        self._s3 = _rotl(self._s3, 45)
        return result

    def uniform(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi], via rejection sampling."""
        if lo > hi:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        # Largest multiple of span that fits in 64 bits; draws at or above it
        # are rejected so the surviving values cover each residue equally often.
        limit = ((1 << 64) // span) * span
        while True:
            r = self.next_u64()
            if r < limit:
                return lo + (r % span)

    def bernoulli(self, numerator: int, denominator: int) -> bool:
        """True with probability numerator/denominator."""
        if not 0 <= numerator <= denominator or denominator <= 0:
            raise ValueError(f"bad probability {numerator}/{denominator}")
        return self.uniform(0, denominator - 1) < numerator

    def sample(self, population: list[int], k: int) -> list[int]:
        """k distinct elements of population, in draw order (partial Fisher-Yates)."""
        if k > len(population):
            raise ValueError(f"cannot sample {k} from {len(population)} items")
        pool = list(population)
        for t in range(k):
            j = self.uniform(t, len(pool) - 1)
            pool[t], pool[j] = pool[j], pool[t]
        return pool[:k]

    def choice(self, population: list[int]) -> int:
        return population[self.uniform(0, len(population) - 1)]
