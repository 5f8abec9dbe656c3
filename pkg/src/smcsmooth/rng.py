"""Seeded random-source plumbing shared by all algorithms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RandomSource:
    """A (seed, stream) pair identifying one reproducible draw sequence.

    Two RandomSource values with the same seed but different stream ids
    produce statistically independent sequences; identical pairs reproduce
    identical draws bit-for-bit on one platform.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh numpy Generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, offset: int) -> "RandomSource":
        """Derive an independent stream; offset must be unique per consumer."""
        return RandomSource(self.seed, self.stream * 1009 + 1 + offset)


def as_generator(rng) -> np.random.Generator:
    """Accept either a RandomSource or an already-built Generator."""
    if isinstance(rng, RandomSource):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RandomSource or numpy Generator, got {type(rng)!r}")
