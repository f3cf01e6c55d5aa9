"""Seeded random source with per-trial stream splitting."""

from __future__ import annotations

import math

import numpy as np

# uniforms are pulled from the generator this many at a time
UNIFORM_BLOCK = 1024
_EXACT_FLOAT_INTEGERS = 2**53


class RandomSource:
    """Wrapper around a PCG64 ``numpy.random.Generator``.

    Streams derive from ``SeedSequence(seed, spawn_key=...)`` so the draw
    sequence depends only on the seed and the trial index, never on which
    worker runs the trial.
    """

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._seed = int(seed)
        self._spawn_key = tuple(spawn_key)
        sequence = np.random.SeedSequence(self._seed, spawn_key=self._spawn_key)
        self._rng = np.random.Generator(np.random.PCG64(sequence))
        self._uniforms = iter(())

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def generator(self) -> np.random.Generator:
        return self._rng

    def uniform(self) -> float:
        """Uniform real in [0, 1)."""
        try:
            return next(self._uniforms)
        except StopIteration:
            self._uniforms = iter(self._rng.random(UNIFORM_BLOCK).tolist())
            return next(self._uniforms)

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in [low, high)."""
        return int(self._rng.integers(low, high))

    def below(self, total):
        """Uniform draw in [0, total): integer for integer totals, real otherwise."""
        if total <= 0:
            raise ValueError(f"draw bound must be positive, got {total}")
        if isinstance(total, (int, np.integer)):
            total = int(total)
            if total > _EXACT_FLOAT_INTEGERS:
                return int(self._rng.integers(0, total))
            return min(int(self.uniform() * total), total - 1)
        return self.uniform() * float(total)

    def geometric(self, p: float) -> int:
        """Number of flips up to and including the first success."""
        if not 0 < p <= 1:
            raise ValueError(f"geometric success probability must lie in (0, 1], got {p}")
        if p == 1:
            return 1
        # inversion: P(k > j) = (1 - p)^j
        return 1 + int(math.log1p(-self.uniform()) / math.log1p(-p))

    def for_trial(self, trial_index: int) -> RandomSource:
        """Independent stream for one trial, derived from (seed, trial_index)."""
        return RandomSource(self._seed, self._spawn_key + (int(trial_index),))

    @classmethod
    def fresh_seed(cls) -> int:
        """Draw a random 64-bit seed from OS entropy, for replayable runs."""
        return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
