"""Deterministic RNG streams and simplex sampling.

Every source of randomness in the package is an ``numpy.random.Generator``
derived from a ``SeedSequence`` spawned off integer key tuples, so any unit of
work (episode, match, trial) can be re-seeded independently of execution
order or worker count.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

_MASK64 = (1 << 64) - 1

# Stream tags keep independent purposes from colliding on the same key tuple.
TAG_EPISODE = 1
TAG_MATCH = 2
TAG_CROSS = 3
TAG_META = 4


def rng_for(*key: int) -> np.random.Generator:
    """A fresh PCG64 generator keyed by a tuple of integers.

    Negative entries (e.g. user seeds) are mapped to their unsigned 64-bit
    representation, since ``SeedSequence`` only accepts non-negative entropy.
    """
    entropy = [int(k) & _MASK64 for k in key]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def sample_index(rng: np.random.Generator, probs: Sequence[float]) -> int:
    """Draw an index from a probability vector by inverse CDF.

    A single uniform draw per call keeps consumption of the underlying
    stream predictable; the final index absorbs any float rounding in the
    cumulative sum.
    """
    u = rng.random()
    acc = 0.0
    last = 0
    for i, p in enumerate(probs):
        acc += p
        last = i
        if u < acc:
            return i
    return last
