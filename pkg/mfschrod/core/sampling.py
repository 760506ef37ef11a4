"""
core/sampling.py
Uniform sampling of the random space [-1, 1]^d.

Generator: numpy PCG64 seeded through SeedSequence(seed). PCG64 output is
defined bit-for-bit independently of platform, so a seed reproduces the
same samples everywhere. Distinct seeds give independent streams.
"""
from typing import List

import numpy as np

from ..errors import DomainError
from .fields import RandomSample


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_seeds(seed: int, count: int) -> List[int]:
    """Child seeds for derived streams (training, test, bound sets...)."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1)) for c in children]


def sample_uniform(d: int, count: int, seed: int) -> List[RandomSample]:
    if d < 1 or count < 1:
        raise DomainError(f"need d >= 1 and count >= 1, got d={d}, count={count}")
    draws = make_rng(seed).uniform(-1.0, 1.0, size=(count, d))
    return [RandomSample(row) for row in draws]
