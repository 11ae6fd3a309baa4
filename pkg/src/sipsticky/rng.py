"""Seed handling.

Every Monte Carlo entry point takes a 64-bit seed. Replica ``j`` of a run
draws from ``PCG64(seed ^ splitmix64(j))`` so replicas never share a
stream and the whole experiment is reproducible from one integer.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step; a bijective 64-bit mix with good avalanche."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def replica_seed(seed: int, replica: int) -> int:
    return (seed ^ splitmix64(replica)) & _MASK


def generator(seed: int, replica: int = 0) -> np.random.Generator:
    """Fresh PCG64 generator for one replica."""
    return np.random.Generator(np.random.PCG64(replica_seed(seed, replica)))
