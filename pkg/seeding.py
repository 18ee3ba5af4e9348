"""
Random seed management for reproducibility.

Every stochastic operation takes an explicit unsigned seed. Replication seeds
are derived from a master seed with the splitmix64 finaliser:

    seed_r = splitmix64((master_seed + (r + 1) * 0x9E3779B97F4A7C15) mod 2**64)

so replications are independent of one another yet reproducible.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """64-bit mix function (splitmix64 finaliser).

    Examples:
        >>> splitmix64(0) == splitmix64(0)
        True
        >>> 0 <= splitmix64(12345) < 2**64
        True
    """
    z = (value + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for the index-th replication (or stream) under a master seed."""
    if master_seed < 0 or index < 0:
        raise ValueError(f"Seeds and indices must be unsigned, got {master_seed}, {index}")
    return splitmix64((master_seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


def make_rng(seed: int) -> np.random.Generator:
    """numpy Generator for an unsigned seed."""
    if seed < 0:
        raise ValueError(f"Seed must be unsigned, got {seed}")
    return np.random.default_rng(seed)


def fair_coin(seed: int) -> bool:
    """Deterministic fair coin: True means the first option."""
    return bool(make_rng(seed).integers(2) == 0)
