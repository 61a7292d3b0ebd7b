"""Deterministic seed derivation shared by the engine, couplings, and harness.

Per-trial streams are derived from a 64-bit master seed with the mix64
finalizer.  The derivation is pure integer arithmetic, so an ensemble split
across any number of workers assigns every trial the same stream.
"""

from __future__ import annotations

import numpy as np

__all__ = ["mix64", "trial_seeds", "generator"]

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF


def mix64(master_seed: int, index: int) -> int:
    """Derive the 64-bit stream seed for trial `index` under `master_seed`.

    Computes z = master_seed + GOLDEN * (index + 1) mod 2**64 and applies the
    mix64 finalizer (xor-shift / multiply avalanche).  Distinct indices give
    statistically independent streams under any fixed master seed.
    """
    z = (master_seed + _GOLDEN * (index + 1)) & _MASK
    z = (z ^ (z >> 30)) * _MIX1 & _MASK
    z = (z ^ (z >> 27)) * _MIX2 & _MASK
    return z ^ (z >> 31)


def trial_seeds(master_seed: int, indices) -> np.ndarray:
    """Vectorized mix64 over an array of trial indices, as uint64."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(master_seed & _MASK) + np.uint64(_GOLDEN) * (idx + np.uint64(1))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def generator(seed: int) -> np.random.Generator:
    """PCG64 stream for one 64-bit seed; the single RNG type used everywhere."""
    return np.random.Generator(np.random.PCG64(seed))
