"""Counter-based random numbers.

Every draw is a pure function of ``(seed, *counters)``, so a trial's numbers do
not depend on how many other trials ran before it, in which order, or on which
worker. The mixer is the SplitMix64 finalizer applied over the key sequence.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive", "uniform", "trial_seeds"]

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _u64(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.dtype == np.uint64:
        return arr
    if arr.dtype.kind in "iu":
        return arr.astype(np.int64).view(np.uint64) if arr.dtype.kind == "i" else arr.astype(np.uint64)
    return np.asarray(int(x) & _MASK, dtype=np.uint64)


def derive(seed, *counters) -> np.ndarray:
    """64-bit key for ``seed`` and the counter path; broadcasts over array arguments."""
    with np.errstate(over="ignore"):
        h = _mix(_u64(seed) + _GOLDEN)
        for c in counters:
            h = _mix(h ^ (_u64(c) * _GOLDEN + _GOLDEN))
    return h


def uniform(seed, *counters) -> np.ndarray:
    """Uniform float in [0, 1) with 53 random bits, keyed like :func:`derive`."""
    return (derive(seed, *counters) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def trial_seeds(seed: int, start: int, stop: int) -> np.ndarray:
    """Sub-seeds for trials ``start..stop-1`` of a master seed."""
    return derive(seed, np.arange(start, stop, dtype=np.uint64))
