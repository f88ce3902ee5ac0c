"""Information content: Shannon entropy, measurement laws, and the order on distributions."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDistribution
from .order import CONTENT_TOL, MeasurementMap, maximal_elements

__all__ = [
    "DIST_TOL",
    "ORDER_RTOL",
    "ProbVector",
    "ContentReport",
    "shannon_entropy",
    "binary_entropy",
    "is_monotone_measurement",
    "reflects_max",
    "bayesian_leq",
    "success_probability",
]

DIST_TOL = 1e-9
ORDER_RTOL = 1e-12


@dataclass(frozen=True)
class ProbVector:
    """A finite probability distribution. Entries sum to 1 within ``DIST_TOL``."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in np.asarray(self.probs, dtype=float).ravel())
        if not probs:
            raise InvalidDistribution("a distribution needs at least one outcome")
        for p in probs:
            if not math.isfinite(p) or p < -DIST_TOL or p > 1 + DIST_TOL:
                raise InvalidDistribution(f"probability {p!r} outside [0, 1]")
        total = math.fsum(probs)
        if abs(total - 1.0) > DIST_TOL:
            raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", tuple(min(max(p, 0.0), 1.0) for p in probs))

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)


def _as_pv(p) -> ProbVector:
    return p if isinstance(p, ProbVector) else ProbVector(tuple(p))


def shannon_entropy(p: ProbVector | Iterable[float]) -> float:
    """``-sum p_i log2 p_i`` in bits, with ``0 log 0 = 0``."""
    p = _as_pv(p)
    return 0.0 - math.fsum(x * math.log2(x) for x in p.probs if x > 0)


def binary_entropy(p: float) -> float:
    """Entropy in bits of a two-outcome distribution ``(p, 1 - p)``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidDistribution(f"probability {p!r} outside [0, 1]")
    return shannon_entropy((p, 1.0 - p))


@dataclass(frozen=True)
class ContentReport:
    monotone: bool
    max_reflecting: bool
    violations: tuple[tuple[str, str], ...] = ()


def _increasing_pairs(m: MeasurementMap) -> tuple[tuple[str, str], ...]:
    els = m.domain.elements
    return tuple(
        (els[i], els[j])
        for i, j in zip(*np.nonzero(m.domain.closure))
        if m.content[els[i]] < m.content[els[j]]
    )


def _zero_but_partial(m: MeasurementMap) -> tuple[tuple[str, str], ...]:
    top = maximal_elements(m.domain)
    return tuple(
        (x, x) for x in m.domain.elements if abs(m.content[x]) <= CONTENT_TOL and x not in top
    )


def is_monotone_measurement(m: MeasurementMap) -> ContentReport:
    """Content must not increase along the order: ``x <= y`` implies ``m(x) >= m(y)``.

    ``violations`` lists the offending ``(x, y)`` pairs.
    """
    bad = _increasing_pairs(m)
    return ContentReport(monotone=not bad, max_reflecting=not _zero_but_partial(m), violations=bad)


def reflects_max(m: MeasurementMap) -> ContentReport:
    """Every element of content 0 must be a maximal element of the domain.

    ``violations`` holds ``(x, x)`` for each zero-content element that is not maximal.
    """
    bad = _zero_but_partial(m)
    return ContentReport(monotone=not _increasing_pairs(m), max_reflecting=not bad, violations=bad)


def bayesian_leq(x: ProbVector | Iterable[float], y: ProbVector | Iterable[float]) -> bool:
    """Order on distributions: ``y`` is at least as sharply peaked as ``x``.

    Both are sorted in non-increasing order and compared by the cross products
    ``x_i * y_{i+1} <= x_{i+1} * y_i``, with a relative slack of ``ORDER_RTOL``
    so that normalization rounding does not break ties.
    """
    x, y = _as_pv(x), _as_pv(y)
    if len(x) != len(y):
        raise DimensionMismatch(f"dimensions differ: {len(x)} vs {len(y)}")
    xs = sorted(x.probs, reverse=True)
    ys = sorted(y.probs, reverse=True)
    for i in range(len(xs) - 1):
        lhs, rhs = xs[i] * ys[i + 1], xs[i + 1] * ys[i]
        if lhs > rhs + ORDER_RTOL * max(lhs, rhs):
            return False
    return True


def success_probability(p: ProbVector | Iterable[float]) -> float:
    """Chance of naming the right value with one best guess."""
    return max(_as_pv(p).probs)
