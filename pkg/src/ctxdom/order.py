"""Finite partial orders and the domain-theoretic predicates built on them.

Elements are opaque strings. A :class:`FiniteDomain` stores the full order
as a boolean closure matrix, so ``leq`` is a table lookup. Anything that
quantifies over directed subsets (``is_dcpo``, ``way_below``) enumerates
all ``2**n - 1`` nonempty subsets as bitmasks and is therefore guarded by
an element cap.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import numpy as np

from .errors import (
    CycleDetected,
    DuplicateElement,
    EmptySet,
    ParseError,
    SelfCover,
    SizeLimitExceeded,
    UnknownElement,
)

__all__ = [
    "DEFAULT_MAX_ELEMENTS",
    "CONTENT_TOL",
    "PosetSpec",
    "FiniteDomain",
    "MeasurementMap",
    "TransitivityReport",
    "enumeration_cap",
    "validate_poset",
    "poset",
    "load_poset",
    "upset",
    "downset",
    "is_directed",
    "supremum",
    "is_dcpo",
    "maximal_elements",
    "way_below",
    "way_below_matrix",
    "orthogonal",
    "approximation_transitivity_check",
]

DEFAULT_MAX_ELEMENTS = 16
CONTENT_TOL = 1e-12
# masks are int64 bit sets
_HARD_LIMIT = 62


def enumeration_cap() -> int:
    """Element cap for subset enumeration; ``CTXDOM_MAX_POSET`` overrides it."""
    raw = os.environ.get("CTXDOM_MAX_POSET")
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_ELEMENTS
    try:
        cap = int(raw)
    except ValueError:
        raise ParseError(f"CTXDOM_MAX_POSET must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ParseError(f"CTXDOM_MAX_POSET must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class PosetSpec:
    """Raw poset description: element ids and generating pairs ``(lower, upper)``."""

    elements: tuple[str, ...]
    covers: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "covers", tuple((lo, hi) for lo, hi in self.covers))


@dataclass(frozen=True, eq=False)
class FiniteDomain:
    """A validated finite poset. Build it with :func:`validate_poset`."""

    spec: PosetSpec
    closure: np.ndarray = field(repr=False)

    @cached_property
    def _index(self) -> Mapping[str, int]:
        return MappingProxyType({e: i for i, e in enumerate(self.spec.elements)})

    @property
    def elements(self) -> tuple[str, ...]:
        return self.spec.elements

    def __len__(self) -> int:
        return len(self.spec.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def index(self, x: str) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise UnknownElement(f"unknown element {x!r}") from None

    def leq(self, x: str, y: str) -> bool:
        return bool(self.closure[self.index(x), self.index(y)])

    def relation(self) -> set[tuple[str, str]]:
        els = self.elements
        return {(els[i], els[j]) for i, j in zip(*np.nonzero(self.closure))}

    @cached_property
    def _up_masks(self) -> np.ndarray:
        weights = np.int64(1) << np.arange(len(self), dtype=np.int64)
        return (self.closure.astype(np.int64) * weights[None, :]).sum(axis=1)

    @cached_property
    def _directed_table(self) -> tuple[np.ndarray, np.ndarray]:
        """All directed subsets as bitmasks, with the index of each supremum (-1 if none)."""
        n = len(self)
        masks = np.arange(1, 1 << n, dtype=np.int64)
        up = self._up_masks
        members = [((masks >> i) & 1).astype(bool) for i in range(n)]

        directed = np.ones(masks.shape, dtype=bool)
        for i in range(n):
            for j in range(i + 1, n):
                both = members[i] & members[j]
                common = (masks & up[i] & up[j]) != 0
                directed &= ~both | common
        masks = masks[directed]
        members = [m[directed] for m in members]

        everything = np.int64((1 << n) - 1)
        uppers = np.full(masks.shape, everything, dtype=np.int64)
        for i in range(n):
            uppers = np.where(members[i], uppers & up[i], uppers)
        sup = np.full(masks.shape, -1, dtype=np.int64)
        for u in range(n):
            is_upper = ((uppers >> u) & 1).astype(bool)
            least = (uppers & ~up[u]) == 0
            sup = np.where(is_upper & least, u, sup)
        return masks, sup

    @cached_property
    def _way_below(self) -> np.ndarray:
        masks, sup = self._directed_table
        has_sup = sup >= 0
        # reaches[y, S]: y below sup(S); hits[x, S]: some s in S above x
        reaches = np.zeros((len(self), masks.size), dtype=bool)
        reaches[:, has_sup] = self.closure[:, sup[has_sup]]
        hits = (masks[None, :] & self._up_masks[:, None]) != 0
        misses = (~hits).astype(np.int64) @ reaches.T.astype(np.int64)
        return misses == 0


def _check_cap(d: FiniteDomain, cap: int | None) -> None:
    limit = enumeration_cap() if cap is None else cap
    if len(d) > min(limit, _HARD_LIMIT):
        raise SizeLimitExceeded(
            f"domain has {len(d)} elements; subset enumeration is capped at {min(limit, _HARD_LIMIT)}"
        )


def validate_poset(spec: PosetSpec) -> FiniteDomain:
    """Close ``spec.covers`` reflexively and transitively and check antisymmetry."""
    els = spec.elements
    seen = set()
    for e in els:
        if not isinstance(e, str):
            raise ParseError(f"element ids must be strings, got {e!r}")
        if e in seen:
            raise DuplicateElement(f"duplicate element {e!r}")
        seen.add(e)
    index = {e: i for i, e in enumerate(els)}
    n = len(els)
    leq = np.eye(n, dtype=bool)
    for lo, hi in spec.covers:
        for e in (lo, hi):
            if e not in index:
                raise UnknownElement(f"cover ({lo!r}, {hi!r}) references unknown element {e!r}")
        if lo == hi:
            raise SelfCover(f"self-referential cover ({lo!r}, {hi!r})")
        leq[index[lo], index[hi]] = True
    for k in range(n):
        leq |= leq[:, k : k + 1] & leq[k : k + 1, :]
    both = leq & leq.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = (int(v) for v in np.argwhere(both)[0])
        raise CycleDetected(f"{els[i]!r} and {els[j]!r} are mutually related")
    leq.setflags(write=False)
    return FiniteDomain(spec=spec, closure=leq)


def poset(elements: Iterable[str], covers: Iterable[tuple[str, str]] = ()) -> FiniteDomain:
    """Shorthand for ``validate_poset(PosetSpec(...))``."""
    return validate_poset(PosetSpec(tuple(elements), tuple(covers)))


def upset(d: FiniteDomain, x: str) -> frozenset[str]:
    i = d.index(x)
    return frozenset(d.elements[j] for j in np.flatnonzero(d.closure[i]))


def downset(d: FiniteDomain, x: str) -> frozenset[str]:
    i = d.index(x)
    return frozenset(d.elements[j] for j in np.flatnonzero(d.closure[:, i]))


def _indices(d: FiniteDomain, s: Iterable[str]) -> list[int]:
    return sorted({d.index(x) for x in s})


def is_directed(d: FiniteDomain, s: Iterable[str]) -> bool:
    """Nonempty and every pair of ``s`` has an upper bound inside ``s``."""
    idx = _indices(d, s)
    if not idx:
        return False
    leq = d.closure
    return all(any(leq[a, c] and leq[b, c] for c in idx) for a in idx for b in idx)


def supremum(d: FiniteDomain, s: Iterable[str]) -> str | None:
    """Least upper bound of ``s``, or None when it has no least upper bound."""
    idx = _indices(d, s)
    if not idx:
        raise EmptySet("supremum of an empty set")
    leq = d.closure
    uppers = [u for u in range(len(d)) if all(leq[a, u] for a in idx)]
    for u in uppers:
        if all(leq[u, v] for v in uppers):
            return d.elements[u]
    return None


def is_dcpo(d: FiniteDomain, cap: int | None = None) -> bool:
    """Check by enumeration that every directed subset has a supremum."""
    _check_cap(d, cap)
    if len(d) == 0:
        return True
    _, sup = d._directed_table
    return bool((sup >= 0).all())


def maximal_elements(d: FiniteDomain) -> frozenset[str]:
    above = d.closure.sum(axis=1)
    return frozenset(d.elements[i] for i in np.flatnonzero(above == 1))


def way_below(d: FiniteDomain, x: str, y: str, cap: int | None = None) -> bool:
    """``x`` approximates ``y``: every directed set whose supremum is above ``y``
    contains an element above ``x``."""
    i, j = d.index(x), d.index(y)
    _check_cap(d, cap)
    return bool(d._way_below[i, j])


def way_below_matrix(d: FiniteDomain, cap: int | None = None) -> np.ndarray:
    """Full way-below table, rows indexed by ``x`` and columns by ``y``."""
    _check_cap(d, cap)
    if len(d) == 0:
        return np.zeros((0, 0), dtype=bool)
    return d._way_below.copy()


@dataclass(frozen=True)
class MeasurementMap:
    """Non-negative information content (bits) attached to every element of a domain."""

    domain: FiniteDomain
    content: Mapping[str, float]

    def __post_init__(self):
        values = {}
        for key, value in self.content.items():
            self.domain.index(key)
            v = float(value)
            if not math.isfinite(v) or v < 0:
                raise ParseError(f"content of {key!r} must be finite and >= 0, got {value!r}")
            values[key] = v
        missing = [e for e in self.domain.elements if e not in values]
        if missing:
            raise ParseError(f"content missing for elements {missing}")
        object.__setattr__(self, "content", MappingProxyType(values))

    def __call__(self, x: str) -> float:
        self.domain.index(x)
        return self.content[x]


def orthogonal(m: MeasurementMap, x: str, y: str) -> bool:
    """True when the content of every common upper bound of ``x`` and ``y`` is 0.

    An empty set of common upper bounds counts as orthogonal.
    """
    common = upset(m.domain, x) & upset(m.domain, y)
    return all(abs(m.content[z]) <= CONTENT_TOL for z in common)


@dataclass(frozen=True)
class TransitivityReport:
    passed: bool
    triples_checked: int
    counterexamples: tuple[tuple[str, str, str], ...] = ()


def approximation_transitivity_check(d: FiniteDomain, cap: int | None = None) -> TransitivityReport:
    """Check ``way_below(x, y) and leq(y, z) => way_below(x, z)`` over all triples."""
    wb = way_below_matrix(d, cap)
    leq = d.closure
    bad = wb[:, :, None] & leq[None, :, :] & ~wb[:, None, :]
    els = d.elements
    witnesses = tuple((els[a], els[b], els[c]) for a, b, c in np.argwhere(bad))
    return TransitivityReport(
        passed=not witnesses, triples_checked=len(d) ** 3, counterexamples=witnesses
    )


def load_poset(doc: Mapping) -> tuple[FiniteDomain, MeasurementMap | None]:
    """Parse the poset JSON document ``{"elements", "covers", "content"?}``."""
    if not isinstance(doc, Mapping):
        raise ParseError("poset document must be a JSON object")
    unknown = set(doc) - {"elements", "covers", "content"}
    if unknown:
        raise ParseError(f"unexpected keys in poset document: {sorted(unknown)}")
    elements = doc.get("elements")
    if not isinstance(elements, list):
        raise ParseError('"elements" must be a list of strings')
    covers = doc.get("covers", [])
    if not isinstance(covers, list) or not all(
        isinstance(c, list) and len(c) == 2 and all(isinstance(e, str) for e in c) for c in covers
    ):
        raise ParseError('"covers" must be a list of [lower, upper] string pairs')
    d = validate_poset(PosetSpec(tuple(elements), tuple((lo, hi) for lo, hi in covers)))
    content = doc.get("content")
    if content is None:
        return d, None
    if not isinstance(content, Mapping):
        raise ParseError('"content" must be an object mapping element ids to numbers')
    for v in content.values():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"content values must be numbers, got {v!r}")
    return d, MeasurementMap(d, dict(content))
