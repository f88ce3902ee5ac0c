"""Classical domains: the two-valued bit domain and the jigsaw-message puzzle.

A puzzle hides one message out of a finite hypothesis class. Placing a piece
reveals one bit; what remains unknown is the set of hypotheses consistent with
the reveals, under a uniform prior.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import product
from types import MappingProxyType

from .errors import (
    AlreadyPlaced,
    IndexOutOfRange,
    InconsistentReveal,
    InconsistentState,
    ParseError,
)
from .info import ProbVector

__all__ = [
    "BitDomainSpec",
    "PuzzleState",
    "Trajectory",
    "is_bit_domain",
    "full_class",
    "periodic_class",
    "new_puzzle",
    "place_piece",
    "consistent_hypotheses",
    "posterior",
    "posterior_vector",
    "puzzle_entropy",
    "predict_message",
    "trajectory_from_reveals",
    "determinism_threshold",
    "load_puzzle",
]


@dataclass(frozen=True)
class BitDomainSpec:
    values: frozenset
    exclusive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))


def is_bit_domain(spec: BitDomainSpec) -> bool:
    """Exactly the values {0, 1}, and they must be mutually exclusive states."""
    return spec.exclusive is True and spec.values == frozenset({0, 1})


def full_class(n: int) -> tuple[str, ...]:
    """Every bit string of length ``n``, sorted."""
    if n < 1:
        raise ParseError(f"message length must be positive, got {n}")
    return tuple("".join(bits) for bits in product("01", repeat=n))


def periodic_class(n: int, max_period: int) -> tuple[str, ...]:
    """Bit strings of length ``n`` that repeat with some period ``<= max_period``."""
    if n < 1 or max_period < 1:
        raise ParseError("message length and period must be positive")
    found = set()
    for period in range(1, max_period + 1):
        for unit in product("01", repeat=period):
            found.add(("".join(unit) * (n // period + 1))[:n])
    return tuple(sorted(found))


@dataclass(frozen=True)
class PuzzleState:
    """Partial knowledge of an ``length``-bit message drawn from ``hypotheses``."""

    length: int
    revealed: Mapping[int, int]
    hypotheses: tuple[str, ...]

    def __post_init__(self):
        if self.length < 1:
            raise ParseError(f"message length must be positive, got {self.length}")
        hyps = tuple(self.hypotheses)
        if not hyps:
            raise ParseError("hypothesis class is empty")
        for h in hyps:
            if len(h) != self.length or set(h) - {"0", "1"}:
                raise ParseError(f"hypothesis {h!r} is not a {self.length}-bit string")
        revealed = {}
        for i, b in dict(self.revealed).items():
            i, b = int(i), int(b)
            if not 0 <= i < self.length:
                raise IndexOutOfRange(f"index {i} outside 0..{self.length - 1}")
            if b not in (0, 1):
                raise ParseError(f"revealed value {b} is not a bit")
            revealed[i] = b
        object.__setattr__(self, "hypotheses", hyps)
        object.__setattr__(self, "revealed", MappingProxyType(dict(sorted(revealed.items()))))

    def __hash__(self):
        return hash((self.length, tuple(self.revealed.items()), self.hypotheses))

    def __eq__(self, other):
        if not isinstance(other, PuzzleState):
            return NotImplemented
        return (self.length, dict(self.revealed), self.hypotheses) == (
            other.length,
            dict(other.revealed),
            other.hypotheses,
        )


def new_puzzle(hypotheses: Sequence[str]) -> PuzzleState:
    hyps = tuple(hypotheses)
    return PuzzleState(length=len(hyps[0]) if hyps else 0, revealed={}, hypotheses=hyps)


def _matches(h: str, revealed: Mapping[int, int]) -> bool:
    return all(h[i] == "01"[b] for i, b in revealed.items())


def consistent_hypotheses(state: PuzzleState) -> tuple[str, ...]:
    return tuple(h for h in state.hypotheses if _matches(h, state.revealed))


def _consistent_or_raise(state: PuzzleState) -> tuple[str, ...]:
    alive = consistent_hypotheses(state)
    if not alive:
        raise InconsistentState("no hypothesis agrees with the revealed bits")
    return alive


def place_piece(state: PuzzleState, index: int, bit: int) -> PuzzleState:
    if not 0 <= index < state.length:
        raise IndexOutOfRange(f"index {index} outside 0..{state.length - 1}")
    if index in state.revealed:
        raise AlreadyPlaced(f"piece {index} is already placed")
    if bit not in (0, 1):
        raise ParseError(f"piece value {bit!r} is not a bit")
    revealed = {**state.revealed, index: bit}
    if not any(_matches(h, revealed) for h in state.hypotheses):
        raise InconsistentReveal(f"no hypothesis has bit {bit} at index {index}")
    return PuzzleState(state.length, revealed, state.hypotheses)


def posterior(state: PuzzleState) -> dict[str, float]:
    """Uniform posterior over the consistent hypotheses."""
    alive = _consistent_or_raise(state)
    return {h: 1.0 / len(alive) for h in alive}


def puzzle_entropy(state: PuzzleState) -> float:
    """Bits still missing: log2 of the number of consistent hypotheses."""
    return math.log2(len(_consistent_or_raise(state)))


def predict_message(state: PuzzleState, confidence: float) -> str | None:
    """Most probable message if its posterior reaches ``confidence``.

    Ties go to the lexicographically smallest string.
    """
    if not 0 < confidence <= 1:
        raise ValueError(f"confidence must be in (0, 1], got {confidence}")
    alive = _consistent_or_raise(state)
    best = min(alive)
    return best if 1.0 / len(alive) >= confidence else None


def posterior_vector(state: PuzzleState) -> ProbVector:
    return ProbVector(tuple(posterior(state).values()))


@dataclass(frozen=True)
class Trajectory:
    """A sequence of knowledge states; ``static`` says whether the message stays fixed."""

    states: tuple[PuzzleState, ...]
    static: bool = True

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ParseError("a trajectory needs at least one state")
        for prev, cur in zip(states, states[1:]):
            if not set(prev.revealed) <= set(cur.revealed):
                raise ParseError("revealed sets must not shrink along a trajectory")
            if self.static and any(cur.revealed[i] != b for i, b in prev.revealed.items()):
                raise InconsistentState("a static message cannot change a revealed bit")
        object.__setattr__(self, "states", states)


def trajectory_from_reveals(
    start: PuzzleState, reveals: Iterable[tuple[int, int]], static: bool = True
) -> Trajectory:
    """States before and after each reveal, in order (``len(reveals) + 1`` states)."""
    states = [start]
    for index, bit in reveals:
        states.append(place_piece(states[-1], index, bit))
    return Trajectory(tuple(states), static)


def determinism_threshold(t: Trajectory, confidence: float) -> int | None:
    """Index of the earliest state from which the message stays predictable.

    None when the message is not static or prediction never settles.
    """
    if not t.static:
        return None
    threshold = None
    for i in range(len(t.states) - 1, -1, -1):
        if predict_message(t.states[i], confidence) is None:
            break
        threshold = i
    return threshold


def load_puzzle(doc: Mapping) -> tuple[Trajectory, float]:
    """Parse ``{"N", "class", "reveals", "confidence", "static"?}`` into a trajectory."""
    if not isinstance(doc, Mapping):
        raise ParseError("puzzle document must be a JSON object")
    unknown = set(doc) - {"N", "class", "reveals", "confidence", "static"}
    if unknown:
        raise ParseError(f"unexpected keys in puzzle document: {sorted(unknown)}")
    n = doc.get("N")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError('"N" must be a positive integer')
    cls = doc.get("class", "full")
    if cls == "full":
        hyps = full_class(n)
    elif isinstance(cls, Mapping) and set(cls) == {"periodic"}:
        k = cls["periodic"]
        if isinstance(k, bool) or not isinstance(k, int):
            raise ParseError('"periodic" must be an integer')
        hyps = periodic_class(n, k)
    elif isinstance(cls, list) and cls and all(isinstance(h, str) for h in cls):
        hyps = tuple(dict.fromkeys(cls))
    else:
        raise ParseError('"class" must be "full", {"periodic": k}, or a list of bit strings')
    reveals = doc.get("reveals", [])
    if not isinstance(reveals, list) or not all(
        isinstance(r, list) and len(r) == 2 and all(isinstance(v, int) for v in r) for r in reveals
    ):
        raise ParseError('"reveals" must be a list of [index, bit] pairs')
    confidence = doc.get("confidence", 0.99)
    if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
        raise ParseError('"confidence" must be a number')
    if not 0 < confidence <= 1:
        raise ParseError(f'"confidence" must be in (0, 1], got {confidence}')
    static = doc.get("static", True)
    if not isinstance(static, bool):
        raise ParseError('"static" must be a boolean')
    start = PuzzleState(n, {}, hyps)
    return trajectory_from_reveals(start, [tuple(r) for r in reveals], static), float(confidence)
