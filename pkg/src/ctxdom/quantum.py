"""Spin-1/2 measurement contexts, sequential measurement chains, and entropy.

A context is the eigenbasis of spin along one spatial axis. Chains measure a
pure state in a list of contexts, collapsing to the observed eigenvector after
each step. Outcomes are written ``"+"`` (aligned) and ``"-"`` (anti-aligned).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import rng
from .errors import (
    ChainTooLong,
    ImpossibleOutcome,
    InvalidAxis,
    InvalidDensityMatrix,
    InvalidState,
)
from .info import ProbVector, binary_entropy

__all__ = [
    "STATE_TOL",
    "MAX_EXACT_CHAIN",
    "OUTCOMES",
    "SpinAxis",
    "Context",
    "PureState",
    "DensityMatrix",
    "Step",
    "OutcomeRecord",
    "ResetReport",
    "Z_AXIS",
    "X_AXIS",
    "Y_AXIS",
    "axis_in_xz",
    "angle_between",
    "context_from_axis",
    "born_probabilities",
    "aligned_probabilities",
    "collapse",
    "run_chain",
    "sample_chains",
    "transition_table",
    "chain_distribution",
    "step_marginals",
    "context_overlap",
    "reset_demonstration",
    "von_neumann_entropy",
    "classical_projection",
    "random_density_matrix",
]

STATE_TOL = 1e-12
TRACE_TOL = 1e-9
MAX_EXACT_CHAIN = 20
OUTCOMES = ("+", "-")


@dataclass(frozen=True)
class SpinAxis:
    """Direction in space: polar angle ``theta`` in [0, pi], azimuth ``phi`` in [0, 2 pi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        t, p = float(self.theta), float(self.phi)
        if not (math.isfinite(t) and math.isfinite(p)):
            raise InvalidAxis(f"non-finite axis angles ({self.theta}, {self.phi})")
        if not 0.0 <= t <= math.pi:
            raise InvalidAxis(f"polar angle {t} outside [0, pi]")
        if not 0.0 <= p < 2 * math.pi:
            raise InvalidAxis(f"azimuth {p} outside [0, 2 pi)")
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "phi", p)

    @classmethod
    def from_degrees(cls, theta: float, phi: float = 0.0) -> SpinAxis:
        return cls(math.radians(theta), math.radians(phi % 360.0))

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


Z_AXIS = SpinAxis(0.0, 0.0)
X_AXIS = SpinAxis(math.pi / 2, 0.0)
Y_AXIS = SpinAxis(math.pi / 2, math.pi / 2)


def axis_in_xz(degrees: float) -> SpinAxis:
    """Axis in the x-z plane, rotated ``degrees`` from +z toward +x (any sign)."""
    a = degrees % 360.0
    if a <= 180.0:
        return SpinAxis(math.radians(a), 0.0)
    return SpinAxis(math.radians(360.0 - a), math.pi)


def angle_between(m: SpinAxis, n: SpinAxis) -> float:
    """Angle in radians between two axes; the cosine is clamped to [-1, 1]."""
    c = float(np.dot(m.vector, n.vector))
    return math.acos(min(1.0, max(-1.0, c)))


def _check_sign(outcome: str) -> int:
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be '+' or '-', got {outcome!r}")
    return OUTCOMES.index(outcome)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape != (2,) or not np.all(np.isfinite(amp)):
            raise InvalidState("a spin-1/2 state needs two finite amplitudes")
        norm = float(np.vdot(amp, amp).real)
        if abs(norm - 1.0) > STATE_TOL:
            raise InvalidState(f"state norm {math.sqrt(norm)} is not 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def along(cls, axis: SpinAxis, outcome: str = "+") -> PureState:
        """Eigenstate of spin along ``axis`` with the given sign."""
        return context_from_axis(axis).state(outcome)

    def fidelity(self, other: PureState) -> float:
        """|<self|other>|^2, insensitive to global phase."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class Context:
    """Measurement basis of one axis: ``plus_state`` and ``minus_state``."""

    axis: SpinAxis
    plus_state: PureState = field(repr=False)
    minus_state: PureState = field(repr=False)

    def __post_init__(self):
        overlap = abs(np.vdot(self.plus_state.amplitudes, self.minus_state.amplitudes))
        if overlap > STATE_TOL:
            raise InvalidAxis(f"basis vectors overlap by {overlap}")

    def state(self, outcome: str) -> PureState:
        return (self.plus_state, self.minus_state)[_check_sign(outcome)]


def context_from_axis(axis: SpinAxis) -> Context:
    """Spin eigenbasis of ``axis``:
    ``(cos t/2, e^{i phi} sin t/2)`` and ``(sin t/2, -e^{i phi} cos t/2)``."""
    if not isinstance(axis, SpinAxis):
        raise InvalidAxis(f"expected a SpinAxis, got {axis!r}")
    c, s = math.cos(axis.theta / 2), math.sin(axis.theta / 2)
    phase = complex(math.cos(axis.phi), math.sin(axis.phi))
    return Context(
        axis=axis,
        plus_state=PureState(np.array([c, phase * s])),
        minus_state=PureState(np.array([s, -phase * c])),
    )


def born_probabilities(state: PureState, ctx: Context) -> ProbVector:
    """``(|<m+|psi>|^2, |<m-|psi>|^2)``."""
    if not isinstance(state, PureState):
        raise InvalidState(f"expected a PureState, got {state!r}")
    p_plus = float(abs(np.vdot(ctx.plus_state.amplitudes, state.amplitudes)) ** 2)
    p_minus = float(abs(np.vdot(ctx.minus_state.amplitudes, state.amplitudes)) ** 2)
    return ProbVector((p_plus, p_minus))


def aligned_probabilities(outcome: str, angle: float) -> tuple[float, float]:
    """Born probabilities for a state aligned (``"+"``) or anti-aligned (``"-"``)
    with one axis, measured along another axis ``angle`` radians away."""
    c, s = math.cos(angle / 2) ** 2, math.sin(angle / 2) ** 2
    return (c, s) if _check_sign(outcome) == 0 else (s, c)


def collapse(state: PureState, ctx: Context, outcome: str) -> PureState:
    """Post-measurement eigenstate for ``outcome``; refuses zero-probability branches."""
    k = _check_sign(outcome)
    p = born_probabilities(state, ctx)[k]
    if p <= STATE_TOL:
        raise ImpossibleOutcome(f"outcome {outcome} has probability {p:.3g} in this context")
    return ctx.state(outcome)


@dataclass(frozen=True, eq=False)
class Step:
    context: Context
    outcome: str
    probability: float
    post_state: PureState


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    seed: int
    steps: tuple[Step, ...]

    @property
    def outcomes(self) -> str:
        return "".join(s.outcome for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def _require_contexts(contexts: Sequence[Context]) -> tuple[Context, ...]:
    contexts = tuple(contexts)
    if not contexts:
        raise InvalidState("a chain needs at least one context")
    return contexts


def run_chain(initial: PureState, contexts: Sequence[Context], seed: int) -> OutcomeRecord:
    """Measure ``initial`` in each context in turn.

    Step ``k`` draws ``rng.uniform(seed, k)`` and reports ``"+"`` when the draw
    falls below the Born probability of ``"+"``.
    """
    contexts = _require_contexts(contexts)
    if not isinstance(initial, PureState):
        raise InvalidState(f"expected a PureState, got {initial!r}")
    state = initial
    steps = []
    for k, ctx in enumerate(contexts):
        probs = born_probabilities(state, ctx)
        u = float(rng.uniform(seed, k))
        outcome = "+" if u < probs[0] else "-"
        state = ctx.state(outcome)
        steps.append(Step(ctx, outcome, probs[OUTCOMES.index(outcome)], state))
    return OutcomeRecord(int(seed), tuple(steps))


def transition_table(initial: PureState, contexts: Sequence[Context]) -> np.ndarray:
    """``table[k, j]``: probability of ``"+"`` at step ``k`` given outcome ``j`` at
    step ``k - 1`` (0 for ``"+"``, 1 for ``"-"``). Row 0 uses ``initial`` in both columns."""
    contexts = _require_contexts(contexts)
    table = np.empty((len(contexts), 2))
    table[0, :] = born_probabilities(initial, contexts[0])[0]
    for k in range(1, len(contexts)):
        for j, sign in enumerate(OUTCOMES):
            table[k, j] = born_probabilities(contexts[k - 1].state(sign), contexts[k])[0]
    return table


def sample_chains(
    initial: PureState,
    contexts: Sequence[Context],
    trials: int,
    seed: int,
    start: int = 0,
) -> np.ndarray:
    """Outcome matrix for trials ``start .. start + trials - 1`` (0 = ``"+"``, 1 = ``"-"``).

    Row ``t`` equals ``run_chain(initial, contexts, rng.trial_seeds(seed, t, t + 1)[0])``.
    """
    table = transition_table(initial, contexts)
    seeds = rng.trial_seeds(seed, start, start + trials)
    out = np.empty((trials, len(table)), dtype=np.int8)
    prev = np.zeros(trials, dtype=np.intp)
    for k in range(len(table)):
        p_plus = table[k, prev]
        out[:, k] = rng.uniform(seeds, k) >= p_plus
        prev = out[:, k].astype(np.intp)
    return out


def chain_distribution(initial: PureState, contexts: Sequence[Context]) -> dict[str, float]:
    """Exact probability of every outcome sequence, multiplying Born factors
    along the collapse tree."""
    contexts = _require_contexts(contexts)
    if len(contexts) > MAX_EXACT_CHAIN:
        raise ChainTooLong(f"{len(contexts)} steps; exact enumeration stops at {MAX_EXACT_CHAIN}")
    dist = {}
    for seq in product(OUTCOMES, repeat=len(contexts)):
        p, state = 1.0, initial
        for ctx, sign in zip(contexts, seq):
            p *= born_probabilities(state, ctx)[OUTCOMES.index(sign)]
            if p == 0.0:
                break
            state = ctx.state(sign)
        dist["".join(seq)] = p
    return dist


def step_marginals(dist: dict[str, float]) -> list[tuple[float, float]]:
    """Per-step ``(P(+), P(-))`` of a sequence distribution."""
    length = len(next(iter(dist)))
    out = []
    for k in range(length):
        plus = math.fsum(p for seq, p in dist.items() if seq[k] == "+")
        minus = math.fsum(p for seq, p in dist.items() if seq[k] == "-")
        out.append((plus, minus))
    return out


def context_overlap(m: SpinAxis, n: SpinAxis) -> float:
    """How much one context's outcome tells about the other's:
    ``1 - H2(cos^2(angle / 2))``; 1 for parallel or antiparallel axes, 0 at 90 degrees."""
    for a in (m, n):
        if not isinstance(a, SpinAxis):
            raise InvalidAxis(f"expected a SpinAxis, got {a!r}")
    p = math.cos(angle_between(m, n) / 2) ** 2
    return 1.0 - binary_entropy(min(1.0, max(0.0, p)))


@dataclass(frozen=True)
class ResetReport:
    theta_ab_deg: float
    theta_bc_deg: float
    same_axis: bool
    distribution: dict[str, float]
    third_given_first: tuple[float, float]
    third_given_path: tuple[float, float] | None
    direct_overlap: float
    path_overlap: float


def reset_demonstration(theta_ab_deg: float = 90.0, theta_bc_deg: float = 90.0) -> ResetReport:
    """Three measurements a, b, c in the x-z plane starting from ``|a+>``.

    b sits ``theta_ab_deg`` from a, and c is rotated ``theta_bc_deg`` back from b,
    so equal angles put c on the same axis as a. ``third_given_path`` conditions
    on ``"+"`` then ``"-"`` (None when that path is impossible); ``path_overlap``
    is the overlap read off the third outcome's distribution given the first.
    """
    a = Z_AXIS
    b = axis_in_xz(theta_ab_deg)
    c = axis_in_xz(theta_ab_deg - theta_bc_deg)
    contexts = [context_from_axis(x) for x in (a, b, c)]
    dist = chain_distribution(PureState.along(a, "+"), contexts)

    def third_given(prefixes):
        mass = {s: math.fsum(dist[p + s] for p in prefixes) for s in OUTCOMES}
        total = mass["+"] + mass["-"]
        if total <= STATE_TOL:
            return None
        return (mass["+"] / total, mass["-"] / total)

    given_first = third_given(["++", "+-"])
    return ResetReport(
        theta_ab_deg=float(theta_ab_deg),
        theta_bc_deg=float(theta_bc_deg),
        same_axis=angle_between(a, c) <= 1e-12,
        distribution=dist,
        third_given_first=given_first,
        third_given_path=third_given(["+-"]),
        direct_overlap=context_overlap(a, c),
        path_overlap=1.0 - binary_entropy(given_first[0]),
    )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2x2 Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (2, 2) or not np.all(np.isfinite(rho)):
            raise InvalidDensityMatrix("a spin-1/2 density matrix is a finite 2x2 matrix")
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
            raise InvalidDensityMatrix("matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise InvalidDensityMatrix(f"trace {np.trace(rho).real} is not 1")
        if np.linalg.eigvalsh(rho).min() < -TRACE_TOL:
            raise InvalidDensityMatrix("matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def from_pure(cls, state: PureState) -> DensityMatrix:
        return cls(state.projector())

    @classmethod
    def maximally_mixed(cls) -> DensityMatrix:
        return cls(np.eye(2) / 2)


def random_density_matrix(gen: np.random.Generator) -> DensityMatrix:
    """Ginibre-distributed full-rank state."""
    g = gen.normal(size=(2, 2)) + 1j * gen.normal(size=(2, 2))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


def _as_density(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(np.asarray(rho))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-tr(rho log2 rho)`` in bits.

    The eigenvalues of a unit-trace 2x2 matrix are ``(1 +- sqrt(1 - 4 det)) / 2``.
    """
    m = _as_density(rho).entries
    det = float((m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real)
    r = math.sqrt(max(0.0, 1.0 - 4.0 * det))
    return 0.0 - math.fsum(lam * math.log2(lam) for lam in ((1 + r) / 2, (1 - r) / 2) if lam > 0)


def classical_projection(rho: DensityMatrix) -> ProbVector:
    """Eigenvalue spectrum of ``rho`` in descending order: the classical record
    a measurement in its eigenbasis leaves behind."""
    lam = np.linalg.eigvalsh(_as_density(rho).entries)[::-1]
    return ProbVector(tuple(np.clip(lam, 0.0, 1.0)))
