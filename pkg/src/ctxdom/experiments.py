"""Record-entropy growth under measurement policies.

Each trial measures a spin, starting from ``|z+>``, once per step under a
policy that either keeps one basis, alternates between two, or draws a fresh
random axis every step. The entropy of the ensemble of outcome prefixes is
the quantity tracked: it stays flat when the basis never changes and grows
when it does.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import (
    EmptyRecordSet,
    InsufficientData,
    InvalidPolicy,
    ParseError,
    StepOutOfRange,
)
from .info import ProbVector, binary_entropy, shannon_entropy
from .quantum import (
    OUTCOMES,
    Z_AXIS,
    Context,
    OutcomeRecord,
    PureState,
    SpinAxis,
    axis_in_xz,
    born_probabilities,
    context_from_axis,
    transition_table,
)

__all__ = [
    "FLAT_TOL",
    "Policy",
    "GrowthPoint",
    "GrowthCurve",
    "ArmVerdict",
    "SecondLawReport",
    "policy_contexts",
    "simulate_policy",
    "prefix_entropy",
    "jackknife_stderr",
    "record_entropy",
    "exact_entropies",
    "entropy_growth",
    "is_nondecreasing",
    "second_law_report",
    "load_experiment",
]

FLAT_TOL = 0.02
# outcome draws use stream 0, random axes use streams 1 and 2
_AXIS_THETA_STREAM = 1
_AXIS_PHI_STREAM = 2
_DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class Policy:
    """How the measurement basis evolves from step to step.

    ``fixed`` measures along ``axis`` every step. ``alternating`` switches
    between z and an axis ``angle_deg`` away from it in the x-z plane, starting
    with z. ``random_axis`` draws each step's axis uniformly from the sphere.
    """

    kind: str
    axis: SpinAxis = Z_AXIS
    angle_deg: float = 90.0
    initial: PureState | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("fixed", "alternating", "random_axis"):
            raise InvalidPolicy(f"unknown policy {self.kind!r}")
        if not math.isfinite(self.angle_deg):
            raise InvalidPolicy("alternating angle must be finite")

    @property
    def start(self) -> PureState:
        return self.initial if self.initial is not None else PureState.along(Z_AXIS, "+")

    @property
    def label(self) -> str:
        if self.kind == "alternating":
            return f"alternating_{self.angle_deg:g}deg"
        return self.kind


def _random_axes(seeds: np.ndarray, step: int) -> tuple[np.ndarray, np.ndarray]:
    cos_t = 1.0 - 2.0 * rng.uniform(seeds, step, _AXIS_THETA_STREAM)
    phi = 2.0 * math.pi * rng.uniform(seeds, step, _AXIS_PHI_STREAM)
    return np.arccos(np.clip(cos_t, -1.0, 1.0)), phi


def policy_contexts(policy: Policy, steps: int, trial_seed: int | None = None) -> list[Context]:
    """Contexts a single trial measures in; random-axis policies need the trial's sub-seed."""
    if steps < 1:
        raise InvalidPolicy(f"steps must be >= 1, got {steps}")
    if policy.kind == "fixed":
        return [context_from_axis(policy.axis)] * steps
    if policy.kind == "alternating":
        pair = (context_from_axis(Z_AXIS), context_from_axis(axis_in_xz(policy.angle_deg)))
        return [pair[k % 2] for k in range(steps)]
    if trial_seed is None:
        raise InvalidPolicy("random-axis contexts depend on the trial seed")
    seeds = np.asarray(trial_seed, dtype=np.uint64)
    out = []
    for k in range(steps):
        theta, phi = _random_axes(seeds, k)
        out.append(context_from_axis(SpinAxis(float(theta), float(phi))))
    return out


def _bloch(state: PureState) -> np.ndarray:
    a, b = state.amplitudes
    return np.array([2 * (a.conjugate() * b).real, 2 * (a.conjugate() * b).imag, abs(a) ** 2 - abs(b) ** 2])


def _simulate_chunk(policy: Policy, steps: int, seed: int, start: int, stop: int) -> np.ndarray:
    seeds = rng.trial_seeds(seed, start, stop)
    n = stop - start
    out = np.empty((n, steps), dtype=np.int8)
    if policy.kind != "random_axis":
        table = transition_table(policy.start, policy_contexts(policy, steps))
        prev = np.zeros(n, dtype=np.intp)
        for k in range(steps):
            out[:, k] = rng.uniform(seeds, k) >= table[k, prev]
            prev = out[:, k].astype(np.intp)
        return out
    bloch = np.broadcast_to(_bloch(policy.start), (n, 3))
    for k in range(steps):
        theta, phi = _random_axes(seeds, k)
        axis = np.stack(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1
        )
        p_plus = np.clip((1.0 + np.einsum("ij,ij->i", bloch, axis)) / 2.0, 0.0, 1.0)
        minus = rng.uniform(seeds, k) >= p_plus
        out[:, k] = minus
        bloch = np.where(minus[:, None], -axis, axis)
    return out


def simulate_policy(
    policy: Policy,
    steps: int,
    trials: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = _DEFAULT_CHUNK,
) -> np.ndarray:
    """Outcome matrix (trials x steps, 0 = ``"+"``, 1 = ``"-"``).

    Trial ``t`` only ever reads random numbers keyed by ``(seed, t)``, so the
    result is identical for any ``workers`` and ``chunk_size``.
    """
    if steps < 1 or trials < 1:
        raise InvalidPolicy(f"need steps >= 1 and trials >= 1, got {steps} and {trials}")
    bounds = [(s, min(s + chunk_size, trials)) for s in range(0, trials, chunk_size)]
    if workers <= 1 or len(bounds) == 1:
        parts = [_simulate_chunk(policy, steps, seed, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _simulate_chunk(policy, steps, seed, *ab), bounds))
    return np.concatenate(parts, axis=0)


def _prefix_counts(outcomes: np.ndarray, upto: int) -> np.ndarray:
    prefix = np.asarray(outcomes)[:, :upto]
    if upto <= 62:
        codes = prefix.astype(np.int64) @ (np.int64(1) << np.arange(upto, dtype=np.int64))
        _, counts = np.unique(codes, return_counts=True)
    else:
        _, counts = np.unique(prefix, axis=0, return_counts=True)
    return counts


def _check_upto(length: int, upto: int) -> None:
    if not 1 <= upto <= length:
        raise StepOutOfRange(f"prefix length {upto} outside 1..{length}")


def prefix_entropy(outcomes: np.ndarray, upto: int) -> float:
    """Plug-in Shannon entropy of the first ``upto`` outcomes across trials."""
    outcomes = np.asarray(outcomes)
    if outcomes.shape[0] == 0:
        raise EmptyRecordSet("no trials")
    _check_upto(outcomes.shape[1], upto)
    counts = _prefix_counts(outcomes, upto)
    return shannon_entropy(ProbVector(tuple(counts / counts.sum())))


def jackknife_stderr(outcomes: np.ndarray, upto: int) -> float:
    """Leave-one-out jackknife standard error of :func:`prefix_entropy`."""
    counts = _prefix_counts(outcomes, upto).astype(float)
    n = counts.sum()
    if n < 2:
        return 0.0

    def xlog(c):
        return np.where(c > 0, c * np.log2(np.where(c > 0, c, 1.0)), 0.0)

    total = xlog(counts).sum()
    # entropy with one sample from each cell removed
    loo = math.log2(n - 1) - (total - xlog(counts) + xlog(counts - 1)) / (n - 1)
    mean = float((counts * loo).sum() / n)
    var = (n - 1) / n * float((counts * (loo - mean) ** 2).sum())
    return math.sqrt(max(var, 0.0))


def record_entropy(records: Sequence[OutcomeRecord], upto_step: int) -> float:
    """Entropy of the empirical distribution of outcome prefixes of length ``upto_step``."""
    if not records:
        raise EmptyRecordSet("no records")
    shortest = min(len(r) for r in records)
    _check_upto(shortest, upto_step)
    counts = Counter(r.outcomes[:upto_step] for r in records)
    n = len(records)
    return shannon_entropy(ProbVector(tuple(c / n for c in counts.values())))


def exact_entropies(policy: Policy, steps: int) -> list[float] | None:
    """Closed-form record entropy after each step; None for random axes.

    The first step contributes the entropy of the initial state's Born
    distribution. Every later step starts from an eigenstate of the previous
    context, so it adds the binary entropy set by the angle between the two
    contexts: nothing for a fixed basis and ``H2(cos^2(angle / 2))`` when
    alternating.
    """
    if policy.kind == "random_axis":
        return None
    contexts = policy_contexts(policy, steps)
    first = shannon_entropy(born_probabilities(policy.start, contexts[0]))
    if policy.kind == "fixed":
        per_step = 0.0
    else:
        per_step = binary_entropy(math.cos(math.radians(policy.angle_deg) / 2) ** 2)
    return [first + k * per_step for k in range(steps)]


@dataclass(frozen=True)
class GrowthPoint:
    step: int
    entropy: float
    exact: float | None
    stderr: float


@dataclass(frozen=True)
class GrowthCurve:
    policy: Policy
    points: tuple[GrowthPoint, ...]
    trials: int
    seed: int

    @property
    def entropies(self) -> list[float]:
        return [p.entropy for p in self.points]

    @property
    def exact(self) -> list[float | None]:
        return [p.exact for p in self.points]


def entropy_growth(
    policy: Policy,
    steps: int,
    trials: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = _DEFAULT_CHUNK,
) -> GrowthCurve:
    if not isinstance(policy, Policy):
        raise InvalidPolicy(f"expected a Policy, got {policy!r}")
    outcomes = simulate_policy(policy, steps, trials, seed, workers, chunk_size)
    exact = exact_entropies(policy, steps)
    points = tuple(
        GrowthPoint(
            step=k,
            entropy=prefix_entropy(outcomes, k),
            exact=None if exact is None else exact[k - 1],
            stderr=jackknife_stderr(outcomes, k),
        )
        for k in range(1, steps + 1)
    )
    return GrowthCurve(policy, points, trials, int(seed))


def is_nondecreasing(curve: GrowthCurve, z: float = 3.0) -> bool:
    """No step loses more entropy than ``z`` combined standard errors."""
    return all(
        b.entropy - a.entropy >= -z * math.hypot(a.stderr, b.stderr) - 1e-12
        for a, b in zip(curve.points, curve.points[1:])
    )


@dataclass(frozen=True)
class ArmVerdict:
    label: str
    verdict: str
    expected: str
    max_increment: float
    mean_increment: float
    nondecreasing: bool

    @property
    def ok(self) -> bool:
        return self.verdict == self.expected and self.nondecreasing


@dataclass(frozen=True)
class SecondLawReport:
    arms: tuple[ArmVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.arms)


def _expected_verdict(policy: Policy) -> str:
    if policy.kind == "random_axis":
        return "increasing"
    if policy.kind == "fixed":
        return "flat"
    gain = binary_entropy(math.cos(math.radians(policy.angle_deg) / 2) ** 2)
    return "increasing" if gain >= FLAT_TOL else "flat"


def second_law_report(curves: Sequence[GrowthCurve]) -> SecondLawReport:
    """Classify each curve as ``flat``, ``increasing`` or ``irregular``.

    Flat: no step moves the entropy by ``FLAT_TOL`` or more. Increasing: every
    step adds at least ``FLAT_TOL``. The expected verdict follows from the
    policy: a basis that never really changes should give a flat curve.
    """
    if not curves:
        raise InsufficientData("no curves to report on")
    arms = []
    for curve in curves:
        if len(curve.points) < 2:
            raise InsufficientData(f"curve for {curve.policy.label} has fewer than 2 steps")
        inc = np.diff(curve.entropies)
        if np.max(np.abs(inc)) < FLAT_TOL:
            verdict = "flat"
        elif np.min(inc) >= FLAT_TOL:
            verdict = "increasing"
        else:
            verdict = "irregular"
        arms.append(
            ArmVerdict(
                label=curve.policy.label,
                verdict=verdict,
                expected=_expected_verdict(curve.policy),
                max_increment=float(np.max(inc)),
                mean_increment=float(np.mean(inc)),
                nondecreasing=is_nondecreasing(curve),
            )
        )
    return SecondLawReport(tuple(arms))


def parse_state(doc) -> PureState:
    """``{"axis_deg": [theta, phi], "sign": "+"}`` -> eigenstate."""
    if not isinstance(doc, Mapping) or set(doc) - {"axis_deg", "sign"}:
        raise ParseError('a state must look like {"axis_deg": [theta, phi], "sign": "+"}')
    sign = doc.get("sign", "+")
    if sign not in OUTCOMES:
        raise ParseError(f'"sign" must be "+" or "-", got {sign!r}')
    return PureState.along(parse_axis(doc.get("axis_deg")), sign)


def parse_axis(value) -> SpinAxis:
    if (
        not isinstance(value, list)
        or len(value) not in (1, 2)
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ParseError(f"axis must be [theta_deg, phi_deg], got {value!r}")
    return SpinAxis.from_degrees(*value)


def parse_policy(value) -> Policy:
    if value in ("fixed", "random_axis"):
        return Policy(value)
    if isinstance(value, Mapping) and set(value) == {"alternating_deg"}:
        angle = value["alternating_deg"]
        if isinstance(angle, bool) or not isinstance(angle, (int, float)):
            raise InvalidPolicy('"alternating_deg" must be a number')
        return Policy("alternating", angle_deg=float(angle))
    raise InvalidPolicy(f'policy must be "fixed", "random_axis" or {{"alternating_deg": x}}, got {value!r}')


def load_experiment(doc: Mapping) -> tuple[Policy, int, int, int]:
    """Parse ``{"policy", "steps", "trials", "seed", "initial"?}``."""
    if not isinstance(doc, Mapping):
        raise ParseError("experiment document must be a JSON object")
    unknown = set(doc) - {"policy", "steps", "trials", "seed", "initial"}
    if unknown:
        raise ParseError(f"unexpected keys in experiment document: {sorted(unknown)}")
    policy = parse_policy(doc.get("policy"))
    if "initial" in doc:
        policy = Policy(policy.kind, policy.axis, policy.angle_deg, parse_state(doc["initial"]))
    values = []
    for key, default in (("steps", 6), ("trials", 10000), ("seed", 0)):
        v = doc.get(key, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(f'"{key}" must be an integer')
        values.append(v)
    steps, trials, seed = values
    if steps < 1 or trials < 1:
        raise ParseError('"steps" and "trials" must be >= 1')
    return policy, steps, trials, seed
