import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxdom import rng
from ctxdom.errors import (
    ChainTooLong,
    ImpossibleOutcome,
    InvalidAxis,
    InvalidDensityMatrix,
    InvalidState,
)
from ctxdom.info import shannon_entropy
from ctxdom.quantum import (
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    DensityMatrix,
    PureState,
    SpinAxis,
    aligned_probabilities,
    angle_between,
    axis_in_xz,
    born_probabilities,
    chain_distribution,
    classical_projection,
    collapse,
    context_from_axis,
    context_overlap,
    random_density_matrix,
    reset_demonstration,
    run_chain,
    sample_chains,
    step_marginals,
    von_neumann_entropy,
)

SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def spin_operator(axis):
    n = axis.vector
    return n[0] * SIGMA["x"] + n[1] * SIGMA["y"] + n[2] * SIGMA["z"]


def same_ray(u, v, tol=1e-12):
    return abs(abs(np.vdot(u, v)) - 1.0) <= tol


def tv_distance(samples, dist):
    """Total variation between the empirical sequence frequencies and an exact distribution."""
    n = len(samples)
    keys = Counter("".join("+-"[b] for b in row) for row in samples)
    return 0.5 * sum(abs(keys.get(seq, 0) / n - p) for seq, p in dist.items())


axes = st.builds(
    SpinAxis,
    st.floats(0.0, math.pi),
    st.floats(0.0, 2 * math.pi, exclude_max=True),
)


# axes and contexts


@pytest.mark.parametrize("theta, phi", [(-0.1, 0.0), (4.0, 0.0), (1.0, 7.0), (math.nan, 0.0)])
def test_invalid_axis(theta, phi):
    with pytest.raises(InvalidAxis):
        SpinAxis(theta, phi)


def test_context_rejects_non_axis():
    with pytest.raises(InvalidAxis):
        context_from_axis((0.0, 0.0))


def test_z_basis():
    ctx = context_from_axis(Z_AXIS)
    np.testing.assert_allclose(ctx.plus_state.amplitudes, [1, 0], atol=1e-15)
    # the minus vector is (0, -1): the same ray as (0, 1)
    assert same_ray(ctx.minus_state.amplitudes, [0, 1])


def test_inverted_axis():
    ctx = context_from_axis(SpinAxis(math.pi, 0.0))
    assert same_ray(ctx.plus_state.amplitudes, [0, 1])


@pytest.mark.parametrize("axis, name", [(X_AXIS, "x"), (Y_AXIS, "y"), (Z_AXIS, "z")])
def test_basis_matches_numeric_diagonalization(axis, name):
    vals, vecs = np.linalg.eigh(SIGMA[name])  # ascending: -1 then +1
    ctx = context_from_axis(axis)
    assert same_ray(ctx.plus_state.amplitudes, vecs[:, 1])
    assert same_ray(ctx.minus_state.amplitudes, vecs[:, 0])


def test_x_plus_amplitudes():
    amp = context_from_axis(X_AXIS).plus_state.amplitudes
    np.testing.assert_allclose(amp, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)


@given(axes)
def test_basis_is_eigenbasis_of_spin_operator(axis):
    ctx = context_from_axis(axis)
    s = spin_operator(axis)
    plus, minus = ctx.plus_state.amplitudes, ctx.minus_state.amplitudes
    np.testing.assert_allclose(s @ plus, plus, atol=1e-12)
    np.testing.assert_allclose(s @ minus, -minus, atol=1e-12)
    assert abs(np.vdot(plus, minus)) < 1e-12


def test_axis_in_xz():
    assert angle_between(axis_in_xz(90), X_AXIS) == pytest.approx(0.0, abs=1e-12)
    assert angle_between(axis_in_xz(-90), X_AXIS) == pytest.approx(math.pi, abs=1e-12)
    assert angle_between(axis_in_xz(0), axis_in_xz(360)) == pytest.approx(0.0, abs=1e-7)


def test_state_validation():
    with pytest.raises(InvalidState):
        PureState([1.0, 1.0])
    with pytest.raises(InvalidState):
        PureState([1.0, 0.0, 0.0])
    with pytest.raises(InvalidState):
        born_probabilities([1, 0], context_from_axis(Z_AXIS))


# Born law


@pytest.mark.parametrize(
    "deg, expected",
    [(90.0, (0.5, 0.5)), (0.0, (0.0, 1.0)), (60.0, (0.25, 0.75)), (180.0, (1.0, 0.0))],
)
def test_born_for_b_minus(deg, expected):
    b = axis_in_xz(30.0)
    c = axis_in_xz(30.0 + deg)
    probs = born_probabilities(PureState.along(b, "-"), context_from_axis(c))
    assert probs.probs == pytest.approx(expected, abs=1e-12)


@settings(max_examples=1000)
@given(axes, axes, st.sampled_from(["+", "-"]))
def test_closed_form_matches_inner_products(m, n, sign):
    probs = born_probabilities(PureState.along(m, sign), context_from_axis(n))
    expected = aligned_probabilities(sign, angle_between(m, n))
    assert probs.probs == pytest.approx(expected, abs=1e-9)


# collapse


def test_collapse_then_confirm():
    b, c = axis_in_xz(90.0), axis_in_xz(180.0)
    ctx = context_from_axis(c)
    post = collapse(PureState.along(b, "-"), ctx, "+")
    assert post.fidelity(PureState.along(c, "+")) == pytest.approx(1.0, abs=1e-12)
    assert born_probabilities(post, ctx).probs == pytest.approx((1.0, 0.0), abs=1e-12)


def test_collapse_eigenstate_fixed_point():
    z = PureState.along(Z_AXIS, "+")
    assert collapse(z, context_from_axis(Z_AXIS), "+").fidelity(z) == pytest.approx(1.0)


def test_collapse_impossible():
    with pytest.raises(ImpossibleOutcome):
        collapse(PureState.along(Z_AXIS, "+"), context_from_axis(Z_AXIS), "-")


def test_collapse_bad_outcome():
    with pytest.raises(ValueError):
        collapse(PureState.along(Z_AXIS, "+"), context_from_axis(Z_AXIS), "up")


# chains


def zxz_contexts():
    return [context_from_axis(a) for a in (Z_AXIS, X_AXIS, Z_AXIS)]


def test_chain_repeats_same_context():
    ctx = context_from_axis(axis_in_xz(40.0))
    for seed in range(50):
        out = run_chain(PureState.along(X_AXIS, "+"), [ctx] * 5, seed).outcomes
        assert out == out[0] * 5


def test_chain_is_reproducible():
    a = run_chain(PureState.along(Z_AXIS, "+"), zxz_contexts(), 123)
    b = run_chain(PureState.along(Z_AXIS, "+"), zxz_contexts(), 123)
    assert a.outcomes == b.outcomes
    assert [s.probability for s in a.steps] == [s.probability for s in b.steps]


def test_chain_needs_contexts():
    with pytest.raises(InvalidState):
        run_chain(PureState.along(Z_AXIS, "+"), [], 0)


def test_distribution_single_step():
    dist = chain_distribution(PureState.along(Z_AXIS, "+"), [context_from_axis(Z_AXIS)])
    assert dist == {"+": 1.0, "-": 0.0}


def test_distribution_zxz():
    dist = chain_distribution(PureState.along(Z_AXIS, "+"), zxz_contexts())
    for seq, p in dist.items():
        expected = 0.25 if seq[0] == "+" else 0.0
        assert p == pytest.approx(expected, abs=1e-12)


def test_distribution_sixty_degrees():
    b, c = axis_in_xz(0.0), axis_in_xz(60.0)
    dist = chain_distribution(PureState.along(b, "-"), [context_from_axis(b), context_from_axis(c)])
    assert step_marginals(dist)[1] == pytest.approx((0.25, 0.75), abs=1e-12)


@settings(max_examples=40)
@given(st.lists(axes, min_size=1, max_size=6), axes)
def test_distribution_sums_to_one(chain, start):
    dist = chain_distribution(PureState.along(start), [context_from_axis(a) for a in chain])
    assert len(dist) == 2 ** len(chain)
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-9)


def test_distribution_too_long():
    with pytest.raises(ChainTooLong):
        chain_distribution(PureState.along(Z_AXIS), [context_from_axis(Z_AXIS)] * 21)


def test_sample_chains_matches_run_chain():
    gen = np.random.default_rng(5)
    contexts = [context_from_axis(axis_in_xz(d)) for d in gen.uniform(-180, 180, size=4)]
    initial = PureState.along(Y_AXIS, "-")
    block = sample_chains(initial, contexts, 300, seed=99, start=17)
    for row, t in zip(block, range(17, 317)):
        rec = run_chain(initial, contexts, int(rng.trial_seeds(99, t, t + 1)[0]))
        assert "".join("+-"[b] for b in row) == rec.outcomes


def test_sample_chains_split_invariance():
    contexts = zxz_contexts()
    whole = sample_chains(PureState.along(Z_AXIS), contexts, 1000, seed=3)
    parts = [sample_chains(PureState.along(Z_AXIS), contexts, 250, seed=3, start=s) for s in range(0, 1000, 250)]
    assert np.array_equal(whole, np.vstack(parts))


def test_zxz_monte_carlo():
    samples = sample_chains(PureState.along(Z_AXIS, "+"), zxz_contexts(), 100_000, seed=42)
    assert (samples[:, 0] == 0).all()
    assert samples[:, 2].mean() == pytest.approx(0.5, abs=0.01)


def test_sampling_matches_exact_distribution():
    gen = np.random.default_rng(11)
    for _ in range(5):
        k = int(gen.integers(1, 5))
        contexts = [context_from_axis(SpinAxis(gen.uniform(0, math.pi), gen.uniform(0, 2 * math.pi))) for _ in range(k)]
        initial = PureState.along(SpinAxis(gen.uniform(0, math.pi), 0.0))
        samples = sample_chains(initial, contexts, 50_000, seed=int(gen.integers(1 << 31)))
        assert tv_distance(samples, chain_distribution(initial, contexts)) < 0.01


# context overlap


@pytest.mark.parametrize(
    "deg, expected",
    [(0.0, 1.0), (90.0, 0.0), (180.0, 1.0), (60.0, 0.18872187554086717), (120.0, 0.18872187554086717)],
)
def test_overlap_values(deg, expected):
    assert context_overlap(Z_AXIS, axis_in_xz(deg)) == pytest.approx(expected, abs=1e-12)


@given(axes, axes)
def test_overlap_symmetric_and_bounded(m, n):
    v = context_overlap(m, n)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(context_overlap(n, m), abs=1e-12)


def test_overlap_rejects_non_axis():
    with pytest.raises(InvalidAxis):
        context_overlap(Z_AXIS, "x")


# reset demonstration


def test_reset_default():
    r = reset_demonstration()
    assert r.same_axis
    assert r.third_given_first == pytest.approx((0.5, 0.5), abs=1e-12)
    assert r.direct_overlap == pytest.approx(1.0, abs=1e-12)
    assert r.path_overlap == pytest.approx(0.0, abs=1e-12)


def test_reset_degenerate():
    r = reset_demonstration(0.0, 0.0)
    assert r.third_given_first == pytest.approx((1.0, 0.0), abs=1e-12)
    assert r.third_given_path is None


def test_reset_ninety_sixty():
    r = reset_demonstration(90.0, 60.0)
    assert not r.same_axis
    assert r.third_given_path == pytest.approx((0.25, 0.75), abs=1e-12)
    assert r.third_given_first == pytest.approx((0.5, 0.5), abs=1e-12)


# density matrices


def test_density_validation():
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.eye(2))
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.eye(3) / 3)


@given(axes)
def test_pure_state_entropy_zero(axis):
    rho = DensityMatrix.from_pure(PureState.along(axis))
    assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-7)
    assert classical_projection(rho).probs == pytest.approx((1.0, 0.0), abs=1e-12)


def test_maximally_mixed():
    rho = DensityMatrix.maximally_mixed()
    assert von_neumann_entropy(rho) == pytest.approx(1.0, abs=1e-12)
    assert classical_projection(rho).probs == pytest.approx((0.5, 0.5), abs=1e-12)


def test_diagonal_entropy():
    assert von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_entropy_against_matrix_logarithm():
    scipy_linalg = pytest.importorskip("scipy.linalg")
    gen = np.random.default_rng(2)
    for _ in range(50):
        rho = random_density_matrix(gen)
        direct = -np.trace(rho.entries @ scipy_linalg.logm(rho.entries)).real / math.log(2)
        assert von_neumann_entropy(rho) == pytest.approx(direct, abs=1e-9)


def test_entropy_basis_invariant():
    gen = np.random.default_rng(4)
    for _ in range(50):
        rho = random_density_matrix(gen)
        q, _ = np.linalg.qr(gen.normal(size=(2, 2)) + 1j * gen.normal(size=(2, 2)))
        rotated = DensityMatrix(q @ rho.entries @ q.conj().T)
        assert von_neumann_entropy(rotated) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


def test_entropy_factors_through_projection():
    gen = np.random.default_rng(0)
    for _ in range(100):
        rho = random_density_matrix(gen)
        h = von_neumann_entropy(rho)
        assert 0.0 <= h <= 1.0
        assert shannon_entropy(classical_projection(rho)) == pytest.approx(h, abs=1e-9)
