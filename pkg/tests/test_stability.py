"""Pool-preserving transport, openness certification, and the first-order
analysis of welfare gaps under exponential tilts."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_decomposition, random_dist, random_strict_weights
from logpool import (
    NotFound,
    NotStrictlyUnanimous,
    OutcomeSpace,
    ScoreFn,
    TiltsNotCentered,
    Weights,
    analytic_unanimity_instance,
    certify_openness,
    cov,
    find_epsilon_for_unanimity,
    local_unanimity_audit,
    log_pool,
    make_decomposition,
    make_dist,
    rng_from,
    sample_at_tv_radius,
    tilt_gap_derivative,
    tilt_gap_fd,
    tilt_representation,
    transport,
    transport_decomposition,
    tv,
    uniform,
    uniform_no_gain,
    kl,
    welfare_gap,
)


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


def test_transport_moves_the_pool_exactly():
    rng = rng_from(601)
    for _ in range(60):
        m = int(rng.integers(2, 10))
        n = int(rng.integers(2, 5))
        decomp = random_decomposition(rng, m, n)
        target = random_dist(rng, decomp.space)
        moved = transport_decomposition(decomp, target)
        assert tv(moved.parent, target) == 0.0
        repooled = log_pool(list(moved.children), moved.weights)
        assert tv(repooled, target) <= 1e-10


def test_transport_with_equal_target_is_bit_exact_identity():
    rng = rng_from(602)
    decomp = random_decomposition(rng, 6, 3)
    same = decomp.parent
    for child in decomp.children:
        moved = transport(child, decomp.parent, same)
        assert np.array_equal(moved.p, child.p)


def test_transport_composes_along_a_path():
    """Transporting base→mid→target equals transporting base→target."""
    rng = rng_from(603)
    space = OutcomeSpace(7)
    child = random_dist(rng, space)
    base = random_dist(rng, space)
    mid = random_dist(rng, space)
    target = random_dist(rng, space)
    direct = transport(child, base, target)
    stepped = transport(transport(child, base, mid), mid, target)
    assert tv(direct, stepped) <= 1e-13


# ---------------------------------------------------------------------------
# Probing at a tv radius
# ---------------------------------------------------------------------------


def test_sample_at_tv_radius_hits_the_radius():
    rng = rng_from(604)
    base = random_dist(rng, OutcomeSpace(6))
    for radius in (1e-4, 1e-3, 1e-2):
        probe = sample_at_tv_radius(base, radius, rng_from(604, 1))
        assert probe is not None
        assert tv(base, probe) == pytest.approx(radius, rel=1e-9)


def test_sample_at_tv_radius_gives_up_when_radius_is_impossible():
    base = make_dist(OutcomeSpace(2), [0.5, 0.5])
    assert sample_at_tv_radius(base, 0.75, rng_from(605)) is None


# ---------------------------------------------------------------------------
# Openness certification
# ---------------------------------------------------------------------------


def test_certify_openness_on_a_strictly_unanimous_instance():
    eps = find_epsilon_for_unanimity(3)
    decomp = analytic_unanimity_instance(3, eps)
    cert = certify_openness(decomp, samples=16, seed=0)
    assert cert.radius > 0.0
    assert cert.min_gap_at_boundary > 0.0
    assert cert.samples == 16 and cert.seed == 0


def test_certify_openness_radius_weakly_decreases_with_more_samples():
    eps = find_epsilon_for_unanimity(2)
    decomp = analytic_unanimity_instance(2, eps)
    r_small = certify_openness(decomp, samples=4, seed=7).radius
    r_large = certify_openness(decomp, samples=24, seed=7).radius
    assert r_large <= r_small + 1e-15


def test_certify_openness_is_deterministic():
    eps = find_epsilon_for_unanimity(2)
    decomp = analytic_unanimity_instance(2, eps)
    a = certify_openness(decomp, samples=8, seed=3)
    b = certify_openness(decomp, samples=8, seed=3)
    assert a.radius == b.radius
    assert a.min_gap_at_boundary == b.min_gap_at_boundary


def test_certify_openness_requires_strict_unanimity():
    rng = rng_from(606)
    # generic random decompositions essentially never have all gaps positive
    for _ in range(10):
        decomp = random_decomposition(rng, 5, 3)
        from logpool import unanimity_report

        if not unanimity_report(decomp).strictly_unanimous:
            with pytest.raises(NotStrictlyUnanimous):
                certify_openness(decomp, samples=4, seed=0)
            return
    raise AssertionError("expected to find a non-unanimous random instance")


# ---------------------------------------------------------------------------
# Tilt derivatives of the welfare gap
# ---------------------------------------------------------------------------


def test_tilt_gap_derivative_is_minus_covariance_and_matches_fd():
    rng = rng_from(607)
    for _ in range(60):
        m = int(rng.integers(2, 10))
        space = OutcomeSpace(m)
        p = random_dist(rng, space)
        h = ScoreFn(space, rng.standard_normal(m))
        analytic = tilt_gap_derivative(p, h)
        assert analytic == pytest.approx(-cov(p, h.f, p.log_p), abs=1e-12)
        fd = tilt_gap_fd(p, h)
        assert fd == pytest.approx(analytic, abs=1e-6 + 1e-6 * abs(analytic))


def test_local_unanimity_audit_weighted_derivatives_cancel():
    rng = rng_from(608)
    for _ in range(30):
        m = int(rng.integers(2, 8))
        n = int(rng.integers(2, 5))
        decomp = random_decomposition(rng, m, n)
        tilts = tilt_representation(
            decomp.parent, list(decomp.children), decomp.weights
        )
        derivatives, weighted_sum = local_unanimity_audit(
            decomp.parent, tilts, decomp.weights
        )
        assert derivatives.shape == (n,)
        assert abs(weighted_sum) <= 1e-8


def test_local_unanimity_audit_rejects_unbalanced_tilts():
    rng = rng_from(609)
    space = OutcomeSpace(4)
    p = random_dist(rng, space)
    tilts = [ScoreFn(space, np.ones(4)), ScoreFn(space, np.ones(4))]
    with pytest.raises(TiltsNotCentered):
        local_unanimity_audit(p, tilts, Weights.uniform(2))


def test_uniform_no_gain_identity():
    rng = rng_from(610)
    for _ in range(40):
        m = int(rng.integers(2, 10))
        space = OutcomeSpace(m)
        r = random_dist(rng, space)
        gap = uniform_no_gain(r)
        assert gap <= 1e-12
        u = uniform(space)
        assert gap == pytest.approx(-(kl(r, u) + kl(u, r)), abs=1e-10)
    assert uniform_no_gain(uniform(OutcomeSpace(5))) == pytest.approx(0.0, abs=1e-15)


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_transported_decomposition_keeps_weights_and_count(seed):
    rng = rng_from(seed)
    m = int(rng.integers(2, 8))
    n = int(rng.integers(2, 5))
    decomp = random_decomposition(rng, m, n)
    target = random_dist(rng, decomp.space)
    moved = transport_decomposition(decomp, target)
    assert moved.n == decomp.n
    assert np.array_equal(moved.weights.beta, decomp.weights.beta)
    # each child moved by exactly the target/base ratio in log space
    for before, after in zip(decomp.children, moved.children):
        shift = after.log_p - before.log_p
        expected = target.log_p - decomp.parent.log_p
        assert np.abs((shift - expected) - (shift - expected).mean()).max() <= 1e-10
