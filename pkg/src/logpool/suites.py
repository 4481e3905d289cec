"""Named, seeded verification suites behind the ``verify`` CLI command.

Every check draws its instances through :func:`~logpool.core.rng_from` with a
path ``(seed, suite_id, check_id, instance)``, so a seed pins every number in
the run.  Checks compare library results against independent re-computations
(extended-precision pooling, closed forms, brute-force searches) and report
one extremal statistic each — a max error, a min margin, a found threshold.

These are runtime smoke batteries sized for seconds, not the exhaustive
test-suite versions; the comparisons are the same, the instance counts are
smaller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constructions, factorize, persona, stability
from .core import (
    Dist,
    OutcomeSpace,
    ScoreFn,
    Weights,
    event_indices,
    expect,
    kl,
    make_dist,
    norm_p,
    rng_from,
    tv,
    uniform,
)
from .errors import UnknownSuite
from .pooling import (
    Decomposition,
    linear_pool,
    log_pool,
    log_pool_with_log_z,
    make_decomposition,
)
from .welfare import (
    covariance_condition,
    unanimity_report,
    weighted_gap_sum,
    welfare_gap,
)

__all__ = ["CheckResult", "SUITE_NAMES", "run_suite"]

SUITE_NAMES = (
    "pools",
    "welfare",
    "constructions",
    "factorize",
    "stability",
    "persona",
)

_SUITE_ID = {name: i for i, name in enumerate(SUITE_NAMES)}


@dataclass(frozen=True, slots=True)
class CheckResult:
    """One named check: an extremal measured value against its threshold."""

    name: str
    passed: bool
    value: float
    tolerance: float
    samples: int
    detail: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "samples", int(self.samples))


# ---------------------------------------------------------------------------
# Shared instance generators
# ---------------------------------------------------------------------------

def _random_dist(rng: np.random.Generator, m: int) -> Dist:
    raw = rng.gamma(1.5, 1.0, m) + 0.02
    return make_dist(OutcomeSpace(m), raw)


def _random_strict_weights(rng: np.random.Generator, n: int) -> Weights:
    raw = 0.15 + rng.random(n)
    return Weights(raw / raw.sum())


def _random_family(
    rng: np.random.Generator, *, m_lo: int = 2, m_hi: int = 9, n_lo: int = 2, n_hi: int = 7
) -> tuple[list[Dist], Weights]:
    m = int(rng.integers(m_lo, m_hi))
    n = int(rng.integers(n_lo, n_hi))
    return [_random_dist(rng, m) for _ in range(n)], _random_strict_weights(rng, n)


def _longdouble_log_pool(agents: list[Dist], weights: Weights) -> np.ndarray:
    logs = np.stack([np.log(a.p.astype(np.longdouble)) for a in agents])
    combo = (weights.beta.astype(np.longdouble)[:, None] * logs).sum(axis=0)
    combo -= combo.max()
    w = np.exp(combo)
    return w / w.sum()


def _longdouble_log_z(agents: list[Dist], weights: Weights) -> float:
    logs = np.stack([np.log(a.p.astype(np.longdouble)) for a in agents])
    combo = (weights.beta.astype(np.longdouble)[:, None] * logs).sum(axis=0)
    shift = combo.max()
    return float(shift + np.log(np.exp(combo - shift).sum()))


def _tv_vs_longdouble(pooled: Dist, oracle: np.ndarray) -> float:
    return float(0.5 * np.abs(pooled.p.astype(np.longdouble) - oracle).sum())


def _longdouble_gap(agent: Dist, pool: Dist) -> float:
    pa = agent.p.astype(np.longdouble)
    pr = pool.p.astype(np.longdouble)
    la = np.log(pa)
    return float((pr * la).sum() - (pa * la).sum())


# ---------------------------------------------------------------------------
# pools
# ---------------------------------------------------------------------------

def _check_log_pool_extended(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 0, 0, i)
        agents, weights = _random_family(rng)
        pooled = log_pool(agents, weights)
        worst = max(worst, _tv_vs_longdouble(pooled, _longdouble_log_pool(agents, weights)))
    return CheckResult(
        name="pools.log_pool_extended_precision",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max tv between log_pool and an extended-precision recomputation",
    )


def _check_linear_pool_extended(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 0, 1, i)
        agents, weights = _random_family(rng)
        pooled = linear_pool(agents, weights)
        stackld = np.stack([a.p.astype(np.longdouble) for a in agents])
        oracle = (weights.beta.astype(np.longdouble)[:, None] * stackld).sum(axis=0)
        oracle = oracle / oracle.sum()
        worst = max(worst, _tv_vs_longdouble(pooled, oracle))
    return CheckResult(
        name="pools.linear_pool_extended_precision",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max tv between linear_pool and an extended-precision recomputation",
    )


def _check_pool_weight_edges(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 0, 2, i)
        agents, weights = _random_family(rng, n_lo=3)
        n = weights.n
        # a one-hot weight vector must return that agent
        j = int(rng.integers(0, n))
        onehot = np.zeros(n)
        onehot[j] = 1.0
        worst = max(worst, tv(log_pool(agents, Weights(onehot)), agents[j]))
        # zero-weight agents must not matter
        beta = weights.beta.copy()
        beta[j] = 0.0
        beta = beta / beta.sum()
        reduced = [a for t, a in enumerate(agents) if t != j]
        rbeta = np.array([b for t, b in enumerate(beta) if t != j])
        worst = max(
            worst,
            tv(log_pool(agents, Weights(beta)), log_pool(reduced, Weights(rbeta))),
        )
        # pooling identical copies returns the copy
        worst = max(worst, tv(log_pool([agents[0]] * n, weights), agents[0]))
    return CheckResult(
        name="pools.weight_edge_cases",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max tv over one-hot weights, dropped zero weights, identical agents",
    )


def _check_log_z(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 0, 3, i)
        agents, weights = _random_family(rng)
        pooled, log_z = log_pool_with_log_z(agents, weights)
        worst = max(worst, abs(log_z - _longdouble_log_z(agents, weights)))
        if log_z > 1e-12:  # the normalizer of a geometric mean cannot exceed 1
            worst = max(worst, log_z)
        combo = sum(b * a.log_p for b, a in zip(weights.beta, agents))
        worst = max(worst, float(abs(np.exp(combo - log_z).sum() - 1.0)))
    return CheckResult(
        name="pools.log_normalizer",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max error of the log-normalizer against extended precision, "
        "its sign bound, and exact renormalization",
    )


# ---------------------------------------------------------------------------
# welfare
# ---------------------------------------------------------------------------

def _check_gap_extended(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 1, 0, i)
        m = int(rng.integers(2, 9))
        agent = _random_dist(rng, m)
        pool_d = _random_dist(rng, m)
        gap = welfare_gap(agent, pool_d)  # raises if its two forms disagree
        worst = max(worst, abs(gap - _longdouble_gap(agent, pool_d)))
    return CheckResult(
        name="welfare.gap_extended_precision",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max |welfare_gap - extended-precision recomputation|",
    )


def _check_cov_condition(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 1, 1, i)
        m = int(rng.integers(2, 9))
        agent = _random_dist(rng, m)
        pool_d = _random_dist(rng, m)
        w = ScoreFn(agent.space, rng.standard_normal(m))
        c, verdict = covariance_condition(agent, w, pool_d, tol=1e-9)
        shift = expect(pool_d, w) - expect(agent, w)
        worst = max(worst, abs(c - shift))
        if verdict != (shift >= -1e-9):
            worst = max(worst, 1.0)
    return CheckResult(
        name="welfare.covariance_equals_mean_shift",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max |covariance criterion - (E_pool[w] - E_agent[w])|",
    )


def _check_binary_closed_form(seed: int, samples: int, tol: float) -> CheckResult:
    space = OutcomeSpace(2)
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 1, 2, i)
        x1, x2 = rng.uniform(0.02, 0.98, 2)
        b = float(rng.uniform(0.1, 0.9))
        a1 = make_dist(space, np.array([x1, 1.0 - x1]))
        a2 = make_dist(space, np.array([x2, 1.0 - x2]))
        pooled = log_pool([a1, a2], Weights(np.array([b, 1.0 - b])))
        x = float(pooled.p[0])
        for agent, xi in ((a1, x1), (a2, x2)):
            worst = max(
                worst,
                abs(
                    welfare_gap(agent, pooled)
                    - constructions.binary_gap_closed_form(xi, x)
                ),
            )
    return CheckResult(
        name="welfare.binary_closed_form",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max |welfare_gap - (x - x_i) log(x_i/(1-x_i))| on two outcomes",
    )


def _check_binary_census(seed: int, samples: int, tol: float) -> CheckResult:
    space = OutcomeSpace(2)
    grid = np.arange(1, samples + 1) / (samples + 1)
    betas = np.arange(1, 10) / 10.0
    worst_joint = -np.inf
    between_ok = True
    for x1 in grid:
        a1 = make_dist(space, np.array([x1, 1.0 - x1]))
        for x2 in grid:
            a2 = make_dist(space, np.array([x2, 1.0 - x2]))
            for b in betas:
                pooled = log_pool([a1, a2], Weights(np.array([b, 1.0 - b])))
                g1 = welfare_gap(a1, pooled)
                g2 = welfare_gap(a2, pooled)
                worst_joint = max(worst_joint, min(g1, g2))
                x = float(pooled.p[0])
                lo, hi = min(x1, x2), max(x1, x2)
                if x1 != x2 and not (lo < x < hi):
                    between_ok = False
    return CheckResult(
        name="welfare.binary_census",
        passed=(worst_joint <= tol) and between_ok,
        value=float(worst_joint),
        tolerance=tol,
        samples=samples,
        detail="max over the census of min(gap1, gap2) — two-outcome agents "
        "never both strictly gain; pooled mass stays between the agents'",
    )


def _check_uniform_no_gain(seed: int, samples: int, tol: float) -> CheckResult:
    worst_err = 0.0
    worst_gap = -np.inf
    for i in range(samples):
        rng = rng_from(seed, 1, 4, i)
        m = int(rng.integers(2, 13))
        r = _random_dist(rng, m)
        gap = stability.uniform_no_gain(r)
        u = uniform(r.space)
        worst_err = max(worst_err, abs(gap + kl(r, u) + kl(u, r)))
        worst_gap = max(worst_gap, gap)
    return CheckResult(
        name="welfare.uniform_reference_no_gain",
        passed=(worst_gap <= 0.0) and (worst_err <= tol),
        value=worst_err,
        tolerance=tol,
        samples=samples,
        detail="uniform's gap against any reference is <= 0 and equals "
        "-(KL(r,u)+KL(u,r)); value is the max identity error",
    )


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def _check_cyclic(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    cases = 0
    for n in (2, 3, 5, 8):
        for eps_frac in (0.3, 0.08, 0.01):
            eps = eps_frac / n
            inst = constructions.cyclic_welfare_instance(n, eps, C=2.0)
            pooled = log_pool(list(inst.agents), inst.weights)
            worst = max(worst, tv(pooled, uniform(pooled.space)))
            margin = 2.0 * (1.0 / n - eps)
            for agent, w in zip(inst.agents, inst.welfares):
                gain = expect(pooled, w) - expect(agent, w)
                worst = max(worst, abs(gain - margin))
                c, verdict = covariance_condition(agent, w, pooled, tol=1e-9)
                if not verdict:
                    worst = max(worst, 1.0)
            cases += 1
    return CheckResult(
        name="constructions.cyclic_uniform_pool_and_margins",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=cases,
        detail="pool exactly uniform; every agent's welfare rises by C(1/n - eps)",
    )


def _check_unanimity_threshold(seed: int, samples: int, tol: float) -> CheckResult:
    worst_min_gap = np.inf
    cases = 0
    for n in (2, 3, 5):
        raw_up = np.arange(1, n + 1, dtype=float)
        for weights in (
            None,
            Weights(raw_up / raw_up.sum()),
            Weights(raw_up[::-1] / raw_up.sum()),
        ):
            eps = constructions.find_epsilon_for_unanimity(n, weights)
            decomp = constructions.analytic_unanimity_instance(n, eps, weights)
            rep = unanimity_report(decomp)
            worst_min_gap = min(worst_min_gap, rep.min_gap)
            cases += 1
    return CheckResult(
        name="constructions.unanimity_threshold_exists",
        passed=worst_min_gap > tol,
        value=float(worst_min_gap),
        tolerance=tol,
        samples=cases,
        detail="smallest welfare gap at the discovered peakedness threshold "
        "(must be strictly positive)",
    )


def _check_unanimity_pool_formula(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 2, 2, i)
        n = int(rng.integers(2, 6))
        eps = float(rng.uniform(0.01, 0.24))
        weights = _random_strict_weights(rng, n)
        decomp = constructions.analytic_unanimity_instance(n, eps, weights)
        e = np.longdouble(eps)
        raw = np.empty(n + 1, dtype=np.longdouble)
        raw[0] = (1.0 - e - (n - 1) * e ** (n + 1)) ** np.longdouble(1.0)
        for j in range(n):
            c_j = (n + 1) - n * np.longdouble(weights.beta[j])
            raw[j + 1] = e**c_j
        oracle = raw / raw.sum()
        worst = max(worst, _tv_vs_longdouble(decomp.parent, oracle))
    return CheckResult(
        name="constructions.unanimity_pool_closed_form",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max tv between the pooled distribution and its closed form "
        "eps^((n+1) - n*beta_i) on private outcomes",
    )


def _check_peaked_negative(seed: int, samples: int, tol: float) -> CheckResult:
    worst_slope_err = 0.0
    all_found = True
    cases = 0
    for n in (2, 4):
        for i in range(max(10, samples // 8)):
            rng = rng_from(seed, 2, 3, n, i)
            weights = _random_strict_weights(rng, n)
            found = None
            for eps in constructions.EPSILON_GRID:
                if eps >= 0.5:
                    continue
                agents = constructions.peaked_incompatible_family(n, eps)
                s = weighted_gap_sum(make_decomposition(agents, weights, "log"))
                if s < 0.0:
                    found = eps
                    break
            if found is None:
                all_found = False
                continue
            # the slope claim is asymptotic, so regress on the small-eps
            # tail of the grid (1e-6 down to 1e-10)
            eps_tail = [e for e in constructions.EPSILON_GRID if e <= 1e-6]
            log_zs = []
            for eps in eps_tail:
                agents = constructions.peaked_incompatible_family(n, eps)
                _, log_z = log_pool_with_log_z(agents, weights)
                log_zs.append(log_z)
            slope = float(np.polyfit(np.log(eps_tail), log_zs, 1)[0])
            expected = 1.0 - float(weights.beta.max())
            worst_slope_err = max(worst_slope_err, abs(slope - expected) / expected)
            cases += 1
    return CheckResult(
        name="constructions.peaked_sum_negative_with_slope",
        passed=all_found and worst_slope_err <= tol,
        value=worst_slope_err,
        tolerance=tol,
        samples=cases,
        detail="a negative weighted gap sum is reached on the grid for every "
        "strict weight vector; log-normalizer slope matches 1 - max(beta)",
    )


# ---------------------------------------------------------------------------
# factorize
# ---------------------------------------------------------------------------

def _check_factor_distinct(seed: int, samples: int, tol: float) -> CheckResult:
    worst_tv = 0.0
    worst_dist = np.inf
    for i in range(samples):
        rng = rng_from(seed, 3, 0, i)
        m = int(rng.integers(3, 9))
        n = int(rng.integers(2, 6))
        parent = _random_dist(rng, m)
        weights = _random_strict_weights(rng, n)
        decomp = factorize.factor_pairwise_distinct(parent, weights, seed=i)
        worst_tv = max(worst_tv, tv(log_pool(list(decomp.children), weights), parent))
        family = [parent, *decomp.children]
        for a in range(len(family)):
            for b in range(a + 1, len(family)):
                worst_dist = min(worst_dist, tv(family[a], family[b]))
    return CheckResult(
        name="factorize.pairwise_distinct_reconstructs",
        passed=(worst_tv <= tol) and (worst_dist > factorize.DISTINCTNESS_TV),
        value=worst_tv,
        tolerance=tol,
        samples=samples,
        detail="children re-pool to the parent exactly; all pairwise tv "
        "distances exceed the distinctness floor",
    )


def _check_factor_fixed(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 3, 1, i)
        k = int(rng.integers(1, 3))
        n = k + 2 + int(rng.integers(0, 3))
        m = int(rng.integers(3, 9))
        parent = _random_dist(rng, m)
        fixed = [_random_dist(rng, m) for _ in range(k)]
        weights = _random_strict_weights(rng, n)
        decomp = factorize.factor_with_fixed(parent, fixed, weights, seed=i)
        for f, c in zip(fixed, decomp.children):
            if not np.array_equal(f.p, c.p):
                worst = max(worst, 1.0)
        worst = max(worst, tv(log_pool(list(decomp.children), weights), parent))
    return CheckResult(
        name="factorize.fixed_children_reconstructs",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="prescribed children pass through bit-identical and the "
        "family still re-pools to the parent",
    )


def _check_split_invariance(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 3, 2, i)
        agents, weights = _random_family(rng, m_lo=3, n_lo=2, n_hi=5)
        decomp = make_decomposition(agents, weights, "log")
        idx = int(rng.integers(0, weights.n))
        alpha = float(rng.uniform(0.1, 0.9))
        g = ScoreFn(decomp.space, 0.7 * rng.standard_normal(decomp.space.size))
        _, _, delta = factorize.split_invariance_check(decomp, idx, alpha, g)
        worst = max(worst, delta)
        # a zero-tilt split produces two clones with the original's welfare gap
        zero = ScoreFn(decomp.space, np.zeros(decomp.space.size))
        first, second, delta0 = factorize.split_invariance_check(
            decomp, idx, alpha, zero
        )
        worst = max(worst, delta0)
        base_gap = welfare_gap(agents[idx], decomp.parent)
        for clone in (first, second):
            worst = max(worst, abs(welfare_gap(clone, decomp.parent) - base_gap))
    return CheckResult(
        name="factorize.split_leaves_pool_unchanged",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max pool drift under compatible splits, plus clone-gap "
        "agreement for zero tilts",
    )


def _check_parent_benefit(seed: int, samples: int, tol: float) -> CheckResult:
    p1 = make_dist(OutcomeSpace(3), np.array([0.5, 0.3, 0.2]))
    sweep = factorize.parent_benefit_sweep(p1, t=2.0, alpha=0.5, o_star=0)
    ts = (1.0 + 1e-9, 1.5, 2.0, 3.0)
    scores = []
    for t in ts:
        rep = factorize.parent_benefit_counterexample(p1, t, 0.5, 0, lam=1.0)
        scores.append(expect(rep.pool, p1.log_p))
    monotone = all(b >= a - 1e-12 for a, b in zip(scores, scores[1:]))
    found = sweep.first_losing_lambda is not None
    passed = (sweep.parent_gap > tol) and found and monotone
    return CheckResult(
        name="factorize.depressed_subagent_loses",
        passed=passed,
        value=float(sweep.first_losing_lambda if found else -1.0),
        tolerance=tol,
        samples=len(sweep.rows),
        detail="the sharpened pool benefits the parent, sharpening helps "
        "monotonically, and some depression strength makes a subagent lose; "
        "value is the first losing strength",
    )


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------

def _check_transport(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    identity_ok = True
    for i in range(samples):
        rng = rng_from(seed, 4, 0, i)
        agents, weights = _random_family(rng, m_lo=3)
        decomp = make_decomposition(agents, weights, "log")
        target = _random_dist(rng, decomp.space.size)
        moved = stability.transport_decomposition(decomp, target)
        worst = max(worst, tv(log_pool(list(moved.children), weights), target))
        kept = stability.transport(agents[0], decomp.parent, decomp.parent)
        if not np.array_equal(kept.p, agents[0].p):
            identity_ok = False
    return CheckResult(
        name="stability.transport_pools_to_target",
        passed=(worst <= tol) and identity_ok,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="transported children re-pool to the target; transporting "
        "to the same base is bit-exact identity",
    )


def _check_openness(seed: int, samples: int, tol: float) -> CheckResult:
    min_radius = np.inf
    cases = 0
    for n in (2, 3):
        eps = constructions.find_epsilon_for_unanimity(n)
        decomp = constructions.analytic_unanimity_instance(n, eps)
        cert = stability.certify_openness(decomp, samples=16, seed=seed)
        min_radius = min(min_radius, cert.radius)
        cases += 1
    return CheckResult(
        name="stability.unanimity_survives_in_a_ball",
        passed=min_radius > tol,
        value=float(min_radius),
        tolerance=tol,
        samples=cases,
        detail="smallest certified tv radius around a strictly unanimous "
        "instance (must be positive)",
    )


def _check_tilt_fd(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        for attempt in range(50):
            rng = rng_from(seed, 4, 2, i, attempt)
            m = int(rng.integers(2, 9))
            p = _random_dist(rng, m)
            h = ScoreFn(p.space, rng.standard_normal(m))
            analytic = stability.tilt_gap_derivative(p, h)
            if abs(analytic) >= 1e-3:
                break
        fd = stability.tilt_gap_fd(p, h)
        worst = max(worst, abs(fd - analytic) / abs(analytic))
    return CheckResult(
        name="stability.tilt_derivative_matches_finite_difference",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max relative error between -Cov(h, log p) and a central "
        "finite difference of the tilted gap",
    )


def _check_local_audit(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 4, 3, i)
        m = int(rng.integers(2, 9))
        n = int(rng.integers(2, 6))
        p = _random_dist(rng, m)
        weights = _random_strict_weights(rng, n)
        hs = [rng.standard_normal(m) for _ in range(n - 1)]
        closing = -sum(b * h for b, h in zip(weights.beta[:-1], hs))
        hs.append(closing / weights.beta[-1])
        tilts = [ScoreFn(p.space, h) for h in hs]
        _, weighted = stability.local_unanimity_audit(p, tilts, weights)
        worst = max(worst, abs(weighted))
    return CheckResult(
        name="stability.weighted_tilt_derivatives_cancel",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max |sum_i beta_i d(gap_i)| over families of tilts whose "
        "weighted sum vanishes pointwise",
    )


# ---------------------------------------------------------------------------
# persona
# ---------------------------------------------------------------------------

def _random_profile_instance(
    rng: np.random.Generator,
) -> tuple[Decomposition, list[persona.LogProfile]]:
    agents, weights = _random_family(rng, m_lo=3, m_hi=9, n_lo=2, n_hi=6)
    decomp = make_decomposition(agents, weights, "log")
    return decomp, persona.centered_profiles(decomp)


def _check_residual_slope(seed: int, samples: int, tol: float) -> CheckResult:
    worst = np.inf
    for i in range(samples):
        for attempt in range(50):
            rng = rng_from(seed, 5, 0, i, attempt)
            decomp, profiles = _random_profile_instance(rng)
            d = rng.standard_normal(decomp.n)
            d -= d.mean()
            predicted, residual_norm_fn = persona.first_order_delta_l(profiles, d)
            if norm_p(decomp.parent, predicted.f) > 1e-8:
                break
        t1, t2 = 1e-2, 1e-3
        r1, r2 = residual_norm_fn(t1), residual_norm_fn(t2)
        slope = (np.log(r1) - np.log(r2)) / (np.log(t1) - np.log(t2))
        worst = min(worst, slope)
    return CheckResult(
        name="persona.linearization_residual_is_second_order",
        passed=worst >= tol,
        value=float(worst),
        tolerance=tol,
        samples=samples,
        detail="min log-log slope of the linearization residual (quadratic "
        "decay means slope about 2)",
    )


def _check_compensation_slack(seed: int, samples: int, tol: float) -> CheckResult:
    worst = np.inf
    for i in range(samples):
        for attempt in range(50):
            rng = rng_from(seed, 5, 1, i, attempt)
            decomp, profiles = _random_profile_instance(rng)
            d = rng.standard_normal(decomp.n)
            d -= d.mean()
            d *= 1e-3 / max(1e-12, float(np.abs(d).max()))
            h_index = int(np.argmax(d))
            if d[h_index] > 0 and np.all(decomp.weights.beta + d > 0):
                break
        shifted = log_pool(list(decomp.children), Weights(decomp.weights.beta + d))
        realized = norm_p(decomp.parent, shifted.log_p - decomp.parent.log_p)
        rep = persona.compensation_bound(
            decomp, h_index, float(d[h_index]), realized * 1.25 + 1e-9, d
        )
        worst = min(worst, rep.slack)
    return CheckResult(
        name="persona.compensation_inequality_slack",
        passed=worst >= tol,
        value=float(worst),
        tolerance=tol,
        samples=samples,
        detail="min slack of the compensation inequality over random "
        "small zero-sum weight changes",
    )


def _check_counteragent_bound(seed: int, samples: int, tol: float) -> CheckResult:
    decomp, h_index, dbeta = constructions.single_counteragent_instance(delta=0.02)
    rep = persona.compensation_bound(decomp, h_index, 0.02, epsilon=0.005, dbeta=dbeta)
    bound = rep.counter_lower_bound if rep.counter_lower_bound is not None else -1.0
    passed = (
        rep.single_anti_aligned
        and rep.aligned_not_downgraded
        and bound > tol
        and float(dbeta[rep.counter_index]) >= bound - 1e-12
    )
    return CheckResult(
        name="persona.counteragent_weight_forced_up",
        passed=passed,
        value=float(bound),
        tolerance=tol,
        samples=1,
        detail="on the engineered instance the single counteracting agent's "
        "weight increase has a strictly positive lower bound, and the "
        "realized increase meets it",
    )


def _check_suppression_optimal(seed: int, samples: int, tol: float) -> CheckResult:
    worst = -np.inf
    budget = 0.05
    directions = 2000
    for i in range(samples):
        rng = rng_from(seed, 5, 3, i)
        decomp, profiles = _random_profile_instance(rng)
        m = decomp.space.size
        k = int(rng.integers(1, m - 1))
        event = tuple(rng.choice(m, size=k, replace=False))
        plan = persona.optimal_suppression(profiles, event, budget)
        exact, linear = persona.event_first_order(decomp.parent, event, plan.delta_l)
        worst = max(worst, abs(linear + plan.achieved))
        v_mat = np.stack([prof.v for prof in profiles])
        coeffs = rng.standard_normal((directions, len(profiles)))
        cand = coeffs @ v_mat
        p = decomp.parent.p
        norms2 = (cand**2 * p).sum(axis=1)
        keep = norms2 > 1e-20
        cand = cand[keep] * (budget / np.sqrt(norms2[keep]))[:, None]
        g = np.zeros(m)
        g[list(event_indices(decomp.space, event))] = 1.0
        g -= g @ p
        reductions = -(cand * g * p).sum(axis=1)
        worst = max(worst, float(reductions.max()) - plan.achieved)
    return CheckResult(
        name="persona.suppression_never_beaten",
        passed=worst <= tol,
        value=float(worst),
        tolerance=tol,
        samples=samples,
        detail="max excess of any brute-force in-span direction over the "
        "claimed optimum (also checks the plan's own first-order effect)",
    )


def _check_projection_gain(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 5, 4, i)
        decomp, profiles = _random_profile_instance(rng)
        m = decomp.space.size
        raw = rng.standard_normal(m)
        w = persona.LogProfile(decomp.parent, raw - expect(decomp.parent, raw))
        k = int(rng.integers(1, m - 1))
        event = tuple(rng.choice(m, size=k, replace=False))
        rep = persona.projection_gain(profiles, w, event, epsilon=0.05)
        worst = max(worst, abs(rep.sq_enlarged_direct - rep.sq_enlarged_pythagoras))
        if rep.gain < -1e-12:
            worst = max(worst, 1.0)
        member = persona.projection_gain(profiles, profiles[0], event, epsilon=0.05)
        if not member.w_in_span or member.gain != 0.0:
            worst = max(worst, 1.0)
    return CheckResult(
        name="persona.projection_gain_pythagoras",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max disagreement between the direct and incremental squared "
        "projection norms; re-adding a spanned profile gains nothing",
    )


def _check_kl_budget(seed: int, samples: int, tol: float) -> CheckResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_from(seed, 5, 5, i)
        m = int(rng.integers(2, 13))
        p = _random_dist(rng, m)
        raw = rng.standard_normal(m)
        scale = float(rng.uniform(0.1, 1.0)) * 0.01
        current = norm_p(p, raw - expect(p, raw))
        delta_l = ScoreFn(p.space, raw * (scale / max(current, 1e-12)))
        kl_value, half_var = persona.kl_budget(p, delta_l)
        worst = max(worst, abs(kl_value / half_var - 1.0))
    return CheckResult(
        name="persona.kl_matches_half_variance",
        passed=worst <= tol,
        value=worst,
        tolerance=tol,
        samples=samples,
        detail="max |KL / (Var/2) - 1| for log-deviations of weighted norm "
        "at most 0.01",
    )


# ---------------------------------------------------------------------------
# Registry and runner
# ---------------------------------------------------------------------------

_CheckFn = Callable[[int, int, float], CheckResult]

# (function, default sample count, default tolerance)
_REGISTRY: dict[str, list[tuple[_CheckFn, int, float]]] = {
    "pools": [
        (_check_log_pool_extended, 200, 1e-12),
        (_check_linear_pool_extended, 200, 1e-12),
        (_check_pool_weight_edges, 60, 1e-12),
        (_check_log_z, 200, 1e-12),
    ],
    "welfare": [
        (_check_gap_extended, 200, 1e-12),
        (_check_cov_condition, 200, 1e-10),
        (_check_binary_closed_form, 200, 1e-10),
        (_check_binary_census, 21, 1e-9),
        (_check_uniform_no_gain, 200, 1e-10),
    ],
    "constructions": [
        (_check_cyclic, 0, 1e-9),
        (_check_unanimity_threshold, 0, 1e-9),
        (_check_unanimity_pool_formula, 60, 1e-12),
        (_check_peaked_negative, 80, 0.05),
    ],
    "factorize": [
        (_check_factor_distinct, 80, 1e-12),
        (_check_factor_fixed, 60, 1e-12),
        (_check_split_invariance, 80, 1e-10),
        (_check_parent_benefit, 0, 1e-9),
    ],
    "stability": [
        (_check_transport, 120, 1e-10),
        (_check_openness, 0, 0.0),
        (_check_tilt_fd, 120, 1e-6),
        (_check_local_audit, 100, 1e-8),
    ],
    "persona": [
        (_check_residual_slope, 80, 1.9),
        (_check_compensation_slack, 80, -1e-9),
        (_check_counteragent_bound, 0, 0.0),
        (_check_suppression_optimal, 40, 1e-9),
        (_check_projection_gain, 80, 1e-10),
        (_check_kl_budget, 200, 0.1),
    ],
}


def run_suite(
    name: str,
    seed: int,
    samples: int | None = None,
    tolerance: float | None = None,
) -> list[CheckResult]:
    """Run one suite (or ``"all"``) and return its check results.

    ``samples`` scales the random-instance counts of checks that have them
    (fixed catalogs keep their size); ``tolerance`` overrides each check's
    default threshold — a blunt instrument, mostly useful for exploring how
    much numerical headroom the implementation has.
    """
    if name == "all":
        out: list[CheckResult] = []
        for suite in SUITE_NAMES:
            out.extend(run_suite(suite, seed, samples, tolerance))
        return out
    if name not in _REGISTRY:
        known = ", ".join((*SUITE_NAMES, "all"))
        raise UnknownSuite(f"unknown suite {name!r}; expected one of: {known}")
    results = []
    for fn, default_samples, default_tol in _REGISTRY[name]:
        n = default_samples
        if samples is not None and default_samples > 0:
            n = max(1, samples)
        tol = default_tol if tolerance is None else tolerance
        results.append(fn(seed, n, tol))
    return results
