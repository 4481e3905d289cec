"""Pool-preserving transport, openness certification, and small-tilt analysis.

Transport reweights every child of a decomposition by the ratio
target/parent, which moves the pooled distribution *exactly* onto the target
(not perturbatively) while keeping the weights.  Built on that, the openness
certifier probes a strictly unanimous decomposition with seeded random
targets on tv-spheres of shrinking radius and reports the largest radius at
which every probe stayed strictly unanimous.

The small-tilt tools differentiate an agent's welfare gap along exponential
tilts of the pool, which is where the local impossibility phenomenon lives:
the weight-averaged derivative is always exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Dist,
    ScoreFn,
    Weights,
    cov,
    dist_from_log_weights,
    rng_from,
    uniform,
)
from .errors import NotFound, NotStrictlyUnanimous, SpaceMismatch, TiltsNotCentered
from .pooling import Decomposition, POOL_REVALIDATION_TOL
from .welfare import UNANIMITY_TOL, unanimity_report, welfare_gap

__all__ = [
    "transport",
    "transport_decomposition",
    "OpennessCertificate",
    "certify_openness",
    "sample_at_tv_radius",
    "tilt_gap_derivative",
    "tilt_gap_fd",
    "local_unanimity_audit",
    "uniform_no_gain",
]

#: Probe coordinates must stay inside (POSITIVITY_FLOOR, 1) when sampling
#: targets near a distribution; keeps every probe strictly positive.
POSITIVITY_FLOOR = 1e-9


def transport(child: Dist, base: Dist, target: Dist) -> Dist:
    """Reweight ``child`` by target/base and renormalize.

    transport(child, P, P) returns ``child`` bit-for-bit, and
    transport(base, base, target) returns ``target``.
    """
    if child.space != base.space or base.space != target.space:
        raise SpaceMismatch("child, base, and target must share an outcome space")
    if np.array_equal(base.p, target.p):
        return child
    return dist_from_log_weights(
        child.space, child.log_p + target.log_p - base.log_p
    )


def transport_decomposition(decomp: Decomposition, target: Dist) -> Decomposition:
    """Move a log-pool decomposition onto ``target`` exactly.

    Every child is transported with base = the current parent; the result
    re-validates as a decomposition of ``target`` with the same weights.
    """
    if target.space != decomp.space:
        raise SpaceMismatch("target must live on the decomposition's space")
    moved = tuple(
        transport(child, decomp.parent, target) for child in decomp.children
    )
    return Decomposition(
        target, moved, decomp.weights, decomp.pool_kind, tol=POOL_REVALIDATION_TOL
    )


def sample_at_tv_radius(
    base: Dist,
    radius: float,
    rng: np.random.Generator,
    max_tries: int = 64,
) -> Dist | None:
    """A seeded random distribution at tv-distance ``radius`` from ``base``.

    Draws centered directions in the simplex tangent space, scales them to
    the requested tv, and rejects any draw that would push a coordinate
    outside (POSITIVITY_FLOOR, 1).  Returns None when no draw fits within
    ``max_tries`` — the radius is simply too large around this base point.
    """
    m = base.space.size
    for _ in range(max_tries):
        d = rng.standard_normal(m)
        d = d - d.mean()
        l1 = float(np.abs(d).sum())
        if l1 == 0.0:
            continue
        d = d * (2.0 * radius / l1)
        p = base.p + d
        if np.all(p > POSITIVITY_FLOOR) and np.all(p < 1.0):
            return Dist(base.space, p / p.sum())
    return None


@dataclass(frozen=True, slots=True)
class OpennessCertificate:
    """Empirical evidence that strict unanimity survives in a tv-ball.

    ``radius`` is the largest bisection-tested tv radius at which every one
    of ``samples`` seeded probe targets, after exact transport, still had
    all welfare gaps strictly positive; ``min_gap_at_boundary`` is the
    smallest gap observed among those probes.
    """

    center: Decomposition
    radius: float
    samples: int
    min_gap_at_boundary: float
    seed: int

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise NotFound("certificate radius must be positive")
        if not self.min_gap_at_boundary > 0.0:
            raise NotFound("boundary gap must be positive")


def certify_openness(
    decomp: Decomposition,
    samples: int = 64,
    seed: int = 0,
    tol: float = UNANIMITY_TOL,
    iterations: int = 18,
) -> OpennessCertificate:
    """Bisect for the largest empirically clean tv radius around the parent.

    The input must be strictly unanimous.  Probe directions are keyed by
    (seed, sample index) only, so a run with more samples extends — never
    replaces — the probe set of a run with fewer; certified radii can
    therefore only shrink or hold as ``samples`` grows.

    This is sampled evidence with a seed and sample count, not a proof: the
    guarantee that *some* positive radius exists is the theorem's job; the
    certificate records how far probing got.
    """
    base_report = unanimity_report(decomp, tol=tol)
    if not base_report.strictly_unanimous:
        raise NotStrictlyUnanimous(
            "openness certification needs every gap strictly positive; "
            f"min gap is {base_report.min_gap!r}"
        )

    def probe(radius: float) -> tuple[bool, float]:
        worst = np.inf
        for s in range(samples):
            target = sample_at_tv_radius(decomp.parent, radius, rng_from(seed, s))
            if target is None:
                return False, np.inf
            moved = transport_decomposition(decomp, target)
            rep = unanimity_report(moved, tol=tol)
            if not rep.strictly_unanimous:
                return False, np.inf
            worst = min(worst, rep.min_gap)
        return True, float(worst)

    lo, lo_gap = 0.0, 0.0
    hi = 0.5
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        ok, gap = probe(mid)
        if ok:
            lo, lo_gap = mid, gap
        else:
            hi = mid
    if lo == 0.0:
        raise NotFound(
            "no positive radius survived probing; this contradicts strict "
            "unanimity of the input and indicates a bug"
        )
    return OpennessCertificate(
        center=decomp,
        radius=lo,
        samples=samples,
        min_gap_at_boundary=lo_gap,
        seed=seed,
    )


def tilt_gap_derivative(P: Dist, h: ScoreFn) -> float:
    """d/de at e=0 of the welfare gap of the tilted agent P_e ∝ P·exp(e·h)
    against the fixed pool P.  Equals −Cov_P(h, log P)."""
    if h.space != P.space:
        raise SpaceMismatch("tilt and distribution must share an outcome space")
    return -cov(P, h.f, P.log_p)


def tilt_gap_fd(P: Dist, h: ScoreFn, step: float = 1e-5) -> float:
    """Central finite difference companion to :func:`tilt_gap_derivative`."""

    def gap_at(eps: float) -> float:
        tilted = dist_from_log_weights(P.space, P.log_p + eps * h.f)
        return welfare_gap(tilted, P)

    return (gap_at(step) - gap_at(-step)) / (2.0 * step)


def local_unanimity_audit(
    P: Dist, tilts: Sequence[ScoreFn], weights: Weights, tol: float = 1e-9
) -> tuple[np.ndarray, float]:
    """Per-tilt gap derivatives and their weight-averaged sum.

    The tilts must satisfy sum_i beta_i h_i = 0 at every outcome (the
    balanced form any pool witness family can be put into); then the
    weighted derivative sum vanishes identically, so the gaps cannot all
    rise to first order.  Returns (derivatives, weighted_sum).
    """
    if len(tilts) != weights.n:
        raise TiltsNotCentered(
            f"{len(tilts)} tilts but {weights.n} weights"
        )
    combined = np.zeros(P.space.size)
    for beta_i, h in zip(weights.beta, tilts):
        if h.space != P.space:
            raise SpaceMismatch("tilts must live on the distribution's space")
        combined += beta_i * h.f
    worst = float(np.max(np.abs(combined)))
    if worst > tol:
        raise TiltsNotCentered(
            f"weighted tilt sum deviates from zero by {worst:.3e} (tol {tol:.1e})"
        )
    derivatives = np.array([tilt_gap_derivative(P, h) for h in tilts])
    return derivatives, float(weights.beta @ derivatives)


def uniform_no_gain(R: Dist) -> float:
    """The welfare gap of R against the uniform pool; always <= 0.

    Equals −(KL(R‖U) + KL(U‖R)), so it vanishes exactly when R is uniform:
    no agent strictly gains from pooling into indifference.
    """
    return welfare_gap(R, uniform(R.space))
