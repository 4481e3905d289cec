"""Linear and logarithmic opinion pools, pool witnesses, and tilt representations.

The central object is the logarithmic pool: the normalized weighted geometric
mean of the member distributions, computed as a softmax of the weighted sum
of log-probabilities.  A :class:`Decomposition` packages a parent with the
children and weights that certifiably pool back to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Dist,
    OutcomeSpace,
    ScoreFn,
    Weights,
    dist_from_log_weights,
    log_sum_exp,
    tv,
)
from .errors import LengthMismatch, NotAPoolWitness, ParamOutOfRange, SpaceMismatch

__all__ = [
    "POOL_WITNESS_TOL",
    "POOL_REVALIDATION_TOL",
    "log_pool",
    "log_pool_with_log_z",
    "linear_pool",
    "pool",
    "Decomposition",
    "make_decomposition",
    "tilt_representation",
]

#: tv tolerance for certifying a freshly constructed Decomposition.
POOL_WITNESS_TOL = 1e-12

#: looser tv tolerance for re-validating transported/perturbed decompositions,
#: which accumulate one extra normalization.
POOL_REVALIDATION_TOL = 1e-9


def _check_family(agents: Sequence[Dist], weights: Weights) -> OutcomeSpace:
    if len(agents) != weights.n:
        raise LengthMismatch(
            f"{len(agents)} agents but {weights.n} weights"
        )
    if len(agents) == 0:
        raise LengthMismatch("need at least one agent")
    space = agents[0].space
    for a in agents[1:]:
        if a.space != space:
            raise SpaceMismatch("all pooled agents must share one outcome space")
    return space


def log_pool(agents: Sequence[Dist], weights: Weights) -> Dist:
    """Normalized weighted geometric mean of ``agents``.

    Computed entirely in log-space: softmax of sum_j beta_j * log P_j.
    """
    space = _check_family(agents, weights)
    stacked = np.stack([a.log_p for a in agents])
    mixed = weights.beta @ stacked
    return dist_from_log_weights(space, mixed)


def log_pool_with_log_z(agents: Sequence[Dist], weights: Weights) -> tuple[Dist, float]:
    """Diagnostics variant of :func:`log_pool` that also returns log Z.

    Z is the normalizer sum_o prod_j P_j(o)^beta_j.  No downstream theorem
    needs Z itself, but its decay rate is what the peaked-family analysis
    measures, so the value is exposed here rather than stored anywhere.
    """
    space = _check_family(agents, weights)
    stacked = np.stack([a.log_p for a in agents])
    mixed = weights.beta @ stacked
    return dist_from_log_weights(space, mixed), log_sum_exp(mixed)


def linear_pool(agents: Sequence[Dist], weights: Weights) -> Dist:
    """Convex combination (mixture) of the agent distributions."""
    space = _check_family(agents, weights)
    stacked = np.stack([a.p for a in agents])
    p = weights.beta @ stacked
    p = p / p.sum()
    return Dist(space, p)


def pool(agents: Sequence[Dist], weights: Weights, kind: str) -> Dist:
    if kind == "log":
        return log_pool(agents, weights)
    if kind == "linear":
        return linear_pool(agents, weights)
    raise ParamOutOfRange(f"unknown pool kind {kind!r}")


@dataclass(frozen=True, slots=True)
class Decomposition:
    """A parent distribution with children and weights that pool back to it.

    ``tol`` is the tv tolerance the witness was validated at: freshly built
    decompositions use :data:`POOL_WITNESS_TOL`; transported or otherwise
    re-derived ones may pass :data:`POOL_REVALIDATION_TOL`.
    """

    parent: Dist
    children: tuple[Dist, ...]
    weights: Weights
    pool_kind: str = "log"
    tol: float = POOL_WITNESS_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if self.pool_kind not in ("log", "linear"):
            raise ParamOutOfRange(f"unknown pool kind {self.pool_kind!r}")
        if len(self.children) < 2:
            raise LengthMismatch("a decomposition needs at least two children")
        if len(self.children) != self.weights.n:
            raise LengthMismatch(
                f"{len(self.children)} children but {self.weights.n} weights"
            )
        for c in self.children:
            if c.space != self.parent.space:
                raise SpaceMismatch("children must share the parent's outcome space")
        repooled = pool(self.children, self.weights, self.pool_kind)
        err = tv(repooled, self.parent)
        if err > self.tol:
            raise NotAPoolWitness(
                f"children pool to tv distance {err:.3e} from the claimed parent "
                f"(tolerance {self.tol:.1e})"
            )

    @property
    def n(self) -> int:
        return len(self.children)

    @property
    def space(self) -> OutcomeSpace:
        return self.parent.space


def make_decomposition(
    children: Sequence[Dist], weights: Weights, pool_kind: str = "log"
) -> Decomposition:
    """Pool the children and package the result as a certified Decomposition."""
    parent = pool(children, weights, pool_kind)
    return Decomposition(parent, tuple(children), weights, pool_kind)


def tilt_representation(
    parent: Dist,
    children: Sequence[Dist],
    weights: Weights,
    tol: float = POOL_REVALIDATION_TOL,
) -> list[ScoreFn]:
    """Write each child as an exponential tilt of the parent.

    Returns score functions ``h_i`` with ``P_i ∝ P · exp(h_i)`` and
    ``sum_i beta_i h_i(o) = 0`` at every outcome.  The naive choice
    ``log P_i − log P`` has weighted sum identically equal to log Z, a
    constant; that constant is removed from a single designated index
    k = argmax beta (lowest index on ties), which rescales P_k's
    normalizer and changes nothing else.  The deterministic choice of k
    keeps golden outputs stable.
    """
    space = _check_family(children, weights)
    if space != parent.space:
        raise SpaceMismatch("parent and children must share an outcome space")
    repooled, log_z = log_pool_with_log_z(children, weights)
    err = tv(repooled, parent)
    if err > tol:
        raise NotAPoolWitness(
            f"children pool to tv distance {err:.3e} from the claimed parent "
            f"(tolerance {tol:.1e})"
        )
    k = int(np.argmax(weights.beta))
    tilts = []
    for i, child in enumerate(children):
        h = child.log_p - parent.log_p
        if i == k:
            h = h - log_z / weights.beta[k]
        tilts.append(ScoreFn(space, h))
    return tilts
