"""Generators for the explicit instance families used in existence and
impossibility demonstrations.

Three families, each parameterized by a peakedness scale ``epsilon``:

* cyclic welfare — n agents on n outcomes whose log-pool is exactly uniform
  and whose (artificial, non-epistemic) welfare functions all strictly gain;
* analytic unanimity — n agents on n+1 outcomes sharing a dominant outcome,
  each holding a small private stake; strictly unanimous for small epsilon;
* peaked incompatible — n near-point-mass agents on n outcomes for which the
  weight-averaged welfare change is strictly negative at small epsilon, for
  every strictly positive weight vector.

How small "small epsilon" must be is discovered by logarithmic grid search
(:func:`find_epsilon_for_unanimity`), recorded in reports, and never hard-coded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .core import (
    Dist,
    OutcomeSpace,
    ScoreFn,
    Weights,
    dist_from_log_weights,
    make_dist,
)
from .errors import DegenerateWeights, NotFound, ParamOutOfRange
from .pooling import Decomposition, make_decomposition
from .welfare import unanimity_report

__all__ = [
    "EPSILON_GRID",
    "CyclicInstance",
    "InstanceFamily",
    "cyclic_welfare_instance",
    "analytic_unanimity_instance",
    "find_epsilon_for_unanimity",
    "peaked_incompatible_family",
    "binary_gap_closed_form",
    "single_counteragent_instance",
]

#: The search grid for peakedness thresholds: 10^(-k/4), k = 1..40.
EPSILON_GRID: tuple[float, ...] = tuple(10.0 ** (-k / 4.0) for k in range(1, 41))


class CyclicInstance(NamedTuple):
    agents: tuple[Dist, ...]
    weights: Weights
    welfares: tuple[ScoreFn, ...]


def cyclic_welfare_instance(n: int, epsilon: float, C: float) -> CyclicInstance:
    """n agents on n outcomes with rotationally symmetric beliefs and welfare.

    Agent i puts mass 1-(n-1)*epsilon on outcome i and epsilon elsewhere;
    its welfare is 0 on the *next* outcome (cyclically) and -C on the rest.
    Under uniform weights the log-pool is exactly uniform by symmetry, and
    each agent's expected welfare rises from -C(1-epsilon) to -C(n-1)/n,
    a strict improvement of C(1/n - epsilon) > 0.
    """
    if n < 2:
        raise ParamOutOfRange("need n >= 2 agents")
    if not (0.0 < epsilon < 1.0 / n):
        raise ParamOutOfRange(f"epsilon must lie in (0, 1/{n})")
    if not C > 0.0:
        raise ParamOutOfRange("C must be positive")
    space = OutcomeSpace(n)
    agents = []
    welfares = []
    for i in range(n):
        raw = np.full(n, epsilon)
        raw[i] = 1.0 - (n - 1) * epsilon
        agents.append(make_dist(space, raw))
        w = np.full(n, -float(C))
        w[(i + 1) % n] = 0.0
        welfares.append(ScoreFn(space, w))
    return CyclicInstance(tuple(agents), Weights.uniform(n), tuple(welfares))


def analytic_unanimity_instance(
    n: int, epsilon: float, weights: Weights | None = None
) -> Decomposition:
    """n agents on n+1 outcomes: one shared dominant outcome, one private each.

    Agent i puts mass 1 - a - (n-1)*d on the shared outcome 0, a = epsilon on
    its private outcome i, and d = epsilon^(n+1) on the other private
    outcomes.  The log-pool concentrates even harder on the shared outcome:
    its unnormalized mass at private outcome i is epsilon^((n+1) - n*beta_i),
    an exponent strictly above 1 whenever beta_i < 1.  For small epsilon all
    welfare gaps are strictly positive.
    """
    if n < 2:
        raise ParamOutOfRange("need n >= 2 agents")
    if not (0.0 < epsilon < 0.25):
        raise ParamOutOfRange("epsilon must lie in (0, 1/4)")
    if weights is None:
        weights = Weights.uniform(n)
    if weights.n != n:
        raise ParamOutOfRange(f"{weights.n} weights for {n} agents")
    if np.any(weights.beta >= 1.0):
        raise DegenerateWeights(
            "a weight equal to 1 collapses the pool onto a single agent"
        )
    alpha = epsilon
    delta = epsilon ** (n + 1)
    space = OutcomeSpace(n + 1)
    agents = []
    for i in range(n):
        raw = np.full(n + 1, delta)
        raw[0] = 1.0 - alpha - (n - 1) * delta
        raw[i + 1] = alpha
        agents.append(make_dist(space, raw))
    return make_decomposition(agents, weights, "log")


def find_epsilon_for_unanimity(n: int, weights: Weights | None = None) -> float:
    """Largest grid epsilon making the analytic instance strictly unanimous.

    Walks :data:`EPSILON_GRID` from large to small and returns the first
    (hence largest) epsilon whose instance has every gap strictly positive.
    Existence is guaranteed for small enough epsilon, so exhausting the grid
    raises :class:`NotFound` — which indicates a bug, not an unlucky input.
    """
    for eps in EPSILON_GRID:
        if eps >= 0.25:
            continue
        decomp = analytic_unanimity_instance(n, eps, weights)
        if unanimity_report(decomp).strictly_unanimous:
            return eps
    raise NotFound(
        f"no strictly unanimous epsilon on the grid for n={n}; "
        "this should be impossible"
    )


def peaked_incompatible_family(n: int, epsilon: float) -> list[Dist]:
    """n near-point-mass agents on n outcomes: P_i(i)=1-eps, else eps/(n-1)."""
    if n < 2:
        raise ParamOutOfRange("need n >= 2 agents")
    if not (0.0 < epsilon < 0.5):
        raise ParamOutOfRange("epsilon must lie in (0, 1/2)")
    space = OutcomeSpace(n)
    agents = []
    for i in range(n):
        raw = np.full(n, epsilon / (n - 1))
        raw[i] = 1.0 - epsilon
        agents.append(make_dist(space, raw))
    return agents


def binary_gap_closed_form(x_i: float, x: float) -> float:
    """Closed-form welfare gap on two outcomes.

    For an agent holding mass ``x_i`` on the first outcome, against a pool
    holding mass ``x`` there, the gap is (x - x_i) * log(x_i / (1 - x_i)).
    """
    if not (0.0 < x_i < 1.0) or not (0.0 < x < 1.0):
        raise ParamOutOfRange("both masses must lie in (0, 1)")
    return (x - x_i) * float(np.log(x_i / (1.0 - x_i)))


def single_counteragent_instance(
    delta: float,
    beta: tuple[float, float, float] = (0.5, 0.3, 0.2),
    scale: float = 1.0,
) -> tuple[Decomposition, int, np.ndarray]:
    """Three agents over a uniform pool with exactly one counteracting profile.

    The first agent's centered log-profile is ``scale * g`` for a fixed unit
    direction g; the second agent's profile points exactly opposite, rescaled
    so the weighted profiles cancel; the third agent is uniform (zero
    profile).  Returns ``(decomp, 0, dbeta)`` where ``dbeta`` amplifies the
    first agent by ``delta``, raises the second in the canceling proportion,
    and drains the third — so the re-pooled distribution is unchanged and the
    realized log-deviation is zero to machine precision.

    Amplification under any budget ``epsilon < delta * scale`` then forces a
    strictly positive lower bound on the second agent's weight increase, and
    the deliberate increase built into ``dbeta`` meets it.
    """
    if not delta > 0.0:
        raise ParamOutOfRange("delta must be positive")
    if not scale > 0.0:
        raise ParamOutOfRange("scale must be positive")
    b = np.asarray(beta, dtype=float)
    if b.shape != (3,):
        raise ParamOutOfRange("exactly three weights are required")
    space = OutcomeSpace(4)
    g = np.array([3.0, -1.0, -1.0, -1.0]) / np.sqrt(3.0)
    ratio = b[0] / b[1]
    profiles = [scale * g, -ratio * scale * g, np.zeros(4)]
    children = [dist_from_log_weights(space, v) for v in profiles]
    decomp = make_decomposition(children, Weights(b), "log")
    dbeta = np.array([delta, delta / ratio, -delta * (1.0 + 1.0 / ratio)])
    if b[2] + dbeta[2] <= 0.0:
        raise ParamOutOfRange(
            "delta too large: the third agent's weight would go nonpositive"
        )
    return decomp, 0, dbeta


_FAMILY_KINDS = ("cyclic_welfare", "analytic_unanimity", "peaked_incompatible")


@dataclass(frozen=True, slots=True)
class InstanceFamily:
    """A named family plus parameters; round-trips through CLI JSON configs."""

    kind: str
    n: int
    epsilon: float
    extra: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in _FAMILY_KINDS:
            raise ParamOutOfRange(f"unknown family kind {self.kind!r}")
        bound = {
            "cyclic_welfare": 1.0 / self.n if self.n else 0.0,
            "analytic_unanimity": 0.25,
            "peaked_incompatible": 0.5,
        }[self.kind]
        if not (0.0 < self.epsilon < bound):
            raise ParamOutOfRange(
                f"epsilon for {self.kind} must lie in (0, {bound})"
            )
        object.__setattr__(self, "extra", dict(self.extra))

    def instantiate(self):
        if self.kind == "cyclic_welfare":
            return cyclic_welfare_instance(
                self.n, self.epsilon, float(self.extra.get("C", 1.0))
            )
        if self.kind == "analytic_unanimity":
            weights = self.extra.get("weights")
            if weights is not None and not isinstance(weights, Weights):
                weights = Weights(np.asarray(weights, dtype=float))
            return analytic_unanimity_instance(self.n, self.epsilon, weights)
        return peaked_incompatible_family(self.n, self.epsilon)
