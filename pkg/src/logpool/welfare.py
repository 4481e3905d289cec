"""Epistemic welfare: log-score gaps, the covariance criterion, unanimity verdicts.

An agent's epistemic utility of an outcome is its own log-probability of that
outcome.  The welfare gap of agent R against a pooled distribution P is

    gap(R, P) = E_P[log R] − E_R[log R],

i.e. how much R's expected log-score improves when outcomes are drawn from P
instead of from R itself.  The same quantity decomposes exactly as
H(R) − H(P) − KL(P‖R); both forms are computed and cross-checked on every
call, so a disagreement (numerical pathology) can never pass silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dist, ScoreFn, VALUE_TOL, cov, entropy, expect, kl
from .errors import IdentityMismatch, SpaceMismatch
from .pooling import Decomposition

__all__ = [
    "UNANIMITY_TOL",
    "WelfareReport",
    "welfare_gap",
    "covariance_condition",
    "unanimity_report",
    "weighted_gap_sum",
]

#: Verdict tolerance: "unanimous" admits gaps >= -UNANIMITY_TOL, "strict"
#: demands gaps > +UNANIMITY_TOL, so the strict/non-strict distinction
#: survives floating point.
UNANIMITY_TOL = 1e-9


def welfare_gap(agent: Dist, pool: Dist, tol: float = VALUE_TOL) -> float:
    """E_pool[log agent] − E_agent[log agent], cross-checked two ways.

    The direct expectation form is returned; the entropy/KL identity form
    must agree within ``tol`` or :class:`IdentityMismatch` is raised.
    """
    if agent.space != pool.space:
        raise SpaceMismatch("agent and pool must share an outcome space")
    direct = expect(pool, agent.log_p) - expect(agent, agent.log_p)
    identity = entropy(agent) - entropy(pool) - kl(pool, agent)
    if abs(direct - identity) > tol:
        raise IdentityMismatch(
            f"welfare gap disagreement: direct={direct!r} identity={identity!r}"
        )
    return direct


def covariance_condition(
    agent: Dist, welfare: ScoreFn, pool: Dist, tol: float = VALUE_TOL
) -> tuple[float, bool]:
    """Covariance test for whether joining the pool helps this agent.

    Returns ``(c, verdict)`` where ``c = Cov_agent(welfare, ratio)`` with
    ``ratio(o) = pool(o)/agent(o)`` and ``verdict = (c >= -tol)``.  The
    covariance equals E_pool[welfare] − E_agent[welfare] exactly, so the
    verdict is the same as asking whether the agent's expected welfare
    weakly improves under the pool.

    The ratio is evaluated as exp(log pool − log agent) to avoid
    cancellation on peaked inputs.
    """
    if agent.space != pool.space or welfare.space != pool.space:
        raise SpaceMismatch("agent, welfare, and pool must share an outcome space")
    ratio = np.exp(pool.log_p - agent.log_p)
    c = cov(agent, welfare.f, ratio)
    return c, bool(c >= -tol)


def _gap_vector(decomp: Decomposition, tol: float) -> np.ndarray:
    return np.array(
        [welfare_gap(child, decomp.parent, tol=tol) for child in decomp.children]
    )


@dataclass(frozen=True, slots=True)
class WelfareReport:
    """Per-child welfare gaps with their entropy/KL breakdown and verdicts.

    ``gaps[i] = entropy_children[i] − entropy_parent − kl_parent_children[i]``
    holds within ``tolerance`` by construction (it is re-checked, not assumed).
    """

    gaps: np.ndarray
    entropy_children: np.ndarray
    entropy_parent: float
    kl_parent_children: np.ndarray
    unanimous: bool
    strictly_unanimous: bool
    tolerance: float

    def __post_init__(self) -> None:
        for name in ("gaps", "entropy_children", "kl_parent_children"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        recomposed = self.entropy_children - self.entropy_parent - self.kl_parent_children
        err = float(np.max(np.abs(recomposed - self.gaps)))
        if err > self.tolerance:
            raise IdentityMismatch(
                f"gap/entropy breakdown disagrees by {err:.3e}"
            )
        if self.strictly_unanimous and not self.unanimous:
            raise IdentityMismatch("strict unanimity without unanimity")

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())


def unanimity_report(decomp: Decomposition, tol: float = UNANIMITY_TOL) -> WelfareReport:
    """Welfare gaps of every child against the parent, with verdicts.

    Epistemic welfare is hard-coded here: each child's welfare function is
    its own log-probability vector.  (For general welfare functions use
    :func:`covariance_condition`.)  Linear-pool decompositions are accepted
    so the mixture impossibility is demonstrable through the same report.
    """
    gaps = _gap_vector(decomp, tol=VALUE_TOL)
    h_children = np.array([entropy(c) for c in decomp.children])
    h_parent = entropy(decomp.parent)
    kl_terms = np.array([kl(decomp.parent, c) for c in decomp.children])
    return WelfareReport(
        gaps=gaps,
        entropy_children=h_children,
        entropy_parent=h_parent,
        kl_parent_children=kl_terms,
        unanimous=bool(np.all(gaps >= -tol)),
        strictly_unanimous=bool(np.all(gaps > tol)),
        tolerance=tol,
    )


def weighted_gap_sum(decomp: Decomposition, tol: float = VALUE_TOL) -> float:
    """sum_i beta_i * gap_i — the group's weight-averaged welfare change."""
    gaps = _gap_vector(decomp, tol=tol)
    return float(decomp.weights.beta @ gaps)
