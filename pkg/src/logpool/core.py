"""Outcome spaces, validated distributions, and information-geometric primitives.

This module is the foundation the rest of the package stands on.  It owns:

* :class:`OutcomeSpace` — a finite set of mutually exclusive outcomes;
* :class:`Dist` — a strictly positive probability vector on a space;
* :class:`Weights` — nonnegative pooling weights summing to one;
* :class:`ScoreFn` — an arbitrary finite real-valued function on a space
  (welfare functions, tilts, indicators, log-profiles before centering);
* entropy / KL divergence / total variation / the P-weighted inner product;
* the binary coarse-graining lower bound on KL;
* seeded RNG plumbing (every random draw in the package flows from a single
  integer seed through ``numpy``'s splittable ``SeedSequence``).

Conventions
-----------
* All entropies and divergences are in nats.
* Wherever products of probabilities appear, work happens in log-space and
  normalization uses the max-shifted log-sum-exp pattern, so peaked inputs
  neither overflow nor underflow.
* Strict positivity is enforced at construction with a hard error — never a
  silent floor.  Flooring would corrupt every KL value downstream.
* Scalar comparisons default to absolute tolerance ``VALUE_TOL`` (1e-9);
  probability-vector sums must hit 1 within ``NORM_TOL`` (1e-12).  Both are
  overridable per call.
* Outcome subsets ("events") are canonicalized to sorted, duplicate-free
  index tuples so every iteration order in reports is deterministic.

Everything here is immutable after construction and every operation is a pure
function: values are safe to share across threads, and there is no global
state anywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyOrFullEvent,
    IndexOutOfRange,
    NonFinite,
    NonPositiveEntry,
    NotNormalized,
    ParamOutOfRange,
    SpaceMismatch,
)

__all__ = [
    "VALUE_TOL",
    "NORM_TOL",
    "OutcomeSpace",
    "Dist",
    "Weights",
    "ScoreFn",
    "make_dist",
    "dist_from_log_weights",
    "uniform",
    "entropy",
    "kl",
    "tv",
    "expect",
    "cov",
    "inner_p",
    "norm_p",
    "log_sum_exp",
    "event_indices",
    "indicator",
    "coarse_grain_bound",
    "rng_from",
]

#: Default absolute tolerance for comparing computed scalar values.
VALUE_TOL = 1e-9

#: Tolerance on probability-vector normalization sums.
NORM_TOL = 1e-12


def _as_readonly(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{what} must be finite everywhere")


def _require_length(arr: np.ndarray, size: int, what: str) -> None:
    if arr.shape[0] != size:
        raise DimensionMismatch(
            f"{what} has length {arr.shape[0]}, expected {size}"
        )


@dataclass(frozen=True, slots=True)
class OutcomeSpace:
    """A finite outcome set; ``labels`` are cosmetic and optional."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 2:
            raise ParamOutOfRange(f"outcome space needs size >= 2, got {self.size!r}")
        if self.labels is not None:
            labels = tuple(self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != self.size:
                raise DimensionMismatch(
                    f"{len(labels)} labels for {self.size} outcomes"
                )
            if len(set(labels)) != len(labels):
                raise ParamOutOfRange("outcome labels must be distinct")

    def label_of(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return f"o{i}"

    def all_labels(self) -> list[str]:
        return [self.label_of(i) for i in range(self.size)]


def _require_same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatch(
            f"values live on different outcome spaces "
            f"({a.space.size} vs {b.space.size} outcomes)"
        )


@dataclass(frozen=True, slots=True)
class Dist:
    """A strictly positive probability distribution on a finite outcome space.

    Construct through :func:`make_dist` (which normalizes raw positive
    weights) or :func:`dist_from_log_weights` (which normalizes in
    log-space).  Direct construction demands an already-normalized vector.
    """

    space: OutcomeSpace
    p: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_readonly(self.p)
        object.__setattr__(self, "p", arr)
        _require_length(arr, self.space.size, "probability vector")
        _require_finite(arr, "probability vector")
        if np.any(arr <= 0.0):
            raise NonPositiveEntry(
                "distributions must be strictly positive on every outcome"
            )
        total = float(arr.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise NotNormalized(
                f"probabilities sum to {total!r}, expected 1 within {NORM_TOL}"
            )

    @property
    def log_p(self) -> np.ndarray:
        return np.log(self.p)

    def prob_of(self, event: Sequence[int]) -> float:
        idx = event_indices(self.space, event, allow_full=True)
        return float(self.p[list(idx)].sum())


@dataclass(frozen=True, slots=True)
class Weights:
    """Nonnegative pooling weights summing to one."""

    beta: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_readonly(self.beta)
        object.__setattr__(self, "beta", arr)
        _require_finite(arr, "weights")
        if np.any(arr < 0.0):
            raise ParamOutOfRange("weights must be nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise NotNormalized(
                f"weights sum to {total!r}, expected 1 within {NORM_TOL}"
            )

    @property
    def n(self) -> int:
        return int(self.beta.shape[0])

    @property
    def strict(self) -> bool:
        """True when every weight is strictly positive."""
        return bool(np.all(self.beta > 0.0))

    @staticmethod
    def uniform(n: int) -> "Weights":
        if n < 1:
            raise ParamOutOfRange("need at least one weight")
        return Weights(np.full(n, 1.0 / n))


@dataclass(frozen=True, slots=True)
class ScoreFn:
    """A finite real-valued function on an outcome space."""

    space: OutcomeSpace
    f: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_readonly(self.f)
        object.__setattr__(self, "f", arr)
        _require_length(arr, self.space.size, "score function")
        _require_finite(arr, "score function")

    @staticmethod
    def zero(space: OutcomeSpace) -> "ScoreFn":
        return ScoreFn(space, np.zeros(space.size))


def _values(f) -> np.ndarray:
    """Accept either a ScoreFn or a bare array for the scalar helpers below."""
    if isinstance(f, ScoreFn):
        return f.f
    return np.asarray(f, dtype=float)


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------

def make_dist(space: OutcomeSpace, raw: Iterable[float]) -> Dist:
    """Normalize strictly positive raw weights into a :class:`Dist`.

    Raises :class:`NonPositiveEntry` on any entry <= 0 — zeros are rejected
    outright rather than handled by support reduction.
    """
    arr = np.array(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float)
    _require_length(arr, space.size, "raw weight vector")
    _require_finite(arr, "raw weight vector")
    if np.any(arr <= 0.0):
        raise NonPositiveEntry("raw weights must all be > 0")
    p = arr / arr.sum()
    # one more pass pins the sum to 1 exactly within float rounding
    p = p / p.sum()
    return Dist(space, p)


def dist_from_log_weights(space: OutcomeSpace, log_w: Iterable[float]) -> Dist:
    """Exponentiate-and-normalize with a max shift (softmax).

    The entry form every pooled/tilted distribution in the package goes
    through; finite log-weights of any magnitude are safe.
    """
    lw = np.asarray(log_w, dtype=float).reshape(-1)
    _require_length(lw, space.size, "log-weight vector")
    _require_finite(lw, "log-weight vector")
    shifted = lw - lw.max()
    w = np.exp(shifted)
    p = w / w.sum()
    p = p / p.sum()
    return Dist(space, p)


def uniform(space: OutcomeSpace) -> Dist:
    return Dist(space, np.full(space.size, 1.0 / space.size))


# ---------------------------------------------------------------------------
# Scalar functionals
# ---------------------------------------------------------------------------

def log_sum_exp(values: Iterable[float]) -> float:
    v = np.asarray(values, dtype=float)
    m = v.max()
    return float(m + np.log(np.exp(v - m).sum()))


def entropy(P: Dist) -> float:
    """Shannon entropy in nats; lies in [0, log m]."""
    return float(-(P.p * P.log_p).sum())


def kl(P: Dist, Q: Dist) -> float:
    """KL divergence sum_o P(o) log(P(o)/Q(o)) in nats; >= 0, 0 iff P=Q."""
    _require_same_space(P, Q)
    return float((P.p * (P.log_p - Q.log_p)).sum())


def tv(P: Dist, Q: Dist) -> float:
    """Total variation distance (half the L1 distance)."""
    _require_same_space(P, Q)
    return float(0.5 * np.abs(P.p - Q.p).sum())


def expect(P: Dist, f) -> float:
    vals = _values(f)
    if isinstance(f, ScoreFn):
        _require_same_space(P, f)
    else:
        _require_length(vals, P.space.size, "score vector")
    return float((P.p * vals).sum())


def cov(P: Dist, f, g) -> float:
    """Covariance under P, computed from centered values for stability."""
    fv = _values(f) - expect(P, f)
    gv = _values(g) - expect(P, g)
    return float((P.p * fv * gv).sum())


def inner_p(P: Dist, f, g) -> float:
    """The P-weighted inner product sum_o P(o) f(o) g(o)."""
    fv = _values(f)
    gv = _values(g)
    if isinstance(f, ScoreFn):
        _require_same_space(P, f)
    if isinstance(g, ScoreFn):
        _require_same_space(P, g)
    return float((P.p * fv * gv).sum())


def norm_p(P: Dist, f) -> float:
    """The norm induced by :func:`inner_p`."""
    return float(np.sqrt(max(inner_p(P, f, f), 0.0)))


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------

def event_indices(
    space: OutcomeSpace, event: Sequence[int], *, allow_full: bool = False
) -> tuple[int, ...]:
    """Canonicalize an outcome subset to a sorted duplicate-free index tuple.

    Rejects empty events always, and full events unless ``allow_full``.
    """
    idx = sorted({int(i) for i in event})
    for i in idx:
        if i < 0 or i >= space.size:
            raise IndexOutOfRange(f"outcome index {i} outside [0, {space.size})")
    if len(idx) == 0:
        raise EmptyOrFullEvent("event must be nonempty")
    if not allow_full and len(idx) == space.size:
        raise EmptyOrFullEvent("event must be a proper subset of the outcomes")
    return tuple(idx)


def indicator(space: OutcomeSpace, event: Sequence[int]) -> ScoreFn:
    idx = event_indices(space, event, allow_full=True)
    f = np.zeros(space.size)
    f[list(idx)] = 1.0
    return ScoreFn(space, f)


def coarse_grain_bound(
    P: Dist, Q: Dist, event: Sequence[int]
) -> tuple[float, float]:
    """KL(P||Q) and its two-cell coarse-graining lower bound over ``event``.

    Returns ``(kl_value, binary_bound)`` where the bound collapses the space
    to {event, complement}; ``kl_value >= binary_bound`` always, with
    equality exactly when P/Q is constant on the event and on its complement.
    """
    _require_same_space(P, Q)
    idx = list(event_indices(P.space, event))
    mask = np.zeros(P.space.size, dtype=bool)
    mask[idx] = True
    pa = float(P.p[mask].sum())
    pac = float(P.p[~mask].sum())
    qa = float(Q.p[mask].sum())
    qac = float(Q.p[~mask].sum())
    bound = pa * np.log(pa / qa) + pac * np.log(pac / qac)
    return kl(P, Q), float(bound)


# ---------------------------------------------------------------------------
# Seeded randomness
# ---------------------------------------------------------------------------

def rng_from(seed: int, *path: int) -> np.random.Generator:
    """A deterministic generator keyed by (seed, *path).

    All randomness in the package flows through this helper so a single
    CLI-level seed reproduces every draw; no wall clock, no OS entropy.
    Distinct paths give independent streams.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(x) for x in path))
    return np.random.default_rng(ss)
