"""JSON round-tripping with full float precision.

Serialization here is deliberately boring and deterministic: floats are
written with ``%.17g`` (enough digits to round-trip IEEE doubles exactly),
keys keep insertion order unless a canonical form is requested, and nothing
machine-generated carries wall-clock or filesystem state.  Two calls with
equal inputs produce byte-identical text.

Deserialization never repairs data.  A distribution parsed from JSON goes
straight through the :class:`~logpool.core.Dist` constructor, so an entry
that is zero, negative, or off-normalization raises the same errors a
directly constructed distribution would.
"""

from __future__ import annotations

import hashlib
import json
import json.encoder
from typing import Any

import numpy as np

from .core import Dist, OutcomeSpace, Weights
from .errors import ParseError
from .persona import CompensationReport, SuppressionPlan
from .pooling import Decomposition

__all__ = [
    "PrecisionEncoder",
    "dumps",
    "dumps_canonical",
    "loads",
    "config_hash",
    "dist_to_json",
    "dist_from_json",
    "weights_to_json",
    "weights_from_json",
    "decomposition_to_json",
    "decomposition_from_json",
    "suppression_plan_to_json",
    "compensation_report_to_json",
]


class PrecisionEncoder(json.JSONEncoder):
    """JSON encoder writing floats as ``%.17g`` and flattening numpy types."""

    def default(self, o: Any) -> Any:
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        return super().default(o)

    def iterencode(self, o: Any, _one_shot: bool = False):
        markers: dict | None = {} if self.check_circular else None

        def floatstr(
            f: float,
            allow_nan: bool = self.allow_nan,
            _inf: float = float("inf"),
            _neginf: float = -float("inf"),
        ) -> str:
            if f != f:
                text = "NaN"
            elif f == _inf:
                text = "Infinity"
            elif f == _neginf:
                text = "-Infinity"
            else:
                return format(f, ".17g")
            if not allow_nan:
                raise ValueError(f"out of range float value: {f!r}")
            return text

        indent = self.indent
        if indent is not None and not isinstance(indent, str):
            indent = " " * indent
        _iterencode = json.encoder._make_iterencode(
            markers,
            self.default,
            json.encoder.encode_basestring_ascii,
            indent,
            floatstr,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )
        return _iterencode(o, 0)


def dumps(obj: Any, indent: int | None = 2) -> str:
    """Serialize with full float precision, stable across equal inputs."""
    return json.dumps(obj, cls=PrecisionEncoder, indent=indent)


def dumps_canonical(obj: Any) -> str:
    """Compact, key-sorted form used for hashing configurations."""
    return json.dumps(
        obj, cls=PrecisionEncoder, indent=None, sort_keys=True, separators=(",", ":")
    )


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def config_hash(config: Any) -> str:
    """SHA-256 of the canonical serialization of a configuration object."""
    return hashlib.sha256(dumps_canonical(config).encode("utf-8")).hexdigest()


def dist_to_json(dist: Dist) -> dict:
    return {"labels": dist.space.all_labels(), "p": dist.p.tolist()}


def dist_from_json(obj: Any, space: OutcomeSpace | None = None) -> Dist:
    """Parse ``{"labels": [...], "p": [...]}``; labels optional.

    Passing ``space`` pins the outcome space: provided labels must match it.
    Validation is the constructor's — nothing is renormalized.
    """
    if not isinstance(obj, dict) or "p" not in obj:
        raise ParseError('a distribution is an object with a "p" array')
    p = obj["p"]
    if not isinstance(p, (list, tuple)) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in p
    ):
        raise ParseError('"p" must be an array of numbers')
    labels = obj.get("labels")
    if labels is not None:
        if not isinstance(labels, (list, tuple)) or not all(
            isinstance(x, str) for x in labels
        ):
            raise ParseError('"labels" must be an array of strings')
        labels = tuple(labels)
    if space is not None:
        if len(p) != space.size:
            raise ParseError(
                f"expected {space.size} probability entries, got {len(p)}"
            )
        if labels is not None and labels != tuple(space.all_labels()):
            raise ParseError("labels do not match the expected outcome space")
    else:
        space = OutcomeSpace(len(p), labels)
    return Dist(space, np.asarray(p, dtype=float))


def weights_to_json(weights: Weights) -> dict:
    return {"beta": weights.beta.tolist()}


def weights_from_json(obj: Any) -> Weights:
    """Parse ``{"beta": [...]}`` or a bare array of numbers."""
    if isinstance(obj, dict):
        obj = obj.get("beta")
    if not isinstance(obj, (list, tuple)) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj
    ):
        raise ParseError('weights are {"beta": [...]} or a bare array of numbers')
    return Weights(np.asarray(obj, dtype=float))


def decomposition_to_json(decomp: Decomposition) -> dict:
    return {
        "pool_kind": decomp.pool_kind,
        "weights": decomp.weights.beta.tolist(),
        "parent": dist_to_json(decomp.parent),
        "children": [dist_to_json(c) for c in decomp.children],
    }


def decomposition_from_json(obj: Any) -> Decomposition:
    """Rebuild a decomposition; the pool identity is re-verified on entry."""
    if not isinstance(obj, dict):
        raise ParseError("a decomposition is a JSON object")
    for key in ("weights", "parent", "children"):
        if key not in obj:
            raise ParseError(f'decomposition is missing "{key}"')
    kind = obj.get("pool_kind", "log")
    children_raw = obj["children"]
    if not isinstance(children_raw, list) or not children_raw:
        raise ParseError('"children" must be a non-empty array')
    first = dist_from_json(children_raw[0])
    children = [first] + [
        dist_from_json(c, space=first.space) for c in children_raw[1:]
    ]
    parent = dist_from_json(obj["parent"], space=first.space)
    weights = weights_from_json(obj["weights"])
    return Decomposition(
        parent=parent, children=tuple(children), weights=weights, pool_kind=kind
    )


def suppression_plan_to_json(plan: SuppressionPlan) -> dict[str, Any]:
    """Serialize a suppression plan, including the realized log-deviation."""
    return {
        "base": dist_to_json(plan.base),
        "delta_l": plan.delta_l.f.tolist(),
        "budget": float(plan.budget),
        "achieved": float(plan.achieved),
        "projection_norm": float(plan.projection_norm),
        "span_dim": int(plan.span_dim),
        "zero_projection": bool(plan.zero_projection),
    }


def compensation_report_to_json(report: CompensationReport) -> dict[str, Any]:
    """Serialize a compensation report: inner products, classes, and slack."""
    return {
        "h_index": int(report.h_index),
        "delta": float(report.delta),
        "budget": float(report.budget),
        "inner_products": report.inner_products.tolist(),
        "anti_indices": list(report.anti_indices),
        "aligned_indices": list(report.aligned_indices),
        "target_norm": float(report.target_norm),
        "residual_norm": float(report.residual_norm),
        "delta_l_norm": float(report.delta_l_norm),
        "lhs": float(report.lhs),
        "rhs": float(report.rhs),
        "slack": float(report.slack),
        "single_anti_aligned": bool(report.single_anti_aligned),
        "counter_index": (
            None if report.counter_index is None else int(report.counter_index)
        ),
        "counter_lower_bound": (
            None
            if report.counter_lower_bound is None
            else float(report.counter_lower_bound)
        ),
        "aligned_not_downgraded": bool(report.aligned_not_downgraded),
    }
