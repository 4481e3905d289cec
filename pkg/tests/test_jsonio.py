"""JSON serialization: 17-significant-digit float fidelity, canonical
hashing, and validated round-trips for every exchanged structure."""

import json

import numpy as np
import pytest

from _gen import random_decomposition, random_dist, random_strict_weights
from logpool import (
    NotAPoolWitness,
    OutcomeSpace,
    ParseError,
    Weights,
    centered_profiles,
    compensation_bound,
    compensation_report_to_json,
    config_hash,
    decomposition_from_json,
    decomposition_to_json,
    dist_from_json,
    dist_to_json,
    dumps,
    dumps_canonical,
    loads,
    log_pool,
    make_dist,
    norm_p,
    optimal_suppression,
    rng_from,
    single_counteragent_instance,
    suppression_plan_to_json,
    weights_from_json,
    weights_to_json,
)


def test_float_round_trip_through_dumps():
    rng = rng_from(801)
    values = list(rng.random(200)) + [1e-300, 1e300, 0.1, 2.0 / 3.0]
    text = dumps({"values": values})
    back = loads(text)["values"]
    assert back == [float(v) for v in values]


def test_dumps_uses_17_significant_digits():
    text = dumps({"x": 0.1})
    assert "0.10000000000000001" in text


def test_dumps_handles_numpy_scalars_and_arrays():
    obj = {
        "arr": np.array([0.25, 0.75]),
        "i": np.int64(7),
        "f": np.float64(0.5),
        "b": np.bool_(True),
    }
    back = loads(dumps(obj))
    assert back == {"arr": [0.25, 0.75], "i": 7, "f": 0.5, "b": True}


def test_loads_rejects_malformed_documents():
    with pytest.raises(ParseError):
        loads("{not json")


def test_canonical_form_and_config_hash_are_order_insensitive():
    a = {"x": 1, "y": [1, 2], "z": 0.5}
    b = {"z": 0.5, "y": [1, 2], "x": 1}
    assert dumps_canonical(a) == dumps_canonical(b)
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({**a, "x": 2})
    assert len(config_hash(a)) == 64


def test_dist_round_trip_is_bit_exact():
    rng = rng_from(802)
    d = random_dist(rng, OutcomeSpace(5, tuple("abcde")))
    back = dist_from_json(loads(dumps(dist_to_json(d))))
    assert np.array_equal(back.p, d.p)
    assert back.space.labels == d.space.labels


def test_dist_from_json_validation():
    with pytest.raises(ParseError):
        dist_from_json({"labels": ["a"]})
    with pytest.raises(ParseError):
        dist_from_json({"p": "not an array"})
    with pytest.raises(ParseError):
        dist_from_json({"p": [0.5, True]})
    with pytest.raises(ParseError):
        dist_from_json({"p": [0.5, 0.5], "labels": [1, 2]})
    # pinning a space: wrong length or wrong labels are parse errors
    space = OutcomeSpace(3)
    with pytest.raises(ParseError):
        dist_from_json({"p": [0.5, 0.5]}, space=space)
    with pytest.raises(ParseError):
        dist_from_json(
            {"p": [0.2, 0.3, 0.5], "labels": ["x", "y", "z"]}, space=space
        )
    ok = dist_from_json({"p": [0.2, 0.3, 0.5], "labels": ["o0", "o1", "o2"]}, space=space)
    assert ok.space == space


def test_dist_from_json_does_not_renormalize():
    from logpool import NotNormalized

    with pytest.raises(NotNormalized):
        dist_from_json({"p": [0.5, 0.4]})


def test_weights_round_trip_and_bare_arrays():
    rng = rng_from(803)
    w = random_strict_weights(rng, 4)
    back = weights_from_json(loads(dumps(weights_to_json(w))))
    assert np.array_equal(back.beta, w.beta)
    bare = weights_from_json([0.5, 0.5])
    assert np.array_equal(bare.beta, [0.5, 0.5])
    with pytest.raises(ParseError):
        weights_from_json({"betas": [0.5, 0.5]})
    with pytest.raises(ParseError):
        weights_from_json("nope")


def test_decomposition_round_trip_revalidates_the_witness():
    rng = rng_from(804)
    decomp = random_decomposition(rng, 6, 3)
    doc = loads(dumps(decomposition_to_json(decomp)))
    back = decomposition_from_json(doc)
    assert np.array_equal(back.parent.p, decomp.parent.p)
    for b, c in zip(back.children, decomp.children):
        assert np.array_equal(b.p, c.p)
    # corrupt the parent: the reconstruction must refuse the witness
    bad = json.loads(json.dumps(doc))
    bad["parent"]["p"] = list(np.roll(bad["parent"]["p"], 1))
    with pytest.raises(NotAPoolWitness):
        decomposition_from_json(bad)


def test_suppression_plan_serialization_is_complete_and_json_safe():
    rng = rng_from(805)
    decomp = random_decomposition(rng, 6, 3)
    plan = optimal_suppression(centered_profiles(decomp), (1, 4), 0.02)
    doc = suppression_plan_to_json(plan)
    text = dumps(doc)  # must not raise
    back = loads(text)
    assert set(back) == {
        "base",
        "delta_l",
        "budget",
        "achieved",
        "projection_norm",
        "span_dim",
        "zero_projection",
    }
    assert back["achieved"] == plan.achieved
    assert back["budget"] == 0.02
    assert isinstance(back["zero_projection"], bool)


def test_compensation_report_serialization_is_complete_and_json_safe():
    delta, eps = 0.02, 0.005
    decomp, h, dbeta = single_counteragent_instance(delta)
    rep = compensation_bound(decomp, h, delta, eps, dbeta)
    back = loads(dumps(compensation_report_to_json(rep)))
    assert set(back) == {
        "h_index",
        "delta",
        "budget",
        "inner_products",
        "anti_indices",
        "aligned_indices",
        "target_norm",
        "residual_norm",
        "delta_l_norm",
        "lhs",
        "rhs",
        "slack",
        "single_anti_aligned",
        "counter_index",
        "counter_lower_bound",
        "aligned_not_downgraded",
    }
    assert back["counter_index"] == 1
    assert back["counter_lower_bound"] > 0.0
    assert back["slack"] == rep.slack
    assert len(back["inner_products"]) == 3
