import json

import jsonschema
import numpy as np
import pytest

from fkdet import sampling, schema
from fkdet.algebra import TracialPair, amplify
from fkdet.chern import tau_tilde


def test_pair_roundtrip(pair):
    assert schema.pair_from_json(schema.pair_to_json(pair)) == pair


def test_operator_roundtrip(pair, rng):
    x = sampling.random_a(pair, rng)
    doc = json.loads(json.dumps(schema.operator_to_json(x)))
    assert schema.operator_from_json(doc, pair).allclose(x, 0.0)


def test_real_entries_accepted():
    assert np.array_equal(schema.matrix_from_json([[1, [0, 2]], [3.5, 0]]), np.array([[1, 2j], [3.5, 0]]))


def test_ragged_matrix():
    with pytest.raises(ValueError):
        schema.matrix_from_json([[1, 2], [3]])


def test_path_roundtrip(pair, rng):
    p = sampling.random_path(pair, rng, segments=2)
    q = schema.path_from_json(json.loads(json.dumps(schema.path_to_json(p))), pair)
    assert tau_tilde(q) == pytest.approx(tau_tilde(p), abs=1e-12)


def test_config_amplification(pair):
    doc = {"pair": schema.pair_to_json(pair), "amplification": 2}
    schema.validate(doc)
    assert schema.config_pair(doc) == amplify(pair, 2)


@pytest.mark.parametrize("doc", [
    {"pair": {"blocks": [2], "finite_mask": [0], "weights": {"0": -1.0}}},
    {"pair": {"blocks": [2], "finite_mask": [0], "weights": {"0": 0}}},
    {"pair": {"blocks": [0], "finite_mask": [0], "weights": {"0": 1}}},
    {"pair": {"blocks": [2], "finite_mask": [0]}},
    {"trials": 0},
    {"tol": 0},
    {"format": "xml"},
    {"unknown": 1},
    {"paths": [{"segments": [], "idempotent": [[[1]]]}]},
])
def test_invalid_configs(doc):
    with pytest.raises(jsonschema.ValidationError):
        schema.validate(doc)


def test_semantic_errors_are_value_errors():
    doc = {"pair": {"blocks": [2], "finite_mask": [1], "weights": {"1": 1.0}}}
    schema.validate(doc)
    with pytest.raises(ValueError):
        schema.config_pair(doc)
    p = TracialPair([2], [0], {0: 1.0})
    with pytest.raises(ValueError):
        schema.operator_from_json([[[1, 0], [0, 1]], [[1]]], p)
