"""JSON document format for pairs, operators, paths and projections.

Complex numbers are written as ``[re, im]`` (a bare real number is also
accepted). An operator is a list with one row-major matrix per block.
"""
import json

import jsonschema
import numpy as np

from .algebra import AElement, TracialPair, amplify
from .paths import Segment, SmoothPath, idempotent_loop

COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": COMPLEX}}
OPERATOR = {"type": "array", "minItems": 1, "items": MATRIX}

PAIR = {
    "type": "object",
    "required": ["blocks", "finite_mask", "weights"],
    "additionalProperties": False,
    "properties": {
        "blocks": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "finite_mask": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
        "weights": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
    },
}

SEGMENT = {
    "type": "object",
    "required": ["t0", "t1", "base", "generator"],
    "additionalProperties": False,
    "properties": {
        "t0": {"type": "number"},
        "t1": {"type": "number"},
        "base": OPERATOR,
        "generator": OPERATOR,
    },
}

PATH = {
    "type": "object",
    "oneOf": [
        {"required": ["segments"]},
        {"required": ["idempotent"]},
    ],
    "properties": {
        "segments": {"type": "array", "minItems": 1, "items": SEGMENT},
        "restricted": {"type": "boolean"},
        "idempotent": OPERATOR,
        "expect_tau_tilde": COMPLEX,
    },
    "additionalProperties": False,
}

CONFIG = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "pair": PAIR,
        "amplification": {"type": "integer", "minimum": 1},
        "inputs": {"type": "array", "items": OPERATOR},
        "paths": {"type": "array", "items": PATH},
        "projections": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["e", "f"],
                "additionalProperties": False,
                "properties": {"e": OPERATOR, "f": OPERATOR},
            },
        },
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "nodes": {"type": "integer", "minimum": 2},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "format": {"enum": ["json", "csv"]},
    },
}


def validate(doc):
    """Raise ``jsonschema.ValidationError`` unless ``doc`` is a valid config."""
    jsonschema.validate(doc, CONFIG)


def load(path):
    with open(path) as fh:
        doc = json.load(fh)
    validate(doc)
    return doc


def pair_from_json(d):
    return TracialPair(d["blocks"], d["finite_mask"], {int(k): v for k, v in d["weights"].items()})


def pair_to_json(pair):
    root = pair.root()
    return {
        "blocks": list(root.blocks),
        "finite_mask": list(root.finite_mask),
        "weights": {str(k): w for k, w in root.weights},
    }


def _entry(z):
    if isinstance(z, list):
        return complex(z[0], z[1])
    return complex(z)


def matrix_from_json(rows):
    if len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return np.array([[_entry(z) for z in row] for row in rows], dtype=complex)


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m):
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def operator_from_json(op, pair):
    if len(op) != pair.nblocks:
        raise ValueError(f"operator has {len(op)} blocks, pair has {pair.nblocks}")
    return AElement(pair, [matrix_from_json(b) for b in op])


def operator_to_json(x):
    return [matrix_to_json(p) for p in x.parts]


def config_pair(doc):
    pair = pair_from_json(doc["pair"])
    n = doc.get("amplification", 1)
    return amplify(pair, n) if n > 1 else pair


def path_from_json(d, pair):
    if "idempotent" in d:
        return idempotent_loop(operator_from_json(d["idempotent"], pair))
    segs = [Segment(s["t0"], s["t1"], operator_from_json(s["base"], pair),
                    operator_from_json(s["generator"], pair)) for s in d["segments"]]
    return SmoothPath(pair, segs, restricted=d.get("restricted", True))


def path_to_json(path):
    return {
        "restricted": path.restricted,
        "segments": [
            {"t0": s.t0, "t1": s.t1, "base": operator_to_json(s.base), "generator": operator_to_json(s.generator)}
            for s in path.segments
        ],
    }
