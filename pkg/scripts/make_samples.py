"""Regenerate the sample configs in docs/samples."""
import json
import pathlib

import numpy as np

from fkdet import sampling, schema
from fkdet.algebra import TracialPair

out = pathlib.Path(__file__).resolve().parents[1] / "docs" / "samples"
rng = np.random.default_rng(42)
pair = TracialPair([3, 2], [0, 1], {0: 1.0, 1: 0.5})
doc = {"pair": schema.pair_to_json(pair), "tol": 1e-6, "nodes": 32,
       "inputs": [schema.operator_to_json(sampling.random_invertible_j(pair, rng, 1e3).g) for _ in range(3)]}
(out / "det.json").write_text(json.dumps(doc, indent=1) + "\n")

pair = TracialPair([2, 1], [0], {0: 1.0})
x = sampling.random_j(pair, rng, 0.5)
seg = {"t0": 0.0, "t1": 1.0, "base": schema.operator_to_json(pair.identity()),
       "generator": schema.operator_to_json(-x)}
e = pair.zeros().as_a()
e.parts[0][0, 0] = 1.0
doc = {"pair": schema.pair_to_json(pair),
       "paths": [{"segments": [seg], "expect_tau_tilde": schema.complex_to_json(complex(np.trace(x.parts[0])))},
                 {"idempotent": schema.operator_to_json(e), "expect_tau_tilde": [0.0, -2 * np.pi]}]}
(out / "chern.json").write_text(json.dumps(doc, indent=1) + "\n")

pair = TracialPair([2, 2, 1], [0, 1], {0: 1.0, 1: 0.5})
p, _ = sampling.random_projection_j(pair, rng)
doc = {"pair": schema.pair_to_json(pair),
       "projections": [{"e": schema.operator_to_json(p), "f": schema.operator_to_json(pair.zeros())},
                       {"e": schema.operator_to_json(p), "f": schema.operator_to_json(p)}]}
(out / "bott.json").write_text(json.dumps(doc, indent=1) + "\n")

doc = {"pair": {"blocks": [3, 2, 2], "finite_mask": [0, 1], "weights": {"0": 1.0, "1": 0.5}}, "seed": 1}
(out / "verify.json").write_text(json.dumps(doc, indent=1) + "\n")
