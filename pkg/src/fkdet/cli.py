"""Command-line front end.

Subcommands ``det``, ``chern``, ``bott`` and ``verify`` read one JSON
config, print a report on stdout (JSON or CSV) and exit with

* 0 when every check passes,
* 1 when some check fails,
* 2 on usage or parse errors,
* 3 on numeric failure (singular input, quadrature not converging).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import jsonschema
import numpy as np

from . import schema
from .algebra import GPairElement, mat_trace, tau
from .chern import ch_rel, rel_log, tau_tilde
from .det import det_closed, det_fk
from .errors import FKError, NumericFailure
from .ktheory import bott_class, boundary, in_lattice, winding_subgroup
from .verify import DEFAULT_PAIR, Check, run_all

__all__ = ["main", "cmd_det", "cmd_chern", "cmd_bott", "cmd_verify", "render"]

DEFAULT_TOL = 1e-6
DEFAULT_NODES = 32
DEFAULT_TRIALS = 200

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return schema.complex_to_json(v)
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _row(c):
    return {
        "name": c.name,
        "value": _jsonable(c.value),
        "reference": _jsonable(c.reference),
        "deviation": float(c.deviation),
        "tolerance": float(c.tolerance),
        "passed": c.passed,
    }


def _report(command, checks, **extra):
    out = {"command": command, "checks": [_row(c) for c in checks],
           "passed": all(c.passed for c in checks)}
    out.update({k: _jsonable(v) for k, v in extra.items()})
    return out


def _need_pair(doc):
    if "pair" not in doc:
        raise UsageError("config needs a 'pair'")
    return schema.config_pair(doc)


def cmd_det(doc, tol=DEFAULT_TOL, nodes=DEFAULT_NODES):
    """``det_fk`` and ``det_closed`` for each entry of ``inputs``."""
    pair = _need_pair(doc)
    inputs = doc.get("inputs") or []
    if not inputs:
        raise UsageError("det needs at least one operator in 'inputs'")
    gs = [GPairElement.from_element(schema.operator_from_json(op, pair)) for op in inputs]
    checks = []
    for i, g in enumerate(gs):
        fk, closed = det_fk(g, nodes), det_closed(g)
        checks.append(Check(f"det[{i}]", fk, closed, abs(fk - closed) / closed, tol))
    return _report("det", checks, pair=schema.pair_to_json(pair))


def cmd_chern(doc, tol=DEFAULT_TOL, nodes=DEFAULT_NODES):
    """``tau_tilde`` and ``ch_rel`` of each path in ``paths``.

    Each path gets a quadrature-error check; paths carrying
    ``expect_tau_tilde`` are also compared against it.
    """
    pair = _need_pair(doc)
    specs = doc.get("paths") or []
    if not specs:
        raise UsageError("chern needs at least one entry in 'paths'")
    paths = [schema.path_from_json(d, pair) for d in specs]
    checks, values = [], []
    for i, (d, sigma) in enumerate(zip(specs, paths)):
        _, err = rel_log(sigma, nodes, return_error=True)
        tt = tau_tilde(sigma, nodes)
        ch = ch_rel(sigma, nodes)
        values.append({"tau_tilde": tt, "ch_rel": schema.operator_to_json(ch)})
        checks.append(Check(f"chern[{i}].quadrature", err, 0.0, err, tol))
        if "expect_tau_tilde" in d:
            ref = schema._entry(d["expect_tau_tilde"])
            checks.append(Check(f"chern[{i}].tau_tilde", tt, ref, abs(tt - ref), tol))
    return _report("chern", checks, pair=schema.pair_to_json(pair), paths=values)


def cmd_bott(doc, tol=DEFAULT_TOL, nodes=DEFAULT_NODES):
    """``tau_tilde`` of the Bott loop of each ``(e, f)`` in ``projections``.

    The reference is ``-2 pi i tau(tr(e - f))``; a second check asks that
    the value lie in the winding lattice.
    """
    pair = _need_pair(doc)
    specs = doc.get("projections") or []
    if not specs:
        raise UsageError("bott needs at least one entry in 'projections'")
    ef = [(schema.operator_from_json(d["e"], pair), schema.operator_from_json(d["f"], pair)) for d in specs]
    loops = [boundary(bott_class(e, f)) for e, f in ef]
    gens = winding_subgroup(pair)
    checks = []
    for i, ((e, f), loop) in enumerate(zip(ef, loops)):
        tt = tau_tilde(loop, nodes)
        ref = -2j * np.pi * tau(mat_trace((e - f).to_ideal()))
        checks.append(Check(f"bott[{i}].trace", tt, ref, abs(tt - ref), tol))
        ok = in_lattice(tt, gens, tol=tol)
        checks.append(Check(f"bott[{i}].lattice", tt, "winding lattice", 0.0 if ok else 1.0, 0.0))
    return _report("bott", checks, pair=schema.pair_to_json(pair), winding_generators=gens)


def cmd_verify(doc, seed, tol=DEFAULT_TOL, nodes=DEFAULT_NODES, trials=DEFAULT_TRIALS):
    """Every invariant suite with randomness derived from ``seed``."""
    pair = schema.config_pair(doc) if "pair" in doc else DEFAULT_PAIR
    checks = run_all(pair, seed=seed, trials=trials, nodes=nodes, tol=tol)
    return _report("verify", checks, pair=schema.pair_to_json(pair), seed=seed, trials=trials)


def render(report, fmt="json"):
    """Serialize a report; the output depends only on its contents."""
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "value", "reference", "deviation", "tolerance", "passed"])
    for r in report["checks"]:
        w.writerow([r["name"], json.dumps(r["value"]), json.dumps(r["reference"]),
                    repr(r["deviation"]), repr(r["tolerance"]), "pass" if r["passed"] else "fail"])
    return buf.getvalue()


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _node_count(s):
    v = int(s)
    if v < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 quadrature nodes, got {s}")
    return v


def _positive_float(s):
    v = float(s)
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="fkdet", description="Semi-finite Fuglede-Kadison determinants.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("det", "determinants of the input operators"),
                        ("chern", "relative Chern character of serialized paths"),
                        ("bott", "Bott loops of projection pairs"),
                        ("verify", "seeded invariant suites")]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", required=name != "verify", help="JSON config file")
        s.add_argument("--tol", type=_positive_float, default=None)
        s.add_argument("--nodes", type=_node_count, default=None)
        s.add_argument("--format", choices=["json", "csv"], default=None)
        if name == "verify":
            s.add_argument("--trials", type=_positive_int, default=None)
            s.add_argument("--seed", type=int, default=None)
    return p


def _resolve(args, doc, key, default):
    v = getattr(args, key, None)
    if v is None:
        v = doc.get(key, default)
    return v


def run(argv=None, stdout=None, stderr=None):
    """Entry point returning the exit code instead of calling ``sys.exit``."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE

    try:
        doc = schema.load(args.config) if args.config else {}
        tol = _resolve(args, doc, "tol", DEFAULT_TOL)
        nodes = _resolve(args, doc, "nodes", DEFAULT_NODES)
        fmt = _resolve(args, doc, "format", "json")
        if args.command == "verify":
            seed = _resolve(args, doc, "seed", None)
            if seed is None:
                raise UsageError("verify needs --seed (or 'seed' in the config)")
            trials = _resolve(args, doc, "trials", DEFAULT_TRIALS)
            report = cmd_verify(doc, seed, tol, nodes, trials)
        else:
            report = {"det": cmd_det, "chern": cmd_chern, "bott": cmd_bott}[args.command](doc, tol, nodes)
    except NumericFailure as exc:
        print(f"fkdet: numeric failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError, ValueError, FKError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        print(f"fkdet: {type(exc).__name__}: {msg}", file=stderr)
        return EXIT_USAGE

    stdout.write(render(report, fmt))
    for r in report["checks"]:
        if not r["passed"]:
            print(f"fkdet: check failed: {r['name']} deviation {r['deviation']:.3e} > {r['tolerance']:.1e}",
                  file=stderr)
    return EXIT_PASS if report["passed"] else EXIT_FAIL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
