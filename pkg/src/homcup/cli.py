"""``homcup``: JSON experiment specs in, append-only JSON reports out.

Exit codes: 0 when every requested certification passes, 1 on a failed
certification (the failing certificate is embedded in the report), 2 on a
malformed spec or unknown suite.
"""

import argparse
import hashlib
import json
import sys
import time

import jsonschema
import numpy as np

from . import __version__
from ._accel import backend, set_threads

_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}
_LOCALS = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["trivial", "explicit", "rs", "random"]},
        "locals": {"type": "array", "items": _MATRIX},
        "m": {"oneOf": [{"type": "integer", "minimum": 1},
                        {"type": "array", "items": {"type": "integer", "minimum": 1}}]},
        "betas": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "seed": {"type": "integer", "minimum": 0},
    },
    "required": ["kind"],
    "allOf": [
        {"if": {"properties": {"kind": {"const": "explicit"}}}, "then": {"required": ["locals"]}},
        {"if": {"properties": {"kind": {"const": "rs"}}}, "then": {"required": ["m"]}},
        {"if": {"properties": {"kind": {"const": "random"}}}, "then": {"required": ["m", "seed"]}},
    ],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "homcup experiment spec",
    "type": "object",
    "properties": {
        "task": {"enum": ["describe", "params", "logicals", "cup", "invariant", "sequence", "verify",
                          "verify-suite"]},
        "field": {"type": "object", "properties": {"s": {"type": "integer", "minimum": 1, "maximum": 16},
                                                   "modulus": {"type": "integer", "minimum": 2}},
                  "additionalProperties": False},
        "base": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["complete", "s3", "cayley"]},
                "n": {"type": "integer", "minimum": 2},
                "group": {"type": "string"},
                "order": {"type": "integer", "minimum": 1},
                "generators": {"type": "array"},
                "permutations": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "double_cover": {"type": "boolean"},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "t": {"type": "integer", "minimum": 1, "maximum": 4},
        "lift": {"type": "object",
                 "properties": {"l": {"type": "integer", "minimum": 1},
                                "seed": {"type": "integer", "minimum": 0},
                                "voltage": {"type": "array", "items": {"type": "integer"}},
                                "allow_even": {"type": "boolean"}},
                 "additionalProperties": False},
        "sheaf": {"oneOf": [_LOCALS,
                            {"type": "object",
                             "properties": {"factors": {"type": "array", "items": _LOCALS, "minItems": 1}},
                             "required": ["factors"], "additionalProperties": False}]},
        "level": {"type": "integer", "minimum": 0},
        "direction": {"type": "integer", "minimum": 0},
        "anchor": {"type": "array", "items": {"type": "integer", "minimum": 0},
                   "minItems": 2, "maxItems": 2},
        "indices": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "stages": {"type": "array", "minItems": 1,
                   "items": {"type": "array", "minItems": 2, "maxItems": 2,
                             "items": {"type": ["integer", "null"], "minimum": 1}}},
        "polarized": {"type": "object",
                      "properties": {"h": _MATRIX, "h_prime": _MATRIX,
                                     "max_seeds": {"type": "integer", "minimum": 1}},
                      "required": ["h", "h_prime"], "additionalProperties": False},
        "budgets": {"type": "object",
                    "properties": {"w": {"type": "integer", "minimum": 0},
                                   "distance_mode": {"enum": ["exact_upto", "exhaustive_small",
                                                              "heuristic", "none"]},
                                   "iters": {"type": "integer", "minimum": 1},
                                   "trials": {"type": "integer", "minimum": 0}},
                    "additionalProperties": False},
        "suite": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
    },
    "additionalProperties": False,
    "allOf": [{"if": {"properties": {"task": {"enum": ["verify", "verify-suite"]}}, "required": ["task"]},
               "then": {"required": ["suite"]},
               "else": {"required": ["base", "t"]}}],
}

TASKS = ("describe", "params", "logicals", "cup", "invariant", "sequence", "verify")


class SpecError(ValueError):
    def __init__(self, msg, pointer="/"):
        super().__init__(msg)
        self.pointer = pointer


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def load_spec(path, task=None):
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}")
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} (line {exc.lineno})")
    if isinstance(spec, dict) and spec.get("task") == "verify-suite":
        spec["task"] = "verify"
    if task is not None:
        if "task" in spec and spec["task"] != task:
            raise SpecError(f"spec task {spec['task']!r} does not match subcommand {task!r}", "/task")
        spec = dict(spec, task=task)
    validate_spec(spec)
    return spec


def validate_spec(spec):
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(v.iter_errors(spec), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise SpecError(e.message, _pointer(e.absolute_path))


def spec_hash(spec):
    return hashlib.sha256(json.dumps(spec, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _clean(o):
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.ndarray):
        return _clean(o.tolist())
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    return o


# ---------------------------------------------------------------------------
# tasks; each returns (result dict, ok, failing certificate or None)

def _seed(spec):
    return int(spec.get("seed", 0))


def task_describe(spec):
    from .pipelines import make_complex
    _, X, sheaf = make_complex(spec)
    levels = []
    for p in range(X.t + 1):
        L = X.layout(sheaf, p)
        levels.append({"level": p, "cells": X.n_cells(p), "formula": X.cell_count_formula(p),
                       "dofs": L.size})
    ok = all(r["cells"] == r["formula"] for r in levels)
    return {"complex": X.to_json(), "digest": X.digest(), "group_size": X.group_size,
            "sheaf": sheaf.to_json(), "levels": levels}, ok, None


def task_params(spec):
    from .homology import css_extract, distance_search
    from .pipelines import make_complex
    _, X, sheaf = make_complex(spec)
    code = css_extract(X, sheaf, int(spec.get("level", 1)))
    b = spec.get("budgets", {})
    mode = b.get("distance_mode", "none")
    if mode != "none":
        distance_search(code, mode, w=b.get("w"), seed=_seed(spec), iters=b.get("iters", 200))
    return {"digest": X.digest(), "code": code.to_json()}, True, None


def _logical_bases(spec, X, sheaf, certify=True):
    from .homology import hgp_canonical_logicals, polarized_logicals
    dirs = [spec["direction"]] if "direction" in spec else list(range(X.t))
    if X.l == 1:
        return [hgp_canonical_logicals(X, j, sheaf=sheaf, certify=certify) for j in dirs]
    anchor = tuple(spec.get("anchor", (0, 0)))
    return [polarized_logicals(X, sheaf, anchor, direction=j, certify=certify) for j in dirs]


def task_logicals(spec):
    from .pipelines import make_complex
    _, X, sheaf = make_complex(spec)
    bases = _logical_bases(spec, X, sheaf)
    failing = None
    for b in bases:
        for i, c in enumerate(b.certificates):
            if not c.ok and failing is None:
                failing = {"kind": b.kind, "index": i, "certificate": c.to_json()}
    out = [{"kind": b.kind, "count": len(b), "provenance": b.to_json()["provenance"],
            "certificates": [c.to_json() for c in b.certificates]} for b in bases]
    return {"digest": X.digest(), "bases": out}, failing is None, failing


def task_cup(spec):
    from .cupcap import cup_multi
    from .pipelines import make_base, make_field, make_complex, polarized_diagonal
    if "polarized" in spec:
        P = spec["polarized"]
        lift = spec.get("lift", {})
        r = polarized_diagonal(make_base(spec["base"]), int(spec["t"]), int(lift.get("l", 1)),
                               np.array(P["h"]), np.array(P["h_prime"]), seed=_seed(spec),
                               max_seeds=int(P.get("max_seeds", 16)),
                               field=make_field(spec.get("field")))
        res = {"seed": r["seed"], "attempts": r["attempts"]}
        if r["seed"] is None:
            return res, False, {"obstruction": r["attempts"]}
        cert = r["certificate"]
        res.update({"values": r["values"], "diagonal": {"is_delta_diagonal": cert.is_delta_diagonal,
                                                          "count": cert.count, "constant": cert.constant},
                    "supports": {str(k): v for k, v in r["supports"].items()},
                    "logicals_certified": r["logicals_certified"]})
        return res, r["ok"], None if r["ok"] else {"diagonal": res["diagonal"]}
    _, X, sheaf = make_complex(spec)
    bases = _logical_bases(spec, X, sheaf, certify=False)
    idx = spec.get("indices", [0] * len(bases))
    if len(idx) != len(bases):
        raise SpecError("one index per direction is required", "/indices")
    xs = [b[i] for b, i in zip(bases, idx)]
    c = cup_multi(xs)
    return {"indices": idx, "level": c.p, "support": [repr(q) for q, _ in c.items()]}, True, None


def task_invariant(spec):
    from .cupcap import InvariantForm, addressable_xi, evaluation_tensor, diagonal_certificate
    from .pipelines import make_complex
    _, X, sheaf = make_complex(spec)
    if X.l != 1:
        raise SpecError("addressable invariant forms need an unlifted complex (lift.l = 1)", "/lift/l")
    bases = _logical_bases({k: v for k, v in spec.items() if k != "direction"}, X, sheaf)
    fr = [b.provenance["free_variables"] for b in bases]
    idx = spec.get("indices", [0] * X.t)
    sheaves = [b[0].sheaf for b in bases]
    xi = addressable_xi(X, tuple(f[i] for f, i in zip(fr, idx)), sheaves=sheaves)
    T = InvariantForm(xi)
    values = evaluation_tensor(T, [list(b) for b in bases])
    expect = np.zeros(values.shape, dtype=np.int64)
    expect[tuple(idx)] = 1
    trials = int(spec.get("budgets", {}).get("trials", 20))
    inv = T.invariance_check([b[i] for b, i in zip(bases, idx)], trials,
                             np.random.default_rng(_seed(spec)))
    ok = np.array_equal(values, expect) and inv["passed"]
    res = {"indices": idx, "values": values, "addressed": bool(np.array_equal(values, expect)),
           "invariance": inv, "diagonal": diagonal_certificate(values).count}
    return res, ok, None if ok else {"values": values, "invariance": inv}


def task_sequence(spec):
    from .cupcap import addressable_xi
    from .homology import hgp_canonical_logicals
    from .complexes import Sheaf
    from .induction import build_sequence, verify_preservation
    from .pipelines import make_base, make_field
    if "stages" not in spec:
        raise SpecError("sequence needs 'stages'", "/stages")
    field = make_field(spec.get("field"))
    seq = build_sequence(make_base(spec["base"]), int(spec["t"]),
                         [tuple(s) for s in spec["stages"]], seed=_seed(spec))
    X1 = seq.stages[0].X_prime
    sheaf = Sheaf.trivial(X1.t, X1.n, field)
    bases = [hgp_canonical_logicals(X1, j, sheaf=sheaf) for j in range(X1.t)]
    idx = spec.get("indices", [0] * X1.t)
    fr = bases[0].provenance["free_variables"]
    xi = addressable_xi(X1, tuple(fr[i] for i in idx))
    rep = verify_preservation(seq, [b[i] for b, i in zip(bases, idx)], xi)
    ok = rep.preserved and rep.nonzero
    return {"manifest": seq.to_json(), "preservation": rep.to_json()}, ok, \
        None if ok else {"preservation": rep.to_json()}


def task_verify(spec):
    r = verify_suite(spec["suite"])
    failing = [c for c in r["checks"] if not c["ok"]]
    return r, r["ok"], failing or None


def verify_suite(name):
    """Run a built-in suite; returns the summary dict (raises SpecError for unknown ids)."""
    from .suites import SUITES, run_suite
    if name not in SUITES:
        raise SpecError(f"unknown suite {name!r}; available: {sorted(SUITES)}", "/suite")
    return run_suite(name)


RUNNERS = {"describe": task_describe, "params": task_params, "logicals": task_logicals,
           "cup": task_cup, "invariant": task_invariant, "sequence": task_sequence,
           "verify": task_verify}


def run(spec):
    """Execute a validated spec; returns the report dict (timing under 'timing')."""
    t0 = time.time()
    result, ok, failing = RUNNERS[spec["task"]](spec)
    report = {"tool": "homcup", "version": __version__, "spec_sha256": spec_hash(spec),
              "task": spec["task"], "ok": bool(ok), "result": result}
    if failing is not None:
        report["failing_certificate"] = failing
    report["timing"] = {"seconds": round(time.time() - t0, 3), "backend": backend()}
    return _clean(report)


def write_report(report, out):
    """Append one JSON line; existing reports are never rewritten."""
    line = json.dumps(report, sort_keys=True)
    if out in (None, "-"):
        print(line)
        return
    with open(out, "a") as fh:
        fh.write(line + "\n")


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="homcup", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"homcup {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in TASKS:
        p = sub.add_parser(name)
        p.add_argument("--spec", required=(name != "verify"), help="experiment spec (JSON)")
        p.add_argument("--out", default=None, help="report file (JSON lines, appended); default stdout")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None, help="base seed (overrides the spec)")
        if name == "verify":
            p.add_argument("--suite", default=None, help="built-in suite id")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads:
        set_threads(args.threads)
    try:
        if args.spec is not None:
            spec = load_spec(args.spec, args.command)
        else:
            spec = {"task": "verify"}
        if args.command == "verify" and getattr(args, "suite", None):
            spec["suite"] = args.suite
        if args.seed is not None:
            if args.seed < 0:
                raise SpecError("seed must be non-negative", "/seed")
            spec["seed"] = args.seed
        validate_spec(spec)
        report = run(spec)
    except SpecError as exc:
        print(f"homcup: spec error at {exc.pointer}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # library-level rejections of a schema-valid spec (even lift order, bad local code, ...)
        print(f"homcup: invalid configuration: {exc}", file=sys.stderr)
        return 2
    out = args.out if args.out is not None else spec.get("out")
    write_report(report, out)
    if not report["ok"]:
        print(f"homcup: certification failed: {json.dumps(report.get('failing_certificate'))[:2000]}",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
