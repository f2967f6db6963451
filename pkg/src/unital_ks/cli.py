"""Command-line front end.

Every command prints one JSON object (the scan writes CSV) and exits with
0 for an affirmative verdict, 1 for a negative one and 2 on bad input.

Map files are JSON objects holding exactly one of::

    {"lambda": [l1, l2, l3], "T": [[...], [...], [...]]}
    {"family": {"a": 0.5, "k": 0.4}}
    {"builtin": "identity"}            # or "transposition"
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import choi, family, ks, maps
from .exceptions import InvalidParams, InvalidRange, MapDocumentError
from .maps import UnitalQubitMap
from .numerics import OptimizerConfig

__all__ = ["main", "parse_map_document", "load_map"]

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2
BUILTINS = {"identity": maps.identity_map, "transposition": maps.transposition_map}
_FORMS = ("lambda", "T", "family", "builtin")


# ---------------------------------------------------------------------------
# Map documents
# ---------------------------------------------------------------------------


def _position(text: str, offset: int):
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _key_position(text: str, key: str):
    i = text.find(json.dumps(key))
    return _position(text, max(i, 0))


def _real(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{what} must be a real number")
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite")
    return float(value)


def _vector(value, n, what):
    if not isinstance(value, list) or len(value) != n:
        raise ValueError(f"{what} must be a list of {n} numbers")
    return [_real(v, f"{what}[{i}]") for i, v in enumerate(value)]


def parse_map_document(text: str) -> UnitalQubitMap:
    """Parse a map document; raise MapDocumentError with a line/column on failure."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapDocumentError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise MapDocumentError("map document must be a JSON object")
    for key in doc:
        if key not in _FORMS:
            raise MapDocumentError(f"unknown key {key!r}", *_key_position(text, key))

    forms = [name for name, keys in (("matrix", ("lambda", "T")), ("family", ("family",)),
                                     ("builtin", ("builtin",))) if any(k in doc for k in keys)]
    if len(forms) != 1:
        raise MapDocumentError(
            "expected exactly one of {lambda, T}, {family} or {builtin}, found "
            + (", ".join(forms) if forms else "none")
        )
    form = forms[0]
    key = next(k for k in _FORMS if k in doc)
    try:
        if form == "matrix":
            if not {"lambda", "T"} <= set(doc):
                raise ValueError("'lambda' and 'T' must be given together")
            key = "lambda"
            lam = _vector(doc["lambda"], 3, "lambda")
            key = "T"
            if not isinstance(doc["T"], list) or len(doc["T"]) != 3:
                raise ValueError("T must be a list of 3 rows")
            T = [_vector(row, 3, f"T[{i}]") for i, row in enumerate(doc["T"])]
            return UnitalQubitMap(lam, T)
        if form == "family":
            fam = doc["family"]
            if not isinstance(fam, dict) or set(fam) != {"a", "k"}:
                raise ValueError("family must be an object with exactly the keys 'a' and 'k'")
            p = family.FamilyParams(_real(fam["a"], "a"), _real(fam["k"], "k"))
            return family.make_map(p)
        name = doc["builtin"]
        if name not in BUILTINS:
            raise ValueError(f"builtin must be one of {sorted(BUILTINS)}, got {name!r}")
        return BUILTINS[name]()
    except (ValueError, InvalidParams) as exc:
        raise MapDocumentError(str(exc), *_key_position(text, key)) from None


def load_map(path: str) -> UnitalQubitMap:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise MapDocumentError(f"cannot read {path}: {exc}") from None
    return parse_map_document(text)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _complex(z):
    return [float(np.real(z)), float(np.imag(z))]


def _emit(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, indent=2, allow_nan=False) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_positivity(args) -> int:
    phi = load_map(args.map)
    cfg = OptimizerConfig(starts=args.starts, seed=args.seed)
    v = maps.is_positive(phi, cfg, tol=args.tol)
    _emit({
        "positive": v.positive,
        "margin": _num(v.margin),
        "max_g": _num(v.max_g),
        "witness_w": None if v.witness is None else [float(c) for c in v.witness],
        "seed": args.seed,
    })
    return EXIT_OK if v.positive else EXIT_NEGATIVE


def cmd_ks(args) -> int:
    phi = load_map(args.map)
    report = ks.verify_ks(phi, OptimizerConfig(starts=args.budget, seed=args.seed), tol=args.tol)
    witness = None
    if report.witness is not None:
        witness = {"w0": _complex(report.witness.w0), "w": [_complex(c) for c in report.witness.w]}
    _emit({
        "verdict": report.verdict.value,
        "witness": witness,
        "min_defect_eigenvalue": _num(report.min_defect_eigenvalue),
        "samples_evaluated": report.samples_evaluated,
        "seed": report.seed,
    })
    return EXIT_NEGATIVE if report.violation else EXIT_OK


def cmd_scan(args) -> int:
    if args.out is not None:
        parent = os.path.dirname(os.path.abspath(args.out))
        if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
            raise MapDocumentError(f"cannot write {args.out}")
    cfg = OptimizerConfig(starts=args.budget, seed=args.seed)
    cells = family.scan_region(
        args.a_min, args.a_max, args.k_min, args.k_max, args.step, cfg, workers=args.workers
    )
    text = family.region_csv(cells)
    counts = {
        "cells": len(cells),
        "positive": sum(c.positive for c in cells),
        "thm46": sum(c.thm46 for c in cells),
        ks.Verdict.VIOLATION_FOUND.value: sum(c.ks_numeric is ks.Verdict.VIOLATION_FOUND for c in cells),
        ks.Verdict.NO_VIOLATION_FOUND.value: sum(
            c.ks_numeric is ks.Verdict.NO_VIOLATION_FOUND for c in cells
        ),
    }
    summary = " ".join(f"{k}={v}" for k, v in counts.items()) + f" seed={args.seed}"
    if args.out is None:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise MapDocumentError(f"cannot write {args.out}: {exc}") from None
        print(summary)
    return EXIT_OK


def cmd_choi(args) -> int:
    phi = load_map(args.map)
    W = choi.choi_matrix(phi, normalized=args.normalized)
    vals = choi.spectrum(W).eigenvalues
    _emit({
        "eigenvalues": [float(v) for v in vals],
        "trace": W.trace,
        "normalized": W.normalized,
    })
    return EXIT_OK


def cmd_witness(args) -> int:
    phi = load_map(args.map)
    W = choi.choi_matrix(phi, normalized=args.normalized)
    r = choi.is_entanglement_witness(W, phi, samples=args.samples, seed=args.seed, tol=args.tol)
    _emit({
        "positive": r.positive,
        "not_completely_positive": r.not_cp,
        "separable_nonnegative": r.separable_ok,
        "is_witness": r.is_witness,
        "min_eigenvalue": _num(r.min_eigenvalue),
        "min_separable_value": _num(r.min_separable_value),
        "entangled_state_value": _num(r.entangled_value),
        "samples": r.samples,
        "seed": r.seed,
    })
    return EXIT_OK if r.is_witness else EXIT_NEGATIVE


def family_report(a: float, k: float, budget: int = 10_000, seed: int = 42) -> dict:
    p = family.FamilyParams(a, k)
    out = {"a": p.a, "k": p.k}
    defined = []
    for name, fn in (("m1", family.m1), ("m2", family.m2), ("m3", family.m3), ("m4", family.m4)):
        val, reason = family.maybe(fn, p)
        out[name] = _num(val)
        out[name + "_reason"] = reason
        if val is not None:
            defined.append((name, val))
    out["thm46"] = family.theorem_predicate(p)
    out["example_5_1"] = family.example_5_1_predicate(p.k) if p.a == 1.0 else None
    cfg = OptimizerConfig(seed=seed)
    (x, y), fmax = family.maximize_F(p, cfg)
    out["numeric_F_max"] = fmax
    out["numeric_F_argmax"] = [x, y]

    phi = family.make_map(p)
    pos = maps.is_positive(phi, cfg)
    report = ks.verify_ks(phi, cfg.with_starts(budget))
    out["positive"] = pos.positive
    out["ks_numeric"] = report.verdict.value
    out["min_defect_eigenvalue"] = _num(report.min_defect_eigenvalue)
    out["seed"] = seed

    notes = []
    for name, val in defined:
        if val > fmax + 1e-9:
            notes.append(f"{name} = {val:.6g} exceeds the numeric maximum of F; not an attained value")
    if defined and fmax > max(v for _, v in defined) + 1e-4:
        notes.append(
            f"numeric maximum of F at (x, y) = ({x:.4f}, {y:.4f}) exceeds every closed-form candidate"
        )
    if out["thm46"] and report.violation:
        notes.append("thm46 holds but the defect search found a violation")
    if out["example_5_1"] and report.violation:
        notes.append("example_5_1 holds but the defect search found a violation")
    if out["example_5_1"] and not pos.positive:
        notes.append("example_5_1 holds but the map is not positive")
    out["notes"] = notes
    return out


def cmd_family(args) -> int:
    _emit(family_report(args.a, args.k, args.budget, args.seed))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _pos_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unital-ks", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg_int, default=42)
    common.add_argument("--tol", type=float, default=1e-8)

    with_map = argparse.ArgumentParser(add_help=False)
    with_map.add_argument("--map", required=True, help="map JSON file, or - for stdin")

    p = sub.add_parser("positivity", parents=[common, with_map], help="decide positivity")
    p.add_argument("--starts", type=_pos_int, default=256)
    p.set_defaults(func=cmd_positivity)

    p = sub.add_parser("ks", parents=[common, with_map], help="search for a KS violation")
    p.add_argument("--budget", type=_pos_int, default=10_000)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("scan", parents=[common], help="scan the (a, k) family and write CSV")
    p.add_argument("--a-min", type=float, default=0.0)
    p.add_argument("--a-max", type=float, default=1.0)
    p.add_argument("--k-min", type=float, default=0.0)
    p.add_argument("--k-max", type=float, default=math.sqrt(2.0))
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--budget", type=_pos_int, default=10_000)
    p.add_argument("--workers", type=_pos_int, default=1)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("choi", parents=[with_map], help="Choi matrix spectrum")
    p.add_argument("--normalized", action="store_true")
    p.set_defaults(func=cmd_choi)

    p = sub.add_parser("witness", parents=[common, with_map], help="entanglement-witness checks")
    p.add_argument("--samples", type=_pos_int, default=10_000)
    p.add_argument("--normalized", action="store_true")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("family", parents=[common], help="closed forms for the (a, k) family")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--budget", type=_pos_int, default=10_000)
    p.set_defaults(func=cmd_family)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MapDocumentError, InvalidParams, InvalidRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
