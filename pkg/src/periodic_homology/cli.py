"""Command-line front end.

Exit codes: 0 success, 1 domain failure (validation or a failed
cross-check), 2 usage or I/O problems.  Every report is JSON with sorted
keys, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from fractions import Fraction

from .builder import (
    PeriodicComplexTemplate,
    build_window,
    offset_bound,
    parse_template,
    template_from_wqg,
    validate_template,
)
from .cell_complex import euler_characteristic, homology
from .errors import InfiniteComponents, ParseError, PeriodicHomologyError
from .lattice import INFINITE
from .linalg import field_from_spec
from .mvss import (
    blowup,
    build_cover,
    compute_pages,
    nerve,
    reconstruct_homology,
    scaling_fit,
    toroidal_report,
    total_complex_check,
)
from .wqg import (
    WeightedQuotientGraph,
    betti0_periodic,
    construct_generators,
    corollary_betti,
    parse_wqg,
    weight_lattice,
)


class UsageError(Exception):
    pass


def _read(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path} must hold a JSON object")
    return doc


def _is_wqg(doc: dict) -> bool:
    return "vertices" in doc


def _load(path: str) -> tuple[PeriodicComplexTemplate, WeightedQuotientGraph | None]:
    doc = _read(path)
    try:
        if _is_wqg(doc):
            Q = parse_wqg(doc)
            return template_from_wqg(Q), Q
        return parse_template(doc), None
    except ParseError as exc:
        raise UsageError(str(exc)) from exc


def _sizes(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if any(k < 1 for k in out):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return out


def _window(T: PeriodicComplexTemplate, n: tuple[int, ...]) -> tuple[int, ...]:
    if len(n) == 1 and T.d > 1:
        return n * T.d
    if len(n) != T.d:
        raise UsageError(f"--n needs {T.d} sizes")
    return n


def _scalar(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


def _chain_json(chain: dict, labels) -> list:
    return [[labels[i][0], list(labels[i][1]), _scalar(chain[i])] for i in sorted(chain)]


def _emit(doc, out) -> None:
    out.write(json.dumps(doc, sort_keys=True, indent=2, default=_scalar))
    out.write("\n")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PERIODIC_HOMOLOGY_THREADS", "1")))
    except ValueError:
        return 1


def cmd_validate(args, out) -> int:
    doc = _read(args.path)
    try:
        if _is_wqg(doc):
            Q = parse_wqg(doc)
            validate_template(template_from_wqg(Q))
            _emit({"valid": True, "kind": "wqg", "d": Q.d, "vertices": Q.nu, "edges": Q.epsilon}, out)
        else:
            T = parse_template(doc)
            validate_template(T)
            _emit({"valid": True, "kind": "template", "d": T.d, "cells_per_dimension": T.counts()}, out)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
    return 0


def cmd_wqg_analyze(args, out) -> int:
    doc = _read(args.path)
    try:
        Q = parse_wqg(doc)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
    report: dict = {"d": Q.d, "vertices": Q.nu, "edges": Q.epsilon}
    lattices = weight_lattice(Q)
    report["components"] = [
        {
            "vertices": comp,
            "weight_lattice": [list(g) for g in W.generators],
            "index": "infinite" if W.index() == INFINITE else int(W.index()),
        }
        for comp, W in zip(Q.components(), lattices)
    ]
    b0 = betti0_periodic(Q)
    report["betti0"] = "infinite" if b0 == INFINITE else b0
    try:
        gens = construct_generators(Q)
        report["h1_count"] = len(gens.generators)
        generator_doc = gens.to_json()
        if args.max_generators is not None and len(generator_doc["h1_generators"]) > args.max_generators:
            report["h1_generators_truncated"] = len(generator_doc["h1_generators"]) - args.max_generators
            generator_doc["h1_generators"] = generator_doc["h1_generators"][: args.max_generators]
        report["generators"] = generator_doc
    except InfiniteComponents as exc:
        report["h1_count"] = None
        report["h1_error"] = str(exc)
    status = 0
    if args.window is not None:
        n = args.window
        if len(n) != Q.d:
            raise UsageError(f"--window needs {Q.d} sizes")
        b0n, b1n = corollary_betti(Q, n)
        window = {"n": list(n), "betti0": b0n, "betti1": b1n}
        if args.verify:
            direct = homology(build_window(template_from_wqg(Q), n).complex).betti
            direct = (direct + [0, 0])[:2]
            window["direct"] = direct
            window["verified"] = direct == [b0n, b1n]
            if not window["verified"]:
                status = 1
        report["window"] = window
    _emit(report, out)
    return status


def cmd_homology(args, out) -> int:
    T, _ = _load(args.path)
    field = field_from_spec(args.field)
    n = _window(T, args.n)
    W = build_window(T, n, args.flavor)
    H = homology(W.complex, field)
    degrees = []
    for q, gens in enumerate(H.generators):
        shown = gens if args.max_generators is None else gens[: args.max_generators]
        entry = {"degree": q, "betti": H.betti[q], "generators": [_chain_json(g, W.labels[q]) for g in shown]}
        if len(shown) < len(gens):
            entry["truncated"] = len(gens) - len(shown)
        degrees.append(entry)
    _emit(
        {
            "n": list(n),
            "flavor": args.flavor,
            "field": field.name,
            "cells": W.counts(),
            "betti": H.betti,
            "euler_characteristic": euler_characteristic(W.complex),
            "degrees": degrees,
        },
        out,
    )
    return 0


def cmd_mvss(args, out) -> int:
    T, _ = _load(args.path)
    field = field_from_spec(args.field)
    n = _window(T, args.n)
    W = build_window(T, n)
    C = build_cover(W)
    B = blowup(C, nerve(C, args.max_arity))
    S = compute_pages(B, field)
    S.check_pages()
    direct = homology(W.complex, field)
    report: dict = {"n": list(n), "field": field.name, "betti": direct.betti}
    sums = [0] * len(direct.betti)
    for (p, q), v in S.e_infinity.items():
        if p + q < len(sums):
            sums[p + q] += v
    checks = total_complex_check(B, field, direct)
    report["godement"] = {"diagonal_sums": sums, "matches": sums == direct.betti}
    report["total_complex_matches"] = checks
    if args.report in ("pages", "all"):
        report.update(S.to_json())
        report["rendered"] = {str(r): S.render(r) for r in sorted(S.pages, key=float)}
    else:
        report["e_infinity"] = S.to_json()["e_infinity"]
    status = 0 if sums == direct.betti and all(checks) else 1
    if args.report in ("toroidal", "all"):
        if status == 0:
            recon = reconstruct_homology(S, direct)
            report["toroidal"] = toroidal_report(S, recon, W.labels).to_json(args.max_generators)
            report["toroidal"]["note"] = "ToroidalCandidate is a heuristic verdict; level 0 certifies NonToroidal"
    _emit(report, out)
    return status


def cmd_scaling(args, out) -> int:
    T, _ = _load(args.path)
    field = field_from_spec(args.field)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = scaling_fit(T, args.sizes, args.dim, field, args.tolerance, workers=_threads())
    doc = rep.to_json()
    doc["field"] = field.name
    doc["note"] = "toroidal candidates = beta_k minus the image of the local homology of the cover elements"
    _emit(doc, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="periodic-homology", description="Homology of periodic cell complexes.")
    parser.add_argument("-o", "--output", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a template or WQG file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("wqg-analyze", help="Betti numbers and generators of a periodic graph")
    p.add_argument("path")
    p.add_argument("--window", type=_sizes)
    p.add_argument("--verify", action="store_true", help="compare with direct window homology")
    p.add_argument("--max-generators", type=int)
    p.set_defaults(func=cmd_wqg_analyze)

    p = sub.add_parser("homology", help="homology of a finite window")
    p.add_argument("path")
    p.add_argument("--n", type=_sizes, required=True)
    p.add_argument("--flavor", choices=["periodic", "truncated"], default="periodic")
    p.add_argument("--field", default="rational")
    p.add_argument("--max-generators", type=int)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("mvss", help="Mayer-Vietoris spectral sequence of a window")
    p.add_argument("path")
    p.add_argument("--n", type=_sizes, required=True)
    p.add_argument("--report", choices=["toroidal", "pages", "all"], default="all")
    p.add_argument("--field", default="rational")
    p.add_argument("--max-arity", type=int, default=32)
    p.add_argument("--max-generators", type=int)
    p.set_defaults(func=cmd_mvss)

    p = sub.add_parser("scaling", help="growth exponents over cubic windows")
    p.add_argument("path")
    p.add_argument("--sizes", type=_sizes, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--field", default="rational")
    p.add_argument("--tolerance", type=float, default=0.15)
    p.set_defaults(func=cmd_scaling)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.output:
            try:
                out = open(args.output, "w", encoding="utf-8")
            except OSError as exc:
                raise UsageError(f"cannot write {args.output}: {exc}") from exc
        try:
            return args.func(args, out)
        finally:
            if out is not sys.stdout:
                out.close()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PeriodicHomologyError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, sys.stdout)
        return 1


if __name__ == "__main__":
    sys.exit(main())
