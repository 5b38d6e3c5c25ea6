"""The ``plumb-swf`` command line."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Sequence

from .errors import ParseError, PlumbError
from .formats import (
    dumps,
    params_label,
    parse_input,
    parse_params,
    root_to_dot,
    root_to_svg,
    rows_to_csv,
)
from .invariants import FAIL, InvariantReport, analyze, verify_report
from .ktheory import ideal_json, ideal_of_An, ideal_of_smash, kappa_connected_sum, kappa_from_ideal
from .lattice import full_homology_oracle, h0_graded_root
from .plumbing import determinant, from_brieskorn
from .roots import canonical_presentation
from .spectrum import build_pin2_model, build_s1_model
from .spinc import enumerate_spinc_classes, make_class, neumann_siebenmann


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_source(src: str) -> str:
    if src == "-":
        return sys.stdin.read()
    if os.path.isfile(src):
        with open(src, encoding="utf-8") as fh:
            return fh.read()
    return src


def _graph(args):
    return parse_input(_read_source(args.input))


def _class(g, args):
    if getattr(args, "char", None):
        try:
            vec = [int(x) for x in args.char.split(",")]
        except ValueError as e:
            raise ParseError("characteristic vector must be comma-separated integers", "--char") from e
        return make_class(g, vec)
    classes = enumerate_spinc_classes(g)
    idx = getattr(args, "class_index", None) or 0
    if not 0 <= idx < len(classes):
        raise ParseError(f"class index {idx} out of range (0..{len(classes) - 1})", "--class")
    return classes[idx]


def _add_class_flags(p: argparse.ArgumentParser) -> None:
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--class", dest="class_index", type=int,
                     help="index into the class listing of `spinc` (default 0)")
    grp.add_argument("--char", help="characteristic vector, comma separated")


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args, out) -> int:
    g = _graph(args)
    r = analyze(g, _class(g, args), oracle=args.oracle)
    out.write(r.to_json())
    return 0


def cmd_root(args, out) -> int:
    g = _graph(args)
    R = canonical_presentation(h0_graded_root(g, _class(g, args)))
    if args.format == "json":
        out.write(dumps(R.to_dict()))
    elif args.format == "dot":
        out.write(root_to_dot(R))
    else:
        out.write(root_to_svg(R))
    return 0


def cmd_spectrum(args, out) -> int:
    g = _graph(args)
    R = h0_graded_root(g, _class(g, args))
    h = R.h if args.h is None else Fraction(args.h)
    model = build_pin2_model(R, h) if args.pin2 else build_s1_model(R, h)
    out.write(dumps(model.to_dict()))
    return 0


def cmd_oracle(args, out) -> int:
    g = _graph(args)
    c = _class(g, args)
    h = h0_graded_root(g, c).h if args.h is None else Fraction(args.h)
    mods = full_homology_oracle(g, c, h, max_dim=args.max_dim, u_trunc=args.u_trunc)
    res = {"h": str(h)}
    for m in mods:
        res[f"H_{m.d}"] = m.to_dict()["towers"]
        if m.torsion:
            res[f"torsion_H_{m.d}"] = [{"grading": str(q), "orders": list(v)} for q, v in m.torsion]
    out.write(dumps(res))
    return 0


def cmd_spinc(args, out) -> int:
    g = _graph(args)
    rows = []
    for i, c in enumerate(enumerate_spinc_classes(g)):
        d = {"index": i, "residue": list(c.residue), **c.to_dict()}
        if c.self_conjugate:
            d["mu_bar"] = str(neumann_siebenmann(g, c))
        rows.append(d)
    out.write(dumps(rows))
    return 0


def cmd_sum(args, out) -> int:
    inputs = []
    for path in args.reports:
        with open(path, encoding="utf-8") as fh:
            try:
                r = InvariantReport.from_json(fh.read())
            except (ValueError, KeyError) as e:
                raise ParseError(f"not a report: {e}", path) from e
        n = None if r.projective is None else r.projective[0]
        if r.mu_bar is None:
            raise ParseError("report has no mu-bar (class not self-conjugate)", path)
        inputs.append((r.mu_bar, r.delta, n))
    if args.exact:
        out.write(dumps({"kappa": kappa_connected_sum(inputs, "exact")}))
    else:
        out.write(dumps({"kappa_upper": kappa_connected_sum(inputs, "bound")}))
    return 0


def cmd_kappa_ideal(args, out) -> int:
    if args.an is not None:
        I = ideal_of_An(args.an)
    else:
        try:
            ns = [int(x) for x in args.smash.split(",")]
        except ValueError as e:
            raise ParseError("expected comma-separated integers", "--smash") from e
        I = ideal_of_smash(ns)
    out.write(dumps({"ideal": ideal_json(I), "kappa": kappa_from_ideal(I)}))
    return 0


def atlas_entry(params: tuple[int, ...]) -> tuple[tuple[int, ...], dict, list[str]]:
    """Row for one Brieskorn sphere plus the names of failed checks."""
    g = from_brieskorn(params)
    r = analyze(g, oracle=True)
    failed = [c.name for c in r.checks + tuple(verify_report(r)) if c.status == FAIL]
    row = {
        "family": "brieskorn",
        "params": params_label(params),
        "vertices": g.n,
        "det": abs(determinant(g)),
        "d": str(r.d), "delta": str(r.delta),
        "alpha": None if r.alpha is None else str(r.alpha),
        "beta": None if r.beta is None else str(r.beta),
        "gamma": None if r.gamma is None else str(r.gamma),
        "mu_bar": None if r.mu_bar is None else str(r.mu_bar),
        "kappa": None if r.kappa is None else str(r.kappa),
        "projective_n": None if r.projective is None else r.projective[0],
    }
    return params, row, failed


def run_atlas(params: Sequence[tuple[int, ...]], threads: int = 1):
    params = sorted(set(tuple(p) for p in params))
    if threads > 1 and len(params) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(atlas_entry, params))
    else:
        results = [atlas_entry(p) for p in params]
    results.sort(key=lambda t: t[0])
    return results


def cmd_atlas(args, out) -> int:
    params = parse_params(_read_source(args.params))
    results = run_atlas(params, args.threads)
    text = rows_to_csv(row for _, row, _ in results)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    bad = {params_label(p): f for p, _, f in results if f}
    if bad:
        raise PlumbError(f"verification failed: {json.dumps(bad, sort_keys=True)}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plumb-swf", description="Lattice homology, graded roots and Floer-type "
                                                "invariants of negative-definite plumbings.")
    p.add_argument("--json-errors", action="store_true", help="report errors as one-line JSON")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="full invariant report")
    a.add_argument("input")
    _add_class_flags(a)
    a.add_argument("--oracle", action="store_true", help="cross-check against the chain-complex oracle")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("root", help="graded root")
    r.add_argument("input")
    _add_class_flags(r)
    r.add_argument("--format", choices=("json", "dot", "svg"), default="json")
    r.set_defaults(func=cmd_root)

    s = sub.add_parser("spectrum", help="cell model of the spectrum")
    s.add_argument("input")
    _add_class_flags(s)
    s.add_argument("--pin2", action="store_true")
    s.add_argument("--h", help="truncation level (default: where the root is complete)")
    s.set_defaults(func=cmd_spectrum)

    o = sub.add_parser("oracle", help="brute-force lattice homology")
    o.add_argument("input")
    _add_class_flags(o)
    o.add_argument("--h")
    o.add_argument("--max-dim", type=int, default=2)
    o.add_argument("--u-trunc", type=int)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("spinc", help="list spin^c classes")
    c.add_argument("input")
    c.set_defaults(func=cmd_spinc)

    m = sub.add_parser("sum", help="kappa of a connected sum from report files")
    m.add_argument("reports", nargs="+")
    mode = m.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--bound", action="store_true")
    m.set_defaults(func=cmd_sum)

    k = sub.add_parser("kappa-ideal", help="K-theory ideal and kappa")
    src = k.add_mutually_exclusive_group(required=True)
    src.add_argument("--an", type=int)
    src.add_argument("--smash")
    k.set_defaults(func=cmd_kappa_ideal)

    t = sub.add_parser("atlas", help="batch table over a family")
    t.add_argument("--family", choices=("brieskorn",), required=True)
    t.add_argument("--params", required=True, help="file with one parameter tuple per line")
    t.add_argument("--out", help="CSV path (default stdout)")
    t.add_argument("--threads", type=int, default=1)
    t.set_defaults(func=cmd_atlas)
    return p


def _report(exc: BaseException, json_errors: bool, err) -> None:
    if json_errors:
        if isinstance(exc, PlumbError):
            d = exc.to_json()
        else:
            d = {"error": type(exc).__name__, "message": str(exc)}
        err.write(json.dumps(d, sort_keys=True) + "\n")
    else:
        err.write(f"error: {exc}\n")


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    json_errors = "--json-errors" in argv
    argv = [a for a in argv if a != "--json-errors"]
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        _report(e, json_errors, err)
        return 2
    try:
        return args.func(args, out)
    except (PlumbError, ValueError, OSError, KeyError) as e:
        _report(e, json_errors, err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
