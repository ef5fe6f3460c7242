"""Command-line front end: ``flataffine <command> ...``.

Exit codes: 0 everything matched, 1 some expectation failed, 2 input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys

import jsonschema

from . import __version__
from .connection import (connection_from_json, curvature, is_flat_affine,
                         nonzero_components, torsion)
from .deck import catalog_keys, etale_example, span_equal, surface_catalog
from .errors import FlatAffineError, ParseError, SchemaError
from .exppoly import Domain, VectorField, exppoly_from_json, parse_field
from .flows import (DEFAULT_T_MAX, NumericParamEnv, completeness_probe,
                    closed_form_flows, verify_flow)
from .infaff import Ansatz, default_ansatz, parse_weights, solve_infaff
from .lsa import (check_associative, check_flat_product, check_left_symmetric,
                  check_torsion_free_product, descent_report, load_algebra)

SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "version", "command", "inputs_digest", "results", "match"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "version": {"type": "string"},
        "command": {"type": "array", "items": {"type": "string"}},
        "inputs_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "results": {"type": ["object", "array"]},
        "match": {"type": ["boolean", "null"]},
    },
    "additionalProperties": False,
}


class InputError(Exception):
    """Bad command-line input; exit code 2."""


def validate_report(report):
    jsonschema.validate(report, REPORT_SCHEMA)
    return report


def _digest(inputs):
    blob = json.dumps(inputs, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path):
    text = _read(path)
    try:
        return text, json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", exc.pos) from None


# commands -------------------------------------------------------------------------------

def cmd_surfaces(args):
    keys = catalog_keys() if args.key == "all" else [args.key]
    results = []
    for key in keys:
        entry = surface_catalog(key)
        basis = entry.invariant_basis()
        results.append({
            "surface": key,
            "domain": str(entry.domain),
            "generators": [repr(g) for g in entry.action.generators],
            "invariant_dim": len(basis),
            "basis": [str(X) for X in basis],
            "expected_dim": entry.expected_dim,
            "expected_description": entry.expected_description,
            "match": len(basis) == entry.expected_dim,
        })
    match = all(r["match"] for r in results)
    return {"key": args.key}, {"surfaces": results, "count": len(results)}, match


def _text_surfaces(results):
    lines = []
    for r in results["surfaces"]:
        flag = "ok" if r["match"] else "MISMATCH"
        lines.append(f"{r['surface']:<14} {r['domain']:<15} dim {r['invariant_dim']} "
                     f"(expected {r['expected_dim']}) {flag}  [{', '.join(r['basis'])}]")
    return lines


_LSA_CHECKS = {
    "left_symmetric": check_left_symmetric,
    "flat": check_flat_product,
    "torsion_free": check_torsion_free_product,
    "associative": check_associative,
}


def cmd_lsa(args):
    text, obj = _read_json(args.file)
    a, h, m = load_algebra(obj)
    wanted = [k for k in (*_LSA_CHECKS, "descent") if getattr(args, k)]
    if args.all or not wanted:
        wanted = [*_LSA_CHECKS, "descent"]
    results = {"dim": a.dim}
    for k in wanted:
        if k == "descent":
            results["descent"] = descent_report(a, h, m)
        else:
            results[k] = _LSA_CHECKS[k](a)
    return {"file": text, "checks": wanted}, results, None


def cmd_conn(args):
    text, obj = _read_json(args.file)
    try:
        c = connection_from_json(obj)
    except (TypeError, AttributeError):
        raise SchemaError("malformed connection document") from None
    tor = nonzero_components(torsion(c), 3)
    cur = nonzero_components(curvature(c), 4)
    fmt = lambda comps: [{"index": [i + 1 for i in idx], "fn": str(v)} for idx, v in comps]  # noqa: E731
    results = {"dim": c.dim, "domain": str(c.domain), "torsion_free": not tor, "flat": not cur,
               "flat_affine": is_flat_affine(c), "torsion": fmt(tor), "curvature": fmt(cur)}
    return {"file": text}, results, None


def cmd_infaff(args):
    text, obj = _read_json(args.file)
    c = connection_from_json(obj)
    if args.weights is None:
        ansatz = default_ansatz(c, args.degree)
    else:
        try:
            ansatz = Ansatz(args.degree, tuple(parse_weights(args.weights, c.dim)), c.dim)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    B = solve_infaff(c, ansatz)
    results = B.to_json()
    results["basis_literals"] = [str(X) for X in B]
    return {"file": text, "degree": args.degree, "weights": args.weights}, results, None


EXPECTED_LIFTS = ("y*d/dy", "d/dy", "exp(-x)*d/dy", "d/dx")
EXPECTED_INCOMPLETE = ("y*d/dx - y^2*d/dy", "exp(-x)*d/dx - y*exp(-x)*d/dy")
EXPECTED_SOLVE = EXPECTED_LIFTS + EXPECTED_INCOMPLETE


def cmd_example(args):
    ex = etale_example()
    full = Domain.full(2)
    if args.which == "lift":
        lifts = [str(X) for X in ex.lifts]
        inc = [str(X) for X in ex.incomplete_lifts]
        results = {
            "map": "D(x,y) = (y*exp(x), exp(x))",
            "orbit_fields": [str(X) for X in ex.orbit_basis],
            "lifts": lifts,
            "incomplete_orbit_fields": [str(X) for X in ex.incomplete_orbit_fields],
            "incomplete_lifts": inc,
            "expected_lifts": list(EXPECTED_LIFTS),
            "expected_incomplete_lifts": list(EXPECTED_INCOMPLETE),
        }
        want = [parse_field(t, full) for t in EXPECTED_LIFTS]
        want_inc = [parse_field(t, full) for t in EXPECTED_INCOMPLETE]
        match = list(ex.lifts) == want and list(ex.incomplete_lifts) == want_inc
    elif args.which == "solve":
        B = solve_infaff(ex.connection, Ansatz(2, ((-1, 0),), 2))
        gamma = [{"index": [i + 1 for i in idx], "fn": str(v)} for idx, v in ex.connection.nonzero_symbols()]
        want = [parse_field(t, full) for t in EXPECTED_SOLVE]
        results = {"connection": gamma, "dim": B.dim, "basis": [str(X) for X in B],
                   "expected_span": list(EXPECTED_SOLVE), "span_equal": span_equal(B.fields, want)}
        match = B.dim == 6 and results["span_equal"]
    else:
        env = NumericParamEnv.parse(args.env)
        rows = []
        for fl in closed_form_flows():
            X = parse_field(fl.field_literal, full)
            rep = verify_flow(X, fl.phi, env)
            probe = completeness_probe(X, full, env, args.samples, args.t_max, args.seed)
            expect_incomplete = fl.field_literal in EXPECTED_INCOMPLETE
            rows.append({"flow": fl.name, "field": fl.field_literal, **rep.to_json(),
                         "probe": probe.to_json(),
                         "expected": "incomplete_witness" if expect_incomplete else "no_blowup_observed",
                         "match": (probe.incomplete == expect_incomplete
                                   and rep.max_defect_ode < 1e-6 and rep.max_defect_grouplaw < 1e-7)})
        results = {"flows": rows, "t_max": args.t_max, "samples": args.samples}
        match = all(r["match"] for r in rows)
    return {"which": args.which, "seed": args.seed, "env": args.env,
            "samples": getattr(args, "samples", None), "t_max": getattr(args, "t_max", None)}, results, match


def _load_field(text, domain):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        return parse_field(text.strip(), domain)
    if isinstance(obj, str):
        return parse_field(obj, domain)
    if not isinstance(obj, dict):
        raise SchemaError("field file must hold a literal or an object with 'field' or 'components'")
    if "domain" in obj and domain is None:
        domain = Domain.parse(obj["domain"])
    domain = domain or Domain.full(2)
    if "field" in obj:
        return parse_field(obj["field"], domain)
    if "components" in obj:
        comps = tuple(exppoly_from_json(c, domain.dim) for c in obj["components"])
        return VectorField(comps, domain)
    raise SchemaError("field document needs 'field' or 'components'")


def cmd_flows(args):
    text = _read(args.file)
    domain = Domain.parse(args.domain) if args.domain else None
    X = _load_field(text, domain)
    env = NumericParamEnv.parse(args.env)
    dump = [] if args.dump else None
    verdict = completeness_probe(X, X.domain, env, args.samples, args.t_max, args.seed, dump=dump)
    if args.dump:
        try:
            with open(args.dump, "w", encoding="utf-8") as fh:
                json.dump(dump, fh)
        except OSError as exc:
            raise InputError(f"cannot write {args.dump}: {exc.strerror}") from None
    results = {"field": str(X), "domain": str(X.domain), **verdict.to_json(),
               "t_max": args.t_max, "samples": args.samples,
               "note": "no_blowup_observed is not a proof of completeness"}
    return {"file": text, "domain": args.domain, "seed": args.seed, "env": args.env,
            "t_max": args.t_max, "samples": args.samples}, results, None


# parser ---------------------------------------------------------------------------

def _add_globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=("json", "text"), default=d("text"))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--env", action="append", metavar="KEY=FLOAT", default=d([]))


def build_parser():
    parser = argparse.ArgumentParser(prog="flataffine", description="Flat affine geometry toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surfaces", parents=[common], help="invariant affine fields of cataloged surfaces")
    p.add_argument("key", help="surface key such as torus:1, or 'all'")
    p.set_defaults(func=cmd_surfaces)

    p = sub.add_parser("lsa", parents=[common], help="identity checks on product algebras")
    lsub = p.add_subparsers(dest="action", required=True)
    q = lsub.add_parser("check", parents=[common])
    q.add_argument("file")
    q.add_argument("--all", action="store_true")
    q.add_argument("--left-symmetric", dest="left_symmetric", action="store_true")
    q.add_argument("--flat", action="store_true")
    q.add_argument("--torsion-free", dest="torsion_free", action="store_true")
    q.add_argument("--associative", action="store_true")
    q.add_argument("--descent", action="store_true")
    q.set_defaults(func=cmd_lsa)

    p = sub.add_parser("conn", parents=[common], help="torsion and curvature of a connection")
    csub = p.add_subparsers(dest="action", required=True)
    q = csub.add_parser("analyze", parents=[common])
    q.add_argument("file")
    q.set_defaults(func=cmd_conn)

    p = sub.add_parser("infaff", parents=[common], help="infinitesimal affine transformations")
    isub = p.add_subparsers(dest="action", required=True)
    q = isub.add_parser("solve", parents=[common])
    q.add_argument("file")
    q.add_argument("--degree", type=int, default=2)
    q.add_argument("--weights", default=None, help='weight vectors, e.g. "-1,0;0,1"')
    q.set_defaults(func=cmd_infaff)

    p = sub.add_parser("example", parents=[common], help="the etale example D(x,y)=(y e^x, e^x)")
    p.add_argument("which", choices=("lift", "solve", "flows"))
    p.add_argument("--t-max", dest="t_max", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("flows", parents=[common], help="numeric completeness probe")
    fsub = p.add_subparsers(dest="action", required=True)
    q = fsub.add_parser("probe", parents=[common])
    q.add_argument("file")
    q.add_argument("--domain", default=None, help="FullSpace(n), UpperHalfPlane, Quadrant or PuncturedPlane")
    q.add_argument("--t-max", dest="t_max", type=float, default=DEFAULT_T_MAX)
    q.add_argument("--samples", type=int, default=50)
    q.add_argument("--dump", default=None, help="write trajectory summaries to this JSON file")
    q.set_defaults(func=cmd_flows)
    return parser


def _text(report):
    r = report["results"]
    if isinstance(r, dict) and "surfaces" in r:
        lines = _text_surfaces(r)
    else:
        lines = [json.dumps(r, indent=2, default=str)]
    if report["match"] is not None:
        lines.append("match: " + ("yes" if report["match"] else "NO"))
    return "\n".join(lines)


def _join_weights(argv):
    # weight lists usually start with a minus sign, which argparse reads as a flag
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--weights" and i + 1 < len(argv):
            out.append("--weights=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None):
    """Parse ``argv``; returns (exit code, report or None, error or None, output format)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_weights(argv))
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), None, None, "text"
    try:
        NumericParamEnv.parse(args.env)
        inputs, results, match = args.func(args)
    except (FlatAffineError, InputError, ValueError, KeyError) as exc:
        return 2, None, f"error: {exc}", args.format
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": argv,
        "inputs_digest": _digest({"command": args.command, "action": getattr(args, "action", None), **inputs}),
        "results": results,
        "match": match,
    }
    validate_report(report)
    return (1 if match is False else 0), report, None, args.format


def main(argv=None):
    code, report, err, fmt = run(argv)
    if err:
        print(err, file=sys.stderr)
    if report is not None:
        if fmt == "json":
            print(json.dumps(report, indent=2, sort_keys=True, default=str))
        else:
            print(_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
