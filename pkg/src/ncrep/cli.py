"""Command line interface.

Each subcommand loads its input files, delegates to one library operation and
prints a report.  Exit codes: 0 success, 1 domain failure (invalid point,
non-cyclic vector, obstruction), 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cohomology import (
    deformation_check,
    ext_dimensions,
    lift_deformation,
    semicontinuity_scan,
    smooth_certificate,
    tangent_space,
)
from .errors import NCRepError, ParseError
from .exactla import RationalMatrix
from .formats import (
    format_algebra,
    format_ideal,
    format_point,
    parse_algebra_file,
    parse_family,
    parse_point,
    parse_resolution,
    parse_vector,
)
from .hilbert import PointedRep, abelianization, hilb_canonical_form, hilb_dimension_at, krylov_span
from .ncalg import format_word
from .repscheme import DEFAULT_ISO_TRIES, check_point, emit_ideal_generators, module_isomorphic, require_valid

log = logging.getLogger("ncrep")

DEGREE_WARNING = 8


class _Inputs:
    """Reads input files and remembers their digests for the report."""

    def __init__(self):
        self.digests: dict[str, str] = {}

    def read(self, path: str) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from None
        self.digests[path] = hashlib.sha256(data).hexdigest()
        return data.decode("utf-8")

    def algebra(self, path: str):
        af = parse_algebra_file(self.read(path), path)
        P = af.presentation
        if P.max_degree() > DEGREE_WARNING:
            log.warning("relation degree %d exceeds %d; cost grows like n^(2*degree)",
                        P.max_degree(), DEGREE_WARNING)
        return P

    def point(self, path: str, P):
        return parse_point(self.read(path), P.m)

    def vector(self, path: str, n: int):
        v = parse_vector(self.read(path))
        if len(v) != n:
            raise ParseError(f"{path}: vector has length {len(v)}, expected n = {n}")
        return v

    def resolution(self, path: str | None, P):
        if path is None:
            return None
        return parse_resolution(self.read(path), P)

    def digest(self) -> str:
        h = hashlib.sha256()
        for path in sorted(self.digests):
            h.update(self.digests[path].encode())
        return h.hexdigest()


def _matrix(X: RationalMatrix) -> list[list[str]]:
    return [[str(x) for x in X.row(i)] for i in range(X.rows)]


def _point_payload(p, names) -> dict:
    return {names[l]: _matrix(X) for l, X in enumerate(p.matrices)}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# handlers: each returns (payload, exit_code)

def cmd_check(args, inp):
    P = inp.algebra(args.algebra)
    p = inp.point(args.point, P)
    verdict = check_point(P, p)
    payload = {
        "valid": verdict.valid,
        "violations": [
            {"relation": v.relation, "entry": [v.i, v.j], "value": str(v.value)} for v in verdict.violations
        ],
    }
    return payload, 0 if verdict.valid else 1


def cmd_ideal(args, inp):
    P = inp.algebra(args.algebra)
    gens = emit_ideal_generators(P, args.n)
    text = format_ideal(gens, P.generator_names)
    payload = {"n": args.n, "count": len(gens)}
    if args.output:
        Path(args.output).write_text(text)
        payload["output"] = args.output
    else:
        payload["generators"] = [
            {"relation": g.relation, "entry": [g.i, g.j], "polynomial": g.polynomial.format(P.generator_names)}
            for g in gens
        ]
    return payload, 0


def cmd_tangent(args, inp):
    P = inp.algebra(args.algebra)
    p = inp.point(args.point, P)
    ker = tangent_space(P, p)
    payload = {"tangent_dim": ker.dimension, "ambient_dim": P.m * p.n * p.n}
    if args.basis:
        payload["basis"] = [[str(x) for x in v] for v in ker.basis_vectors]
    return payload, 0


def cmd_ext(args, inp):
    P = inp.algebra(args.algebra)
    p = inp.point(args.point, P)
    res2 = inp.resolution(args.resolution, P)
    return ext_dimensions(P, p, res2).as_dict(), 0


def cmd_smooth_cert(args, inp):
    P = inp.algebra(args.algebra)
    p = inp.point(args.point, P)
    res2 = inp.resolution(args.resolution, P)
    v = smooth_certificate(P, p, args.assume_coherent, res2)
    return {"verdict": v.status, "reason": v.reason, "ext": v.report.as_dict()}, 0


def cmd_deform(args, inp):
    P = inp.algebra(args.algebra)
    p = inp.point(args.point, P)
    direction = parse_point(inp.read(args.direction), P.m)
    tangent = deformation_check(P, p, direction)
    payload = {"tangent": tangent, "order": args.order}
    if not tangent:
        payload["status"] = "not-tangent"
        return payload, 1
    lift = lift_deformation(P, p, direction, args.order)
    payload["status"] = lift.status
    payload["lift"] = {
        P.generator_names[l]: [_matrix(C) for C in coeffs] for l, coeffs in enumerate(lift.series)
    }
    if not lift.lifted:
        payload["obstructed_order"] = lift.obstructed_order
        payload["obstruction"] = [str(x) for x in lift.obstruction]
        return payload, 1
    return payload, 0


def cmd_scan(args, inp):
    P = inp.algebra(args.algebra)
    text = inp.read(args.family)
    family = parse_family(text, Path(args.family).parent, P.m)
    res2 = inp.resolution(args.resolution, P)
    rows = semicontinuity_scan(P, family, res2)
    return {"rows": [r.as_dict() for r in rows]}, 0


def _pointed(args, inp):
    P = inp.algebra(args.algebra)
    p = inp.point(args.point, P)
    v = inp.vector(args.vector, p.n)
    return P, PointedRep(p, v)


def cmd_cyclic(args, inp):
    P, pr = _pointed(args, inp)
    require_valid(P, pr.point)
    dim, words = krylov_span(pr)
    payload = {
        "cyclic": dim == pr.n,
        "span_dim": dim,
        "word_basis": [format_word(w, P.generator_names) for w in words],
    }
    return payload, 0


def cmd_hilb_canon(args, inp):
    P, pr = _pointed(args, inp)
    require_valid(P, pr.point)
    cf = hilb_canonical_form(pr)
    payload = {
        "word_basis": [format_word(w, P.generator_names) for w in cf.word_basis],
        "point": _point_payload(cf.point, P.generator_names),
        "vector_index": cf.v_index,
    }
    if args.output:
        Path(args.output).write_text(format_point(cf.point, P.generator_names))
        payload["output"] = args.output
    return payload, 0


def cmd_hilb_dim(args, inp):
    P, pr = _pointed(args, inp)
    hd = hilb_dimension_at(P, pr)
    return {"dimension": hd.dimension, "tangent_dim": hd.tangent_dim, "caveats": list(hd.caveats)}, 0


def cmd_abelianize(args, inp):
    P = inp.algebra(args.algebra)
    Q = abelianization(P)
    text = format_algebra(Q)
    if args.output:
        Path(args.output).write_text(text)
    return {"relations": Q.r, "presentation": text}, 0


def cmd_iso(args, inp):
    P = inp.algebra(args.algebra)
    p = inp.point(args.point_a, P)
    q = inp.point(args.point_b, P)
    v = module_isomorphic(P, p, q, tries=args.tries, seed=args.seed)
    payload = {"status": v.status, "intertwiner_dim": v.intertwiner_dim, "attempts": v.tries}
    if v.witness is not None:
        payload["witness"] = _matrix(v.witness)
    return payload, 0


def _default_seed() -> int:
    raw = os.environ.get("REPSCHEME_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"REPSCHEME_SEED must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    # the subcommand copy must not reset a --json given before the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable report")

    parser = argparse.ArgumentParser(prog="ncrep", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable report")
    parser.add_argument("--version", action="version", version=f"ncrep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, parents=[common])
        sp.set_defaults(func=func)
        sp.add_argument("algebra", help="algebra file")
        return sp

    sp = add("check", cmd_check, "check that a point satisfies the relations")
    sp.add_argument("point")

    sp = add("ideal", cmd_ideal, "emit the generators of the ideal of Rep_A^n")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-o", "--output")

    sp = add("tangent", cmd_tangent, "tangent space dimension at a point")
    sp.add_argument("point")
    sp.add_argument("--basis", action="store_true", help="also print a kernel basis")

    sp = add("ext", cmd_ext, "dimensions of Ext^0, Ext^1, Ext^2")
    sp.add_argument("point")
    sp.add_argument("--resolution")

    sp = add("smooth-cert", cmd_smooth_cert, "smoothness certificate from Ext^2 = 0")
    sp.add_argument("point")
    sp.add_argument("--assume-coherent", action="store_true")
    sp.add_argument("--resolution")

    sp = add("deform", cmd_deform, "check and lift a first-order deformation")
    sp.add_argument("point")
    sp.add_argument("direction")
    sp.add_argument("--order", type=int, default=4)

    sp = add("scan", cmd_scan, "kernel dimensions along a family of points")
    sp.add_argument("family")
    sp.add_argument("--resolution")

    for name, func, text in [
        ("cyclic", cmd_cyclic, "is the vector cyclic for the representation"),
        ("hilb-canon", cmd_hilb_canon, "canonical form of a cyclic pair"),
        ("hilb-dim", cmd_hilb_dim, "dimension of Hilb_A^n at a cyclic pair"),
    ]:
        sp = add(name, func, text)
        sp.add_argument("point")
        sp.add_argument("vector")
        if name == "hilb-canon":
            sp.add_argument("-o", "--output", help="write the canonical point to this file")

    sp = add("abelianize", cmd_abelianize, "present the abelianization")
    sp.add_argument("-o", "--output")

    sp = add("iso", cmd_iso, "search for an isomorphism between two modules")
    sp.add_argument("point_a")
    sp.add_argument("point_b")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tries", type=int, default=DEFAULT_ISO_TRIES)
    return parser


def _render_text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_render_text(val, indent + 1))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for item in val:
                sub = _render_text(item, indent + 2)
                sub[0] = pad + "  - " + sub[0].lstrip()
                lines.extend(sub)
        elif isinstance(val, str) and "\n" in val:
            lines.append(f"{pad}{key}: |")
            lines.extend(pad + "  " + ln for ln in val.rstrip("\n").splitlines())
        elif isinstance(val, list):
            lines.append(f"{pad}{key}: {json.dumps(_jsonable(val))}")
        elif isinstance(val, bool) or val is None:
            lines.append(f"{pad}{key}: {json.dumps(val)}")
        else:
            lines.append(f"{pad}{key}: {val}")
    return lines


def make_report(command: str, inp: _Inputs, payload: dict, seed: int) -> dict:
    return {
        "command": command,
        "version": __version__,
        "inputs": dict(sorted(inp.digests.items())),
        "inputs_digest": inp.digest(),
        "seed": seed,
        "result": _jsonable(payload),
    }


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.seed = _default_seed()
    seed = args.seed
    inp = _Inputs()
    try:
        payload, code = args.func(args, inp)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NCRepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = make_report(args.command, inp, payload, seed)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(_render_text(report)))
    return code


if __name__ == "__main__":
    sys.exit(main())
