"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 computation error (for instance a
nonzero obstruction where an extension was requested).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from .algebra import FreeCDGA
from .errors import (
    BaseMismatch,
    CDGAError,
    DegenerateDirection,
    DegreeOutOfRange,
    LevelMismatch,
    MixedAlgebra,
    NonzeroObstruction,
    ParseError,
    UnknownSchema,
    ValidationError,
)
from .homotopy import DGAMap, Homotopy, is_homotopy, zero_map

BUILTIN_IDS = ["s3", "s4", "s7", "s3xs4", "s3x(s4vs4)", "cs2-schema", "hopf-pair"]


class UsageError(Exception):
    pass


# -- output ---------------------------------------------------------------------------------

def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def _csv(payload) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    rows = payload.get("rows") if isinstance(payload, dict) else None
    if rows and isinstance(rows[0], dict):
        keys = list(rows[0])
        w.writerow(keys)
        for r in rows:
            w.writerow([json.dumps(r[k]) if isinstance(r[k], (dict, list)) else r[k] for k in keys])
    else:
        w.writerow(["key", "value"])
        for k, v in payload.items():
            w.writerow([k, json.dumps(v) if isinstance(v, (dict, list)) else v])
    return buf.getvalue()


def _text(payload, indent: str = "") -> str:
    lines = []
    for k, v in payload.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_text(v, indent + "  "))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{indent}{k}:")
            for item in v:
                lines.append(f"{indent}  - " + ", ".join(f"{a}={json.dumps(b)}" for a, b in item.items()))
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines)


def emit(payload, fmt: str, output: Optional[str]) -> None:
    payload = _plain(payload)
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    elif fmt == "csv":
        text = _csv(payload)
    else:
        text = _text(payload) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- inputs ------------------------------------------------------------------------------------

def _algebra(args, identifier: Optional[str] = None) -> FreeCDGA:
    from .zoo import load_model, model

    if getattr(args, "model_file", None):
        with open(args.model_file) as fh:
            return load_model(fh.read()).algebra
    ident = identifier or args.model
    if ident is None:
        raise UsageError("a model is required (--model or --model-file)")
    try:
        return model(ident).algebra
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


def parse_images(source: FreeCDGA, target: FreeCDGA, text: str) -> Dict[str, object]:
    """'a=2*y; b=4*z + x*y' -> {name: Element}."""
    images = {}
    for part in filter(None, (p.strip() for p in (text or "").split(";"))):
        if "=" not in part:
            raise ParseError(f"image {part!r} must look like name=polynomial")
        name, poly = (s.strip() for s in part.split("=", 1))
        if name not in source.index:
            raise ParseError(f"unknown source generator {name!r}")
        images[name] = target.parse(poly)
    return images


def _pair(args):
    from .zoo import pair

    P = pair(args.pair)
    if getattr(args, "model_file", None):
        # a model file stands in for the target of the pair
        return P.source, _algebra(args)
    return P.source, P.target


def _map(args, source, target, text) -> DGAMap:
    return DGAMap(source, target, parse_images(source, target, text))


def _rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {s!r}") from exc


# -- subcommands ------------------------------------------------------------------------------

def cmd_models(args):
    from .zoo import PAIRS, SCHEMAS, model

    if args.action == "list":
        rows = []
        for ident in BUILTIN_IDS:
            if ident == "cs2-schema":
                rows.append({"id": ident, "kind": "schema", "description": SCHEMAS[ident].description})
            elif ident == "hopf-pair":
                P = PAIRS[ident]
                rows.append({"id": ident, "kind": "pair",
                             "description": f"{P.source_id} -> {P.target_id}"})
            else:
                rows.append({"id": ident, "kind": "model", "description": model(ident).note})
        return {"rows": rows}
    ident = args.id
    if ident is None:
        raise UsageError("models show needs an identifier")
    if ident == "cs2-schema":
        S = SCHEMAS[ident]
        return {"id": ident, "kind": "schema", "invariants": S.invariants, "description": S.description}
    if ident in PAIRS:
        P = PAIRS[ident]
        return {"id": ident, "kind": "pair", "source": model(P.source_id).to_dict(),
                "target": model(P.target_id).to_dict(), "invariants": P.schema.invariants}
    try:
        return model(ident).to_dict()
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


def cmd_cohomology(args):
    from .linalg import cohomology

    alg = _algebra(args)
    H = cohomology(alg, args.degree)
    return {"model": alg.name or args.model, "degree": args.degree, "dimension": H.dimension,
            "representatives": [str(r) for r in H.representatives]}


def cmd_relcohomology(args):
    from .linalg import relative_cohomology

    alg = _algebra(args)
    if not 0 <= args.prefix <= len(alg.generators):
        raise UsageError("--prefix must count generators of the model")
    sub = alg.prefix(args.prefix)
    inc = DGAMap(sub, alg, {g.name: alg.gen(g.name) for g in sub.generators})
    H = relative_cohomology(inc, args.degree)
    return {"model": alg.name or args.model, "subalgebra": [g.name for g in sub.generators],
            "degree": args.degree, "dimension": H.dimension}


def _absolute_problem(args):
    """Extension of f over the given stage, with C = Q (no homotopy constraint)."""
    from .obstruction import ObstructionProblem

    Y, X = _pair(args)
    stages = Y.stages()
    if not 0 <= args.stage < len(stages):
        raise UsageError(f"--stage must lie in 0..{len(stages) - 1}")
    m0 = sum(len(s) for s in stages[:args.stage])
    A, AV = Y.prefix(m0), Y.prefix(m0 + len(stages[args.stage]))
    f = _map(args, A, X, args.images)
    C = FreeCDGA([], {}, truncation=X.truncation)
    return ObstructionProblem(f, zero_map(AV, C), zero_map(X, C), Homotopy(A, C, {}))


def cmd_obstruct(args):
    from .obstruction import obstruction

    if args.random:
        from .randgen import random_extension_problem

        p, kind = random_extension_problem(random.Random(args.seed))
        out = obstruction(p).to_dict()
        out.update({"kind": kind, "seed": args.seed})
        return out
    return obstruction(_absolute_problem(args)).to_dict()


def cmd_extend(args):
    from .obstruction import extend

    if args.random:
        from .randgen import random_extension_problem

        p, _ = random_extension_problem(random.Random(args.seed))
    else:
        p = _absolute_problem(args)
    f_ext, H_ext = extend(p)
    ok = is_homotopy(H_ext, p.g, p.h.compose(f_ext))
    return {"map": f_ext.to_dict(), "homotopy": {k: str(v) for k, v in H_ext.images.items()},
            "verified": ok}


def cmd_homotopy_check(args):
    from .obstruction import homotopy_between

    Y, X = _pair(args)
    f = _map(args, Y, X, args.f)
    g = _map(args, Y, X, args.g)
    try:
        H = homotopy_between(f, g)
    except NonzeroObstruction as exc:
        return {"homotopic": False, "reason": str(exc)}
    return {"homotopic": True, "verified": is_homotopy(H, f, g),
            "homotopy": {k: str(v) for k, v in H.images.items()}}


def cmd_into_w(args):
    from .obstruction import construct_W, homotope_into_W, images_in_W

    Y, X = _pair(args)
    phi = _map(args, Y, X, args.images)
    W = construct_W(X, Y)
    psi, H, trace = homotope_into_W(phi, W)
    return {"map": psi.to_dict(), "in_W": images_in_W(psi, W), "verified": is_homotopy(H, phi, psi),
            "homotopy": {k: str(v) for k, v in H.images.items()},
            "trace": [t.to_dict() for t in trace], "W": W.to_dict()}


def cmd_classify(args):
    from .zoo import classify_map, pair

    Y, X = _pair(args)
    phi = _map(args, Y, X, args.images)
    inv = classify_map(args.pair, phi)
    schema = pair(args.pair).schema
    vals = tuple(inv[k] for k in schema.invariants)
    out = {"pair": args.pair, "invariants": inv}
    if all(Fraction(v).denominator == 1 for v in vals):
        out["canonical"] = list(schema.canonical(tuple(int(v) for v in vals)))
    return out


def cmd_count(args):
    from . import growth

    if args.kind == "torsion":
        _need(args, "d")
        c = growth.torsion_count(args.d)
        return {"d": args.d, "count": c if isinstance(c, int) else str(c)}
    if args.kind == "density":
        _need(args, "alpha1", "alpha2", "R")
        out = {"alpha": [args.alpha1, args.alpha2], "R": str(args.R),
               "count": growth.density_count(args.alpha1, args.alpha2, args.R)}
        if args.oracle:
            out["oracle"] = growth.density_count_bruteforce(args.alpha1, args.alpha2, args.R)
        return out
    if args.kind == "growth":
        _need(args, "D")
        return growth.growth_count(args.D, with_oracle=args.oracle).to_dict()
    if args.kind == "gcd":
        _need(args, "N", "k")
        return growth.gcd_proportion_bounds(args.N, args.k).to_dict()
    raise UsageError(f"unknown count {args.kind!r}")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n for n in missing))


def cmd_ballbound(args):
    from .growth import S3XS4_BALL_INPUT, ball_count_bound, s3xs4_ball_classes

    dims = json.loads(args.dims) if args.dims else S3XS4_BALL_INPUT["dims"]
    polys = json.loads(args.polys) if args.polys else S3XS4_BALL_INPUT["polys"]
    out = {"R": args.R, "dims": dims, "polys": polys, "bound": ball_count_bound(dims, polys, args.R)}
    if not args.dims and not args.polys:
        out["classes"] = s3xs4_ball_classes(args.R)
        out["dominates"] = out["bound"] >= out["classes"]
    return out


def cmd_fourlemma(args):
    from .quant import four_lemma_predict, four_lemma_verify, random_diagram

    if args.action == "predict":
        v = four_lemma_predict(args.kind, C1=args.C1, C2=args.C2, C3=args.C3, C4=args.C4, tau=args.tau,
                               rk1=args.rk1, rk2=args.rk2, rk3=args.rk3)
        return {"kind": args.kind, "predicted": v}
    rows = []
    for s in range(args.seed, args.seed + args.count):
        d = random_diagram(random.Random(s))
        kinds = [args.kind] if args.kind else ["injective", "surjective"]
        for k in kinds:
            rows.append(four_lemma_verify(d, k, window=args.window, seed=s).to_dict())
    summary = {"runs": len(rows), "violations": sum(1 for r in rows if r["ok"] is False),
               "inconclusive": sum(1 for r in rows if r["inconclusive"])}
    return {"summary": summary, "rows": rows}


_COMPLEXES = {
    "circle": ([1, 1], {}),
    "s2": ([1, 0, 1], {}),
    "rp2": ([1, 1, 1], {2: [[2]]}),
    "torus": ([1, 2, 1], {}),
}


def cmd_fto1(args):
    from .quant import finite_to_one_bound

    if args.complex:
        cells, bd = _COMPLEXES[args.complex]
    else:
        if not args.cells:
            raise UsageError("give --complex or --cells")
        cells = [int(c) for c in args.cells.split(",")]
        bd = {int(k): v for k, v in json.loads(args.boundaries or "{}").items()}
    coeffs = {int(k): v for k, v in json.loads(args.coeffs or "{}").items()}
    return {"cells": cells, "coefficients": coeffs, "bound": finite_to_one_bound(cells, bd, coeffs)}


def cmd_repro(args):
    from .repro import EXAMPLES

    report = EXAMPLES[args.example]()
    args._status = 0 if report.ok else 2
    return report.to_dict()


# -- parser ---------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--model-file", dest="model_file", help="model in the text format")

    p = argparse.ArgumentParser(prog="cdgamaps", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("models", parents=[common], help="list or show built-in models")
    m.add_argument("action", choices=["list", "show"])
    m.add_argument("id", nargs="?")
    m.set_defaults(func=cmd_models)

    c = sub.add_parser("cohomology", parents=[common])
    c.add_argument("--model")
    c.add_argument("--degree", type=int, required=True)
    c.set_defaults(func=cmd_cohomology)

    r = sub.add_parser("relcohomology", parents=[common],
                       help="cohomology of the inclusion of the first generators")
    r.add_argument("--model")
    r.add_argument("--prefix", type=int, required=True, help="number of leading generators")
    r.add_argument("--degree", type=int, required=True)
    r.set_defaults(func=cmd_relcohomology)

    for name, func in (("obstruct", cmd_obstruct), ("extend", cmd_extend)):
        o = sub.add_parser(name, parents=[common])
        o.add_argument("--pair")
        o.add_argument("--images", default="", help="f on the base, e.g. 'a=2*y'")
        o.add_argument("--stage", type=int, default=0)
        o.add_argument("--random", action="store_true", help="draw a random problem from --seed")
        o.set_defaults(func=func)

    h = sub.add_parser("homotopy-check", parents=[common])
    h.add_argument("--pair", required=True)
    h.add_argument("--f", required=True)
    h.add_argument("--g", required=True)
    h.set_defaults(func=cmd_homotopy_check)

    for name, func in (("into-w", cmd_into_w), ("classify", cmd_classify)):
        w = sub.add_parser(name, parents=[common])
        w.add_argument("--pair", required=True)
        w.add_argument("--images", required=True)
        w.set_defaults(func=func)

    k = sub.add_parser("count", parents=[common])
    k.add_argument("kind", choices=["torsion", "density", "growth", "gcd"])
    k.add_argument("--d", type=int)
    k.add_argument("--alpha1", type=int)
    k.add_argument("--alpha2", type=int)
    k.add_argument("--R", type=_rational)
    k.add_argument("--D", type=int)
    k.add_argument("--N", type=int)
    k.add_argument("--k", type=int)
    k.add_argument("--oracle", action="store_true")
    k.set_defaults(func=cmd_count)

    b = sub.add_parser("ballbound", parents=[common])
    b.add_argument("--R", type=int, required=True)
    b.add_argument("--dims", help="JSON list")
    b.add_argument("--polys", help="JSON list of coefficient lists")
    b.set_defaults(func=cmd_ballbound)

    f = sub.add_parser("fourlemma", parents=[common])
    f.add_argument("action", choices=["predict", "verify"])
    f.add_argument("--kind", choices=["injective", "surjective"])
    for name in ("C1", "C2", "C3", "C4", "tau"):
        f.add_argument("--" + name, type=_rational, default=Fraction(1))
    for name in ("rk1", "rk2", "rk3"):
        f.add_argument("--" + name, type=int, default=0)
    f.add_argument("--count", type=int, default=1)
    f.add_argument("--window", type=int, default=20)
    f.set_defaults(func=cmd_fourlemma)

    t = sub.add_parser("fto1-bound", parents=[common])
    t.add_argument("--complex", choices=sorted(_COMPLEXES))
    t.add_argument("--cells", help="comma-separated cell counts")
    t.add_argument("--boundaries", help="JSON {k: matrix of d_k}")
    t.add_argument("--coeffs", help="JSON {k: [orders of cyclic summands]}")
    t.set_defaults(func=cmd_fto1)

    x = sub.add_parser("repro", parents=[common])
    x.add_argument("example", choices=["example1", "example2", "example3"])
    x.set_defaults(func=cmd_repro)
    return p


def _error(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.command == "fourlemma" and args.action == "predict" and not args.kind:
        return _error("UsageError", UsageError("--kind is required"), 1)
    if args.command in ("obstruct", "extend") and not args.random and not args.pair:
        return _error("UsageError", UsageError("--pair is required unless --random"), 1)
    args._status = 0
    try:
        payload = args.func(args)
    except (UsageError, ValidationError, UnknownSchema, DegreeOutOfRange, DegenerateDirection,
            MixedAlgebra, BaseMismatch, LevelMismatch, KeyError, ValueError) as exc:
        return _error(type(exc).__name__, exc, 1)
    except NonzeroObstruction as exc:
        return _error("NonzeroObstruction", exc, 2)
    except CDGAError as exc:
        return _error(type(exc).__name__, exc, 2)
    emit(payload, args.format, args.output)
    return args._status


if __name__ == "__main__":
    sys.exit(main())
