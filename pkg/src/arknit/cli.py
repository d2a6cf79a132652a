"""Command-line entry point.

Verbs map one-to-one onto library operations:

    validate    parse a quiver file and check the translation axioms
    mesh        radical filtration tables of a mesh category
    cover       truncated generic cover of a translation quiver
    knit        AR component of a path algebra, from either end
    degree      bounded left/right degree search for a knitted arrow
    finite-type degree criterion for finite representation type
    probe       covering-functor dimension comparison on a knitted component

Exit codes: 0 success, 1 computation error or failed check, 2 inconclusive
finite-type verdict, 64 usage or quiver parse error.  With --json exactly
one JSON document goes to standard output; diagnostics go to standard
error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cover import build_cover, cover_to_json, verify_cover
from .degrees import finite_type_check, left_degree, right_degree
from .errors import ComputationError, QuiverFormatError
from .functors import (
    generalized_standard_probe,
    verify_assignment,
    well_behaved_assignment,
)
from .meshcat import MeshCategory
from .quiver import (
    Quiver,
    TranslationQuiver,
    parse_quiver,
    serialize_quiver,
    validate,
)
from .reps import knit_ar_component

EX_OK = 0
EX_COMPUTE = 1
EX_INCONCLUSIVE = 2
EX_USAGE = 64

DEFAULT_BOUND = 25
DEFAULT_RADIUS = 12


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems with exit status 2; the contract
    here is 64, so errors are re-raised and handled in main."""

    def error(self, message):
        raise _UsageError(message)


def normalize_text(text: str) -> str:
    """Comment- and whitespace-normal form of a quiver file."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lines.append(" ".join(line.split()))
    return "\n".join(lines) + "\n"


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise QuiverFormatError("cannot read %s: %s" % (path, err)) from None
    return parse_quiver(text)


def _need_translation(q) -> TranslationQuiver:
    if not isinstance(q, TranslationQuiver):
        raise ComputationError(
            "this verb needs a translation quiver file (t/s lines or P/I marks)"
        )
    return q


def _need_ordinary(q) -> Quiver:
    if isinstance(q, TranslationQuiver):
        raise ComputationError(
            "this verb needs an ordinary quiver file (no t/s lines, no P/I marks)"
        )
    return q


# -- verb handlers -----------------------------------------------------------


def _run_validate(args):
    q = _load(args.input)
    rep = validate(q)
    report = dict(rep.for_json())
    report["normalized"] = serialize_quiver(q)
    lines = ["kind: %s" % report["notes"]["kind"]]
    lines.append("vertices: %d  arrows: %d" % (
        report["notes"]["vertices"], report["notes"]["arrows"]))
    lines.append("ok: %s" % rep.ok)
    for v in rep.violations:
        lines.append("violation: %s" % v)
    return (EX_OK if rep.ok else EX_COMPUTE), report, lines


def _run_mesh(args):
    tq = _need_translation(_load(args.input))
    mc = MeshCategory(tq)
    length = mc.with_length_report()
    sectional = mc.sectional_report()
    report = {
        "dims": mc.dims_json(),
        "with_length": length.for_json(),
        "sectional": sectional.for_json(),
    }
    ok = length.ok and sectional.ok
    lines = ["pairs with morphisms: %d" % len(report["dims"]["pairs"])]
    lines.append("with-length law: %s" % ("ok" if length.ok else "VIOLATED"))
    lines.append("sectional paths nonzero: %s"
                 % ("ok" if sectional.ok else "VIOLATED"))
    for row in report["dims"]["pairs"]:
        lines.append("  %d -> %d  dims %s" % (row["x"], row["y"], row["dims"]))
    return (EX_OK if ok else EX_COMPUTE), report, lines


def _run_cover(args):
    tq = _need_translation(_load(args.input))
    cover = build_cover(tq, args.radius, base=args.base)
    chk = verify_cover(cover)
    report = {"cover": cover_to_json(cover), "check": chk.for_json()}
    lines = [
        "radius: %d  base: %d" % (cover.radius, cover.base_vertex),
        "cover vertices: %d  arrows: %d" % (
            len(report["cover"]["vertices"]), len(report["cover"]["arrows"])),
        "check: %s" % ("ok" if chk.ok else "VIOLATED"),
    ]
    for v in chk.violations:
        lines.append("violation: %s" % v)
    return (EX_OK if chk.ok else EX_COMPUTE), report, lines


def _knit(args):
    q = _need_ordinary(_load(args.input))
    return knit_ar_component(q, direction=args.direction, bound=args.bound)


def _knit_report(ar) -> dict:
    tq = ar.tq
    modules = []
    for v in tq.vertices:
        modules.append({
            "vid": v,
            "dim_vector": list(ar.module(v).dim_vector()),
            "generation": ar.generation[v],
            "projective": v in ar.genuine_projectives,
            "injective": v in ar.genuine_injectives,
            "frontier": v in ar.frontier,
            "tau": tq.tau.get(v),
        })
    arrows = [
        {"id": a, "src": tq.src(a), "tgt": tq.tgt(a),
         "sigma": tq.sigma.get(a)}
        for a in sorted(tq.arrows)
    ]
    return {
        "direction": ar.direction,
        "truncated": ar.truncated,
        "frontier": sorted(ar.frontier),
        "meshes": len(ar.sequences),
        "modules": modules,
        "arrows": arrows,
        "tq_text": serialize_quiver(tq),
    }


def _run_knit(args):
    ar = _knit(args)
    report = _knit_report(ar)
    report["bound"] = args.bound
    lines = ["direction: %s  bound: %d" % (ar.direction, args.bound)]
    lines.append("modules: %d  meshes: %d  truncated: %s" % (
        len(report["modules"]), report["meshes"], ar.truncated))
    for m in report["modules"]:
        tags = "".join(
            t for t, on in (("P", m["projective"]), ("I", m["injective"]),
                            ("*", m["frontier"])) if on)
        lines.append("  [%d] gen %d  dim %s  %s"
                     % (m["vid"], m["generation"], m["dim_vector"], tags))
    return EX_OK, report, lines


def _run_degree(args):
    ar = _knit(args)
    if args.arrow not in ar.tq.arrows:
        raise ComputationError(
            "arrow %d is not in the knitted component (see the knit verb)"
            % args.arrow
        )
    f = ar.arrow_mor[args.arrow]
    search = left_degree if args.side == "left" else right_degree
    rep = search(f, ar, args.bound)
    src, tgt = ar.tq.arrows[args.arrow]
    report = {
        "arrow": {
            "id": args.arrow,
            "src": src,
            "tgt": tgt,
            "src_module": list(ar.module(src).dim_vector()),
            "tgt_module": list(ar.module(tgt).dim_vector()),
        },
        "degree": rep.for_json(),
    }
    lines = ["arrow %d: %s -> %s" % (
        args.arrow, report["arrow"]["src_module"],
        report["arrow"]["tgt_module"])]
    if rep.finite:
        lines.append("%s degree: %d  (witness from module %s)"
                     % (args.side, rep.n,
                        report["degree"]["witness_module"]))
    else:
        lines.append("%s degree: not found within bound %d"
                     % (args.side, rep.bound))
    return EX_OK, report, lines


def _run_finite_type(args):
    q = _need_ordinary(_load(args.input))
    rep = finite_type_check(q, bound=args.bound)
    report = rep.for_json()
    lines = ["verdict: %s" % rep.verdict]
    for i, n in sorted(rep.projective_degrees.items()):
        lines.append("  right degree of rad P_%d -> P_%d: %d" % (i, i, n))
    for j, n in sorted(rep.injective_degrees.items()):
        lines.append("  left degree of I_%d -> I_%d/soc: %d" % (j, j, n))
    if rep.ok:
        lines.append("diameter: %d" % rep.diameter)
        for rec in rep.path_bound_checks:
            lines.append("  simple %d reaches I_%d in %s steps (degree %d)"
                         % (rec["simple"], rec["injective"], rec["length"],
                            rec["degree"]))
    code = EX_OK if rep.ok else EX_INCONCLUSIVE
    return code, report, lines


def _run_probe(args):
    q = _need_ordinary(_load(args.input))
    ar = knit_ar_component(q, direction="projectives", bound=args.bound)
    if ar.truncated:
        raise ComputationError(
            "component still truncated at bound %d; raise --bound" % args.bound
        )
    cover = build_cover(ar.tq, args.radius)
    assignment = well_behaved_assignment(cover, ar)
    ver = verify_assignment(assignment)
    probe = generalized_standard_probe(
        ar, cover, assignment, upto=args.levels
    )
    report = {"assignment": ver.for_json(), "probe": probe.for_json()}
    ok = ver.ok and probe.ok
    lines = [
        "assignment: %s" % ("ok" if ver.ok else "VIOLATED"),
        "probe pairs: %d  skipped: %d"
        % (len(probe.pairs), probe.skipped),
        "dimension match: %s" % ("ok" if probe.ok else "VIOLATED"),
    ]
    return (EX_OK if ok else EX_COMPUTE), report, lines


_HANDLERS = {
    "validate": _run_validate,
    "mesh": _run_mesh,
    "cover": _run_cover,
    "knit": _run_knit,
    "degree": _run_degree,
    "finite-type": _run_finite_type,
    "probe": _run_probe,
}


# -- parser and dispatch -----------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="arknit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)

    def common(p):
        p.add_argument("input", help="quiver file")
        p.add_argument("--json", action="store_true",
                       help="emit one JSON document on stdout")
        p.add_argument("--out", metavar="FILE",
                       help="write the report to FILE instead of stdout")
        p.add_argument("--seed", type=int, default=0,
                       help="seed recorded with the report")

    p = sub.add_parser("validate", help="parse and check a quiver file")
    common(p)

    p = sub.add_parser("mesh", help="mesh-category radical tables")
    common(p)

    p = sub.add_parser("cover", help="truncated generic cover")
    common(p)
    p.add_argument("--radius", type=int, default=DEFAULT_RADIUS)
    p.add_argument("--base", type=int, default=None,
                   help="base vertex (default: smallest id)")

    p = sub.add_parser("knit", help="knit an AR component")
    common(p)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.add_argument("--direction", choices=("projectives", "injectives"),
                   default="projectives")

    p = sub.add_parser("degree", help="degree of a knitted arrow morphism")
    common(p)
    p.add_argument("--arrow", type=int, required=True,
                   help="arrow id in the knitted component")
    p.add_argument("--side", choices=("left", "right"), default="left")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.add_argument("--direction", choices=("projectives", "injectives"),
                   default="projectives")

    p = sub.add_parser("finite-type", help="degree criterion for finite type")
    common(p)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)

    p = sub.add_parser("probe", help="covering-functor dimension comparison")
    common(p)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.add_argument("--radius", type=int, default=DEFAULT_RADIUS)
    p.add_argument("--levels", type=int, default=6,
                   help="compare radical layers up to this level")

    return parser


def _options_of(args) -> dict:
    opts = {}
    for key in ("bound", "radius", "direction", "side", "arrow", "levels",
                "base", "seed"):
        if hasattr(args, key):
            opts[key] = getattr(args, key)
    return opts


def _emit(doc, lines, args) -> None:
    if args.json:
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print("usage error: %s" % err, file=sys.stderr)
        return EX_USAGE
    except SystemExit as err:  # --help
        return int(err.code or 0)
    if args.verb is None:
        parser.print_usage(sys.stderr)
        return EX_USAGE
    handler = _HANDLERS[args.verb]
    envelope = {"verb": args.verb, "input": args.input,
                "options": _options_of(args)}
    try:
        code, report, lines = handler(args)
    except QuiverFormatError as err:
        print("parse error: %s" % err, file=sys.stderr)
        if args.json:
            envelope["error"] = {"kind": "parse", "message": str(err)}
            _emit(envelope, [], args)
        return EX_USAGE
    except ComputationError as err:
        print("computation error: %s" % err, file=sys.stderr)
        if args.json:
            envelope["error"] = {"kind": "computation", "message": str(err)}
            _emit(envelope, [], args)
        return EX_COMPUTE
    envelope["report"] = report
    _emit(envelope, lines, args)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
