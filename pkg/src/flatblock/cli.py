"""``flatblock`` command line.

Exit status: 0 when a verdict was computed (negative verdicts included),
1 for invalid input or a failed computation, 2 for usage errors, 3 when a
length budget or search cap ran out before a verdict.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Sequence

from . import serialize
from .autos import weierstrass_points
from .blocking import BlockingInstance, bc_report, format_point, format_report, verify_blocking
from .builders import BUILTINS, builtin
from .cylinders import cylinder_decomposition, format_decomposition, purely_periodic_in_direction
from .errors import BudgetExhausted, BudgetTooLargeGuard, FlatblockError, ParseError
from .exactnum import Vec2, format_scalar, parse_scalar
from .holonomy import format_torus_cover, torus_cover
from .render import Overlays, write_svg
from .surface import Surface, load_surface
from .tracer import format_segments, segments_between, trace
from .unfolding import POLYGONS, polygon, unfold_billiard

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

_POINT_RE = re.compile(r"^\s*(\d+)\s*:\s*(\(.*\))\s*$")


class UsageError(Exception):
    pass


class _Budget(Exception):
    """Raised after output is written, to select exit status 3."""


def split_pair(text: str) -> tuple[str, str]:
    """``(a,b)`` -> ``("a", "b")``, splitting at the comma outside nested parentheses."""
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise ParseError(f"expected (x,y), got {text!r}")
    body = t[1:-1]
    depth = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i], body[i + 1:]
    raise ParseError(f"expected (x,y), got {text!r}")


def parse_vec(text: str, d: int) -> Vec2:
    a, b = split_pair(text)
    return Vec2(parse_scalar(a, d).with_field(d), parse_scalar(b, d).with_field(d))


def parse_point(surface: Surface, kind: str, text: str):
    if kind == "vertex" or re.fullmatch(r"\s*v\d+\s*", text):
        cls = int(text.strip().lstrip("v"))
        if not 0 <= cls < len(surface.classes):
            raise ParseError(f"no vertex class {cls}")
        return surface.vertex_point(cls)
    m = _POINT_RE.match(text)
    if m is None:
        raise ParseError(f"point must look like f:(x,y), got {text!r}")
    return surface.point(int(m.group(1)), parse_vec(m.group(2), surface.d))


# -- argument parsing ------------------------------------------------------------

def _tagged(kind):
    def conv(text):
        return kind, text

    return conv


def _add_surface(p):
    src = p.add_argument_group("surface")
    src.add_argument("--surface", metavar="FILE", help="surface file (JSON)")
    src.add_argument("--builtin", metavar="NAME[:PARAMS]", help="builtin surface, e.g. l_shaped:1,2")
    src.add_argument("--mark", metavar="CLASS", type=int, action="append", default=[],
                     help="mark a vertex class as a singularity (repeatable)")
    p.add_argument("--format", choices=("text", "structured"), default="text")


def _add_points(p):
    p.add_argument("--point", dest="points", action="append", type=_tagged("point"), default=[],
                   metavar="F:(X,Y)", help="point in face F coordinates (repeatable, in order)")
    p.add_argument("--vertex", dest="points", action="append", type=_tagged("vertex"),
                   metavar="CLASS", help="a vertex class as a point (repeatable, in order)")


def _add_budget(p, required=True):
    p.add_argument("--budget-len-sq", metavar="SCALAR", required=required,
                   help="closed bound on squared length, exact syntax")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatblock", description="Exact blocking computations on translation surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("validate", "check a surface and print a summary"), ("info", "vertex classes, genus, area")):
        _add_surface(sub.add_parser(name, help=text))

    p = sub.add_parser("trace", help="trace a straight line from a point")
    _add_surface(p)
    _add_points(p)
    _add_budget(p)
    p.add_argument("--direction", required=True, metavar="(X,Y)")
    p.add_argument("--corner", metavar="F:I", help="corner sector when starting at a singular vertex")

    p = sub.add_parser("segments", help="all segments between two points up to the budget")
    _add_surface(p)
    _add_points(p)
    _add_budget(p)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("block-verify", help="check a candidate blocking set")
    _add_surface(p)
    _add_points(p)
    _add_budget(p)
    p.add_argument("--block", action="append", default=[], metavar="F:(X,Y)|vN", help="blocking point (repeatable)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("block-report", help="certified interval for the blocking cardinality")
    _add_surface(p)
    _add_points(p)
    _add_budget(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--min-stab", action="store_true", help="always run the exact stabbing search")

    _add_surface(sub.add_parser("torus-cover", help="torus-cover detection from absolute holonomy"))

    for name, text in (("cylinders", "cylinder decomposition in a direction"),
                       ("pure-periodic", "commensurability of cylinder circumferences")):
        p = sub.add_parser(name, help=text)
        _add_surface(p)
        p.add_argument("--direction", required=True, metavar="(X,Y)")
        _add_budget(p, required=False)

    p = sub.add_parser("unfold", help="unfold a rational billiard table")
    p.add_argument("--polygon", choices=sorted(POLYGONS), help="named table")
    p.add_argument("--vertices", metavar="(X,Y);...", help="counterclockwise vertices")
    p.add_argument("--angles", metavar="P/Q,...", help="interior angles as multiples of pi")
    p.add_argument("--field", type=int, default=1, metavar="D", help="work in Q(sqrt D)")
    p.add_argument("--out", metavar="FILE", help="also write the unfolded surface file")
    p.add_argument("--format", choices=("text", "structured"), default="text")

    p = sub.add_parser("examples", help="list builtin surfaces and billiard tables")
    p.add_argument("--format", choices=("text", "structured"), default="text")

    p = sub.add_parser("render", help="write an SVG picture")
    _add_surface(p)
    _add_points(p)
    _add_budget(p, required=False)
    p.add_argument("--out", required=True, metavar="FILE.svg")
    p.add_argument("--block", action="append", default=[], metavar="F:(X,Y)|vN", help="point marker (repeatable)")
    p.add_argument("--weierstrass", action="store_true", help="mark the Weierstrass points")
    p.add_argument("--cylinders", metavar="(X,Y)", help="overlay the cylinder decomposition in this direction")
    p.add_argument("--workers", type=int, default=1)
    return parser


# -- commands ------------------------------------------------------------------------

def _surface(args) -> Surface:
    if bool(args.surface) == bool(args.builtin):
        raise UsageError("give exactly one of --surface or --builtin")
    M = load_surface(args.surface) if args.surface else builtin(args.builtin)
    if args.mark:
        M = M.with_marked(args.mark)
    return M


def _points(args, M: Surface, count: int):
    pts = args.points or []
    if len(pts) != count:
        raise UsageError(f"{args.command} needs exactly {count} point(s) via --point/--vertex, got {len(pts)}")
    return [parse_point(M, kind, text) for kind, text in pts]


def _budget(args, M: Surface):
    if args.budget_len_sq is None:
        return None
    b = parse_scalar(args.budget_len_sq, M.d).with_field(M.d)
    if b.sign() < 0:
        raise UsageError("--budget-len-sq must be non-negative")
    return b


def _emit(args, text: str, data) -> None:
    sys.stdout.write(serialize.dumps(data) if args.format == "structured" else text)


def cmd_validate(args) -> None:
    M = _surface(args)
    info = serialize.surface_info(M)
    text = (
        f"valid: yes\nname: {M.name or '-'}\nfield_d: {M.d}\nfaces: {len(M.faces)}\n"
        f"genus: {M.genus}\narea: {format_scalar(M.area)}\n"
    )
    _emit(args, text, {"valid": True, **info})


def cmd_info(args) -> None:
    M = _surface(args)
    info = serialize.surface_info(M)
    lines = [f"{k}: {'-' if info[k] is None else info[k]}" for k in ("name", "field_d", "faces", "edges", "genus", "area", "cover_degree")]
    for c in info["vertex_classes"]:
        flag = "marked" if c["marked"] else ("singular" if c["singular"] else "regular")
        corners = " ".join(f"{f}:{i}" for f, i in c["corners"])
        lines.append(f"v{c['vertex']}: angle={c['cone_angle_2pi']}*2pi {flag} corners=[{corners}]")
    _emit(args, "\n".join(lines) + "\n", info)


def cmd_trace(args) -> None:
    M = _surface(args)
    (p,) = _points(args, M, 1)
    corner = None
    if args.corner:
        f, _, i = args.corner.partition(":")
        corner = (int(f), int(i))
    res = trace(M, p, parse_vec(args.direction, M.d), _budget(args, M), corner=corner)
    cr = ",".join(str(c) for c in res.crossings)
    text = (
        f"stopped={res.stopped} point={format_point(res.point)} "
        f"hol=({format_scalar(res.holonomy.x)},{format_scalar(res.holonomy.y)}) "
        f"len_sq={format_scalar(res.length_sq)} crossings=[{cr}]\n"
    )
    _emit(args, text, serialize.trace_to_dict(res))


def cmd_segments(args) -> None:
    M = _surface(args)
    x, y = _points(args, M, 2)
    segs = segments_between(M, x, y, _budget(args, M), workers=args.workers)
    _emit(args, format_segments(segs), serialize.segments_to_dict(segs))


def cmd_block_verify(args) -> None:
    M = _surface(args)
    x, y = _points(args, M, 2)
    inst = BlockingInstance(M, x, y, _budget(args, M))
    pts = [parse_point(M, "point", t) for t in args.block]
    segs = inst.segments(workers=args.workers)
    ver = verify_blocking(inst, pts, segs)
    text = f"{'blocked' if ver.blocked else 'unblocked'} segments={ver.segments}\n"
    if ver.witness is not None:
        text += "witness " + ver.witness.format() + "\n"
    _emit(args, text, serialize.verification_to_dict(ver))


def cmd_block_report(args) -> None:
    M = _surface(args)
    x, y = _points(args, M, 2)
    inst = BlockingInstance(M, x, y, _budget(args, M))
    rep = bc_report(inst, workers=args.workers, run_min_stab=True if args.min_stab else None)
    _emit(args, format_report(rep), serialize.report_to_dict(rep))


def cmd_torus_cover(args) -> None:
    tc = torus_cover(_surface(args))
    _emit(args, format_torus_cover(tc), serialize.torus_cover_to_dict(tc))


def cmd_cylinders(args) -> None:
    M = _surface(args)
    dec = cylinder_decomposition(M, parse_vec(args.direction, M.d), _budget(args, M))
    _emit(args, format_decomposition(dec), serialize.decomposition_to_dict(dec))
    if not dec.complete:
        raise _Budget()


def cmd_pure_periodic(args) -> None:
    M = _surface(args)
    per = purely_periodic_in_direction(M, parse_vec(args.direction, M.d), _budget(args, M))
    text = f"purely_periodic: {per.verdict}\n"
    if per.witness is not None:
        i, j = per.witness
        text += f"witness: cylinders {i},{j} ratio={format_scalar(per.ratio)}\n"
    text += format_decomposition(per.decomposition)
    _emit(args, text, serialize.periodicity_to_dict(per))
    if per.verdict == "undecided":
        raise _Budget()


def _polygon_from_args(args):
    if args.polygon:
        if args.vertices or args.angles:
            raise UsageError("--polygon excludes --vertices/--angles")
        return POLYGONS[args.polygon]()
    if not (args.vertices and args.angles):
        raise UsageError("give --polygon, or both --vertices and --angles")
    d = args.field
    verts = [parse_vec(t, d) for t in args.vertices.split(";") if t.strip()]
    angles = [a.strip() for a in args.angles.split(",") if a.strip()]
    return polygon(verts, angles, d)


def cmd_unfold(args) -> None:
    P = _polygon_from_args(args)
    M, lift = unfold_billiard(P)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(M.dumps())
    data = {
        "group_order": len(lift.group),
        "polygon_area": format_scalar(P.area),
        "surface_info": serialize.surface_info(M),
        "surface": M.to_dict(),
    }
    text = (
        f"group_order: {len(lift.group)}\nfaces: {len(M.faces)}\ngenus: {M.genus}\n"
        f"area: {format_scalar(M.area)} = {len(lift.group)} * {format_scalar(P.area)}\n"
        f"cone_angles_2pi: {list(M.multiplicity)}\n"
    )
    _emit(args, text, data)


EXAMPLES = {
    "torus": "unit square torus",
    "torus_grid:N": "unit torus cut into N^2 squares of side 1/N",
    "staircase": "six-cell staircase, degree 3 over its quotient torus",
    "l_shaped[:A,B]": "three-rectangle L surface in genus 2 (default A=B=1)",
    "golden_l": "L surface with golden-ratio arm, field Q(sqrt5)",
    "octagon": "regular octagon with opposite sides glued",
    "origami:H,V": "square-tiled surface from cycle notation, e.g. origami:(1 2)(3 4),(2 3)",
    "grid_cover:N,K": "cyclic K-sheeted cover of torus_grid(N), fully ramified",
}


def cmd_examples(args) -> None:
    lines = ["builtins:"] + [f"  {k}: {v}" for k, v in EXAMPLES.items()]
    lines += ["polygons:"] + [f"  {k}" for k in sorted(POLYGONS)]
    data = {"builtins": EXAMPLES, "builtin_names": list(BUILTINS), "polygons": sorted(POLYGONS)}
    _emit(args, "\n".join(lines) + "\n", data)


def cmd_render(args) -> None:
    M = _surface(args)
    ov = Overlays()
    if args.points:
        x, y = _points(args, M, 2)
        budget = _budget(args, M)
        if budget is None:
            raise UsageError("segment overlays need --budget-len-sq")
        ov.segments = segments_between(M, x, y, budget, workers=args.workers)
    pts = [parse_point(M, "point", t) for t in args.block]
    if args.weierstrass:
        pts += weierstrass_points(M)
    ov.points = pts
    if args.cylinders:
        ov.decomposition = cylinder_decomposition(M, parse_vec(args.cylinders, M.d))
    write_svg(args.out, M, ov)
    text = f"wrote {args.out} faces={len(M.faces)} segments={len(ov.segments)} points={len(pts)}\n"
    _emit(args, text, {"out": args.out, "faces": len(M.faces), "segments": len(ov.segments), "points": len(pts)})


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "trace": cmd_trace,
    "segments": cmd_segments,
    "block-verify": cmd_block_verify,
    "block-report": cmd_block_report,
    "torus-cover": cmd_torus_cover,
    "cylinders": cmd_cylinders,
    "pure-periodic": cmd_pure_periodic,
    "unfold": cmd_unfold,
    "examples": cmd_examples,
    "render": cmd_render,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"flatblock: usage error: {exc}\n")
        return EXIT_USAGE
    except _Budget:
        return EXIT_BUDGET
    except (BudgetTooLargeGuard, BudgetExhausted) as exc:
        sys.stderr.write(f"flatblock: budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except (FlatblockError, OSError) as exc:
        sys.stderr.write(f"flatblock: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
