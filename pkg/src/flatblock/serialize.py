"""Structured (JSON) forms of results, with parsers back into the domain types.

Scalars travel as canonical text, so every value survives a round trip
exactly.  ``dumps`` fixes key order and indentation, which keeps output
byte-stable across runs.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .blocking import BlockingInstance, BlockingReport, Verification
from .cylinders import Cylinder, Decomposition, Periodicity
from .errors import ParseError
from .exactnum import Scalar, Vec2, format_scalar, parse_scalar
from .holonomy import HolonomyGroup, TorusCover
from .surface import VERTEX, Surface, SurfacePoint
from .tracer import Crossing, Piece, Segment, TraceResult


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def scalar_out(s: Scalar | None):
    return None if s is None else format_scalar(s)


def scalar_in(text, d: int) -> Scalar | None:
    if text is None:
        return None
    return parse_scalar(str(text), d).with_field(d)


def vec_out(v: Vec2) -> list[str]:
    return [format_scalar(v.x), format_scalar(v.y)]


def vec_in(data, d: int) -> Vec2:
    if not isinstance(data, (list, tuple)) or len(data) != 2:
        raise ParseError(f"expected a coordinate pair, got {data!r}")
    return Vec2(scalar_in(data[0], d), scalar_in(data[1], d))


# -- points and segments ------------------------------------------------------

def point_to_dict(p: SurfacePoint) -> dict:
    if p.kind == VERTEX:
        return {"vertex": p.vertex_class}
    return {"face": p.face, "pos": vec_out(p.pos)}


def point_from_dict(surface: Surface, data: Mapping) -> SurfacePoint:
    if "vertex" in data:
        return surface.vertex_point(int(data["vertex"]))
    return surface.point(int(data["face"]), vec_in(data["pos"], surface.d))


def segment_to_dict(seg: Segment) -> dict:
    return {
        "start": point_to_dict(seg.start),
        "end": point_to_dict(seg.end),
        "len_sq": format_scalar(seg.length_sq),
        "holonomy": vec_out(seg.holonomy),
        "crossings": [[c.face, c.edge, format_scalar(c.t)] for c in seg.crossings],
        "pieces": [[p.face, vec_out(p.start), vec_out(p.end)] for p in seg.pieces],
    }


def segment_from_dict(surface: Surface, data: Mapping) -> Segment:
    d = surface.d
    hol = vec_in(data["holonomy"], d)
    seg = Segment(
        point_from_dict(surface, data["start"]),
        point_from_dict(surface, data["end"]),
        hol,
        tuple(Crossing(int(f), int(e), scalar_in(t, d)) for f, e, t in data["crossings"]),
        tuple(Piece(int(f), vec_in(a, d), vec_in(b, d)) for f, a, b in data["pieces"]),
        scalar_in(data["len_sq"], d),
    )
    if seg.length_sq != hol.x * hol.x + hol.y * hol.y:
        raise ParseError("len_sq does not match the holonomy")
    return seg


def segments_to_dict(segs) -> dict:
    return {"count": len(segs), "segments": [segment_to_dict(s) for s in segs]}


def trace_to_dict(res: TraceResult) -> dict:
    return {
        "stopped": res.stopped,
        "point": point_to_dict(res.point),
        "holonomy": vec_out(res.holonomy),
        "len_sq": format_scalar(res.length_sq),
        "crossings": [[c.face, c.edge, format_scalar(c.t)] for c in res.crossings],
        "pieces": [[p.face, vec_out(p.start), vec_out(p.end)] for p in res.pieces],
        "exact_end": res.exact_end,
    }


def trace_from_dict(surface: Surface, data: Mapping) -> TraceResult:
    d = surface.d
    return TraceResult(
        data["stopped"],
        point_from_dict(surface, data["point"]),
        vec_in(data["holonomy"], d),
        scalar_in(data["len_sq"], d),
        tuple(Crossing(int(f), int(e), scalar_in(t, d)) for f, e, t in data["crossings"]),
        tuple(Piece(int(f), vec_in(a, d), vec_in(b, d)) for f, a, b in data["pieces"]),
        bool(data["exact_end"]),
    )


# -- blocking --------------------------------------------------------------------

def verification_to_dict(ver: Verification) -> dict:
    return {
        "blocked": ver.blocked,
        "segments": ver.segments,
        "witness": None if ver.witness is None else segment_to_dict(ver.witness),
    }


def verification_from_dict(surface: Surface, data: Mapping) -> Verification:
    w = data.get("witness")
    return Verification(bool(data["blocked"]), int(data["segments"]), None if w is None else segment_from_dict(surface, w))


def report_to_dict(rep: BlockingReport) -> dict:
    inst = rep.instance
    return {
        "instance": {
            "x": point_to_dict(inst.x),
            "y": point_to_dict(inst.y),
            "budget_len_sq": format_scalar(inst.budget),
        },
        "segments": rep.segments,
        "bc_interval": [rep.lower, rep.upper],
        "lower": {
            "n": rep.lower,
            "certificate": "disjoint-family",
            "optimal": rep.lower_optimal,
            "family": [segment_to_dict(s) for s in rep.lower_family],
        },
        "upper": {
            "n": rep.upper,
            "certificate": rep.upper_kind,
            "source": rep.upper_source,
            "set": [point_to_dict(p) for p in rep.upper_set],
        },
        "min_stab": rep.min_stab,
        "notes": list(rep.notes),
    }


def report_from_dict(surface: Surface, data: Mapping) -> BlockingReport:
    inst_d = data["instance"]
    inst = BlockingInstance(
        surface,
        point_from_dict(surface, inst_d["x"]),
        point_from_dict(surface, inst_d["y"]),
        scalar_in(inst_d["budget_len_sq"], surface.d),
    )
    low, up = data["lower"], data["upper"]
    return BlockingReport(
        inst,
        int(data["segments"]),
        int(low["n"]),
        tuple(segment_from_dict(surface, s) for s in low["family"]),
        bool(low["optimal"]),
        None if up["n"] is None else int(up["n"]),
        up["certificate"],
        up["source"],
        tuple(point_from_dict(surface, p) for p in up["set"]),
        data.get("min_stab"),
        tuple(data.get("notes", ())),
    )


# -- holonomy -----------------------------------------------------------------------

def torus_cover_to_dict(tc: TorusCover) -> dict:
    g = tc.group
    out = {
        "torus_cover": "yes" if tc.verdict else "no",
        "generators": [vec_out(v) for v in g.generators],
        "z_rank": g.z_rank,
        "span_dim": g.span_dim,
    }
    if tc.verdict:
        out["lattice"] = [vec_out(v) for v in tc.lattice]
        out["degree"] = format_scalar(tc.degree)
        out["branch_points"] = [
            {"vertex": c, "image": vec_out(p), "multiplicity": k} for c, p, k in tc.branch_points
        ]
    else:
        out["witness"] = [vec_out(v) for v in tc.witness]
    return out


def torus_cover_from_dict(data: Mapping, d: int) -> TorusCover:
    gens = tuple(vec_in(v, d) for v in data["generators"])
    verdict = data["torus_cover"] == "yes"
    lattice = tuple(vec_in(v, d) for v in data["lattice"]) if verdict else None
    group = HolonomyGroup(gens, int(data["z_rank"]), int(data["span_dim"]), lattice)
    if not verdict:
        return TorusCover(False, group, witness=tuple(vec_in(v, d) for v in data["witness"]))
    branch = tuple((int(b["vertex"]), vec_in(b["image"], d), int(b["multiplicity"])) for b in data["branch_points"])
    return TorusCover(True, group, lattice, scalar_in(data["degree"], d), branch)


# -- cylinders ---------------------------------------------------------------------

def decomposition_to_dict(dec: Decomposition) -> dict:
    out = {
        "direction": vec_out(dec.direction),
        "complete": dec.complete,
        "budget_len_sq": scalar_out(dec.budget),
    }
    if not dec.complete:
        cls, corner, budget = dec.witness
        out["open_prong"] = {"vertex": cls, "corner": list(corner), "budget_len_sq": format_scalar(budget)}
        return out
    out["cylinders"] = [
        {
            "circumference": format_scalar(c.circumference),
            "height": format_scalar(c.height),
            "bottom": [segment_to_dict(s) for s in c.bottom],
            "top": [segment_to_dict(s) for s in c.top],
        }
        for c in dec.cylinders
    ]
    out["ratios"] = [[format_scalar(r) for r in row] for row in dec.ratios()]
    out["saddle_connections"] = [segment_to_dict(s) for s in dec.saddle_connections]
    return out


def decomposition_from_dict(surface: Surface, data: Mapping) -> Decomposition:
    d = surface.d
    direction = vec_in(data["direction"], d)
    budget = scalar_in(data.get("budget_len_sq"), d)
    if not data["complete"]:
        op = data["open_prong"]
        witness = (int(op["vertex"]), tuple(op["corner"]), scalar_in(op["budget_len_sq"], d))
        return Decomposition(direction, False, witness=witness, budget=budget)
    cyls = tuple(
        Cylinder(
            direction,
            scalar_in(c["circumference"], d),
            scalar_in(c["height"], d),
            tuple(segment_from_dict(surface, s) for s in c["bottom"]),
            tuple(segment_from_dict(surface, s) for s in c["top"]),
        )
        for c in data["cylinders"]
    )
    saddles = tuple(segment_from_dict(surface, s) for s in data["saddle_connections"])
    return Decomposition(direction, True, cyls, saddles, None, budget)


def periodicity_to_dict(per: Periodicity) -> dict:
    out = {"purely_periodic": per.verdict, "decomposition": decomposition_to_dict(per.decomposition)}
    if per.witness is not None:
        out["witness"] = list(per.witness)
        out["ratio"] = format_scalar(per.ratio)
    return out


def periodicity_from_dict(surface: Surface, data: Mapping) -> Periodicity:
    w = data.get("witness")
    return Periodicity(
        data["purely_periodic"],
        decomposition_from_dict(surface, data["decomposition"]),
        None if w is None else (int(w[0]), int(w[1])),
    )


# -- surfaces ---------------------------------------------------------------------------

def surface_info(surface: Surface) -> dict:
    classes = []
    for c, corners in enumerate(surface.classes):
        classes.append({
            "vertex": c,
            "cone_angle_2pi": surface.multiplicity[c],
            "singular": surface.singular[c],
            "marked": c in surface.marked,
            "corners": [list(k) for k in corners],
        })
    return {
        "name": surface.name,
        "field_d": surface.d,
        "faces": len(surface.faces),
        "edges": len(surface.partner) // 2,
        "genus": surface.genus,
        "area": format_scalar(surface.area),
        "vertex_classes": classes,
        "cover_degree": None if surface.cover is None else surface.cover.degree,
    }
