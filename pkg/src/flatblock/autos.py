"""Affine automorphisms of the builtin families.

Only two kinds are supported, and both are verified rather than searched for:
the deck translation recorded by the staircase builder, and the point
reflection of every face about its centre, which on a genus-2 surface is the
hyperelliptic involution.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadParams, NotApplicable
from .exactnum import Mat2, Scalar, Vec2, format_scalar
from .surface import VERTEX, Surface, SurfacePoint
from .tracer import Segment, segments_between


@dataclass(frozen=True)
class AffineAuto:
    """``q`` in face ``f`` goes to ``D q + shifts[f]`` in face ``perm[f]``."""

    surface: Surface
    perm: tuple[int, ...]
    derivative: Mat2
    shifts: tuple[Vec2, ...]
    order: int

    def image(self, face: int, pos: Vec2) -> tuple[int, Vec2]:
        return self.perm[face], self.derivative @ pos + self.shifts[face]

    def format(self) -> str:
        d = ",".join(format_scalar(e) for e in self.derivative.entries())
        lines = [f"perm={list(self.perm)} D=[{d}] order={self.order}"]
        for f, t in enumerate(self.shifts):
            lines.append(f"face {f}: t=({format_scalar(t.x)},{format_scalar(t.y)})")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FixedPoint:
    point: SurfacePoint
    label: str  # "cone point" or "weierstrass"


def apply(auto: AffineAuto, p: SurfacePoint) -> SurfacePoint:
    M = auto.surface
    if p.kind == VERTEX:
        f, i = M.classes[p.vertex_class][0]
        pos = M.faces[f][i]
    else:
        f, pos = p.face, p.pos
    g, q = auto.image(f, pos)
    return M.point(g, q)


def _edge_image(auto: AffineAuto, f: int, i: int) -> tuple[int, int] | None:
    M = auto.surface
    g, a = auto.image(f, M.vertex(f, i))
    _, b = auto.image(f, M.vertex(f, i + 1))
    poly = M.faces[g]
    n = len(poly)
    for j in range(n):
        if poly[j] == a and poly[(j + 1) % n] == b:
            return g, j
    return None


def audit(auto: AffineAuto) -> bool:
    """Every face maps onto a face and every gluing onto a gluing."""
    M = auto.surface
    if sorted(auto.perm) != list(range(len(M.faces))):
        return False
    images = {}
    for f, face in enumerate(M.faces):
        if len(face) != len(M.faces[auto.perm[f]]):
            return False
        for i in range(len(face)):
            img = _edge_image(auto, f, i)
            if img is None:
                return False
            images[(f, i)] = img
    return all(M.partner[images[e]] == images[p] for e, p in M.partner.items())


def _compose_power(auto: AffineAuto, k: int) -> tuple:
    M = auto.surface
    out = []
    for f, face in enumerate(M.faces):
        g, pts = f, list(face)
        for _ in range(k):
            pts = [auto.derivative @ v + auto.shifts[g] for v in pts]
            g = auto.perm[g]
        out.append((g, tuple(pts)))
    return tuple(out)


def _order(surface, perm, derivative, shifts, cap: int = 24) -> int:
    probe = AffineAuto(surface, perm, derivative, shifts, 0)
    identity = tuple((f, tuple(face)) for f, face in enumerate(surface.faces))
    for k in range(1, cap + 1):
        if _compose_power(probe, k) == identity:
            return k
    raise NotApplicable("map has no finite order")


def deck_translation(surface: Surface) -> AffineAuto:
    """The order-3 deck map of the staircase, climbing one step."""
    info = surface.cover.info if surface.cover is not None else {}
    if "deck" not in info:
        raise NotApplicable(f"{surface.name or 'surface'} carries no deck translation data")
    perm = tuple(info["deck"])
    ident = Mat2.identity(surface.d)
    shifts = tuple(surface.faces[perm[f]][0] - surface.faces[f][0] for f in range(len(perm)))
    auto = AffineAuto(surface, perm, ident, shifts, _order(surface, perm, ident, shifts))
    if not audit(auto):
        raise NotApplicable("recorded deck map does not respect the gluings")
    return auto


def hyperelliptic_involution(surface: Surface) -> tuple[AffineAuto, list[FixedPoint]]:
    """Point reflection of each face about its centre, with its fixed points.

    Applies to genus-2 surfaces whose faces are centrally symmetric and whose
    gluings are compatible with the reflection (the L-shaped family, the
    octagon).
    """
    if surface.genus != 2:
        raise NotApplicable("the hyperelliptic involution is only provided in genus 2")
    minus = -Mat2.identity(surface.d)
    perm = tuple(range(len(surface.faces)))
    shifts = tuple(surface.centroid(f) * 2 for f in perm)
    auto = AffineAuto(surface, perm, minus, shifts, 2)
    if not audit(auto):
        raise NotApplicable("face point reflections do not respect the gluings")
    return auto, fixed_points(auto)


def fixed_points(auto: AffineAuto) -> list[FixedPoint]:
    """Fixed points of an involution with derivative -I, canonicalized."""
    M = auto.surface
    cands: list[SurfacePoint] = []
    for f, face in enumerate(M.faces):
        if auto.perm[f] == f:
            cands.append(M.point(f, auto.shifts[f] / 2))
        n = len(face)
        for i in range(n):
            cands.append(M.point(f, (face[i] + face[(i + 1) % n]) / 2))
    cands.extend(M.vertex_point(c) for c in range(len(M.classes)))
    seen = set()
    out = []
    for p in cands:
        if p in seen:
            continue
        seen.add(p)
        if apply(auto, p) == p:
            label = "cone point" if M.point_is_singular(p) else "weierstrass"
            out.append(FixedPoint(p, label))
    out.sort(key=lambda fp: (fp.label != "cone point", fp.point.sort_key()))
    return out


def weierstrass_points(surface: Surface) -> list[SurfacePoint]:
    _, fixed = hyperelliptic_involution(surface)
    return [fp.point for fp in fixed if fp.label == "weierstrass"]


@dataclass(frozen=True)
class MidpointCheck:
    verified: bool
    segments: int
    counterexample: Segment | None = None


def weierstrass_midpoint_check(surface: Surface, x: SurfacePoint, max_len_sq, points=None) -> MidpointCheck:
    """Check that every segment from ``x`` to ``h(x)`` has its midpoint in ``points``.

    ``points`` defaults to the Weierstrass points; pass a subset to exhibit a
    counterexample.
    """
    h, fixed = hyperelliptic_involution(surface)
    y = apply(h, x)
    if y == x:
        raise BadParams("x is fixed by the involution")
    if surface.point_is_singular(x):
        raise BadParams("x must be a regular point")
    if points is None:
        points = [fp.point for fp in fixed if fp.label == "weierstrass"]
    targets = set(points)
    half = Scalar(1, 0, surface.d) / 2
    segs = segments_between(surface, x, y, max_len_sq)
    for seg in segs:
        mid = surface.point(*seg.point_at(half))
        if mid not in targets:
            return MidpointCheck(False, len(segs), seg)
    return MidpointCheck(True, len(segs))
