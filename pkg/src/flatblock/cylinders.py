"""Directional cylinder decompositions and pure periodicity.

Every outgoing prong in the chosen direction is traced until it closes into a
saddle connection.  Around a cone point the prongs in directions ``+dir`` and
``-dir`` alternate counterclockwise; the cylinder lying to the left of a
connection continues along the outgoing prong just before (clockwise of) the
one it arrives on.  Following that rule partitions the connections into the
bottom boundaries of the cylinders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ZeroDirection
from .exactnum import Scalar, Vec2, cross, format_scalar, norm_sq
from .surface import Surface, in_sector
from .tracer import Segment, make_segment, trace, walk, _start_in_face


@dataclass(frozen=True)
class Cylinder:
    """A maximal cylinder in direction ``direction``.

    ``circumference`` and ``height`` are measured in units of ``|direction|``,
    so ratios between cylinders of one decomposition are exact field elements.
    """

    direction: Vec2
    circumference: Scalar
    height: Scalar
    bottom: tuple[Segment, ...]
    top: tuple[Segment, ...]

    @property
    def circumference_sq(self) -> Scalar:
        return self.circumference * self.circumference * norm_sq(self.direction)

    @property
    def height_sq(self) -> Scalar:
        return self.height * self.height * norm_sq(self.direction)

    @property
    def area(self) -> Scalar:
        return self.circumference * self.height * norm_sq(self.direction)


@dataclass(frozen=True)
class Decomposition:
    direction: Vec2
    complete: bool
    cylinders: tuple[Cylinder, ...] = ()
    saddle_connections: tuple[Segment, ...] = ()
    witness: tuple | None = None  # (vertex class, corner, length^2 reached) of an open prong
    budget: Scalar | None = None

    def ratios(self) -> list[list[Scalar]]:
        cs = [c.circumference for c in self.cylinders]
        return [[a / b for b in cs] for a in cs]


@dataclass(frozen=True)
class Periodicity:
    verdict: str  # "yes", "no" or "undecided"
    decomposition: Decomposition
    witness: tuple[int, int] | None = None  # indices of an incommensurable cylinder pair

    @property
    def ratio(self) -> Scalar | None:
        if self.witness is None:
            return None
        i, j = self.witness
        cyl = self.decomposition.cylinders
        return cyl[i].circumference / cyl[j].circumference


def primitive_direction(direction: Vec2) -> Vec2:
    """Scale a rational direction to a primitive integer vector; others pass through."""
    x, y = direction.x, direction.y
    if not (x.is_rational() and y.is_rational()):
        return direction
    qx, qy = x.rational(), y.rational()
    den = math.lcm(int(qx.denominator), int(qy.denominator))
    ix, iy = int(qx * den), int(qy * den)
    g = math.gcd(ix, iy)
    return Vec2(Scalar(ix // g, 0, x.d), Scalar(iy // g, 0, x.d))


def _outgoing_prongs(surface: Surface, direction: Vec2):
    """(class, corner) for every outgoing prong at singular vertices, CCW per class."""
    out = []
    for cls in surface.singular_classes():
        for corner in _ccw_corners(surface, cls):
            if in_sector(direction, *surface.corner_sector(corner)):
                out.append((cls, corner))
    return out


def _ccw_corners(surface: Surface, cls: int) -> list:
    """Corners of a vertex class in counterclockwise order."""
    return list(surface.classes[cls])


def _initial_budget(surface: Surface) -> Scalar:
    shortest = min(norm_sq(e) for face in surface.edge_vectors for e in face)
    return (surface.area * 4) * (surface.area * 4) / shortest


def cylinder_decomposition(
    surface: Surface,
    direction: Vec2,
    max_len_sq=None,
) -> Decomposition:
    """Decompose ``surface`` into cylinders in ``direction``.

    Prongs are traced with a budget that doubles from a heuristic start up to
    ``max_len_sq`` (default 4096 times the start).  If some prong is still
    open at the cap the result is marked incomplete with that prong as witness.
    """
    direction = direction.with_field(surface.d)
    if direction.is_zero():
        raise ZeroDirection("direction must be nonzero")
    direction = primitive_direction(direction)
    if not surface.singular_classes():
        surface = surface.with_marked([0])
    budget = _initial_budget(surface)
    cap = budget * 4096 if max_len_sq is None else Scalar(0, 0, surface.d) + max_len_sq
    if (budget - cap).sign() > 0:
        budget = cap
    prongs = _outgoing_prongs(surface, direction)
    closed: dict = {}
    while True:
        for cls, corner in prongs:
            if (cls, corner) in closed:
                continue
            res = trace(surface, surface.vertex_point(cls), direction, budget, corner=corner)
            if res.stopped == "singularity":
                closed[(cls, corner)] = res
        open_prongs = [p for p in prongs if p not in closed]
        if not open_prongs:
            break
        if (budget - cap).sign() >= 0:
            cls, corner = open_prongs[0]
            return Decomposition(direction, False, witness=(cls, corner, budget), budget=budget)
        budget = budget * 2
        if (budget - cap).sign() > 0:
            budget = cap
    return _assemble(surface, direction, prongs, closed, budget)


def _arrival_corner(surface: Surface, res, back: Vec2) -> tuple:
    """Corner of the end vertex whose sector holds the arriving prong ``back``."""
    last = res.pieces[-1]
    poly = surface.faces[last.face]
    i = poly.index(last.end)
    corner = (last.face, i)
    if in_sector(back, *surface.corner_sector(corner)):
        return corner
    return surface.ccw_next_corner(corner)


def _assemble(surface, direction, prongs, closed, budget) -> Decomposition:
    back = -direction
    # incoming prong position at each vertex: the corner whose sector holds -dir
    # as seen from the end vertex; the matching outgoing prong precedes it CCW.
    order: dict[int, list] = {}
    for cls in surface.singular_classes():
        seq = []
        for corner in _ccw_corners(surface, cls):
            if in_sector(direction, *surface.corner_sector(corner)):
                seq.append(("out", corner))
            if in_sector(back, *surface.corner_sector(corner)):
                seq.append(("in", corner))
        order[cls] = seq
    segs = {}
    for key in prongs:
        res = closed[key]
        cls, corner = key
        segs[key] = make_segment(
            surface, surface.vertex_point(cls), res.point, res.holonomy, list(res.pieces)
        )
    # the corner at the end vertex through which each connection arrives
    arrival = {key: _arrival_corner(surface, closed[key], back) for key in prongs}
    successor = {}
    for key in prongs:
        end_cls = closed[key].point.vertex_class
        seq = order[end_cls]
        pos = seq.index(("in", arrival[key]))
        k = pos - 1
        while seq[k][0] != "out":
            k -= 1
        successor[key] = (end_cls, seq[k][1])
    # top boundary: the cylinder to the right of a connection continues along
    # the outgoing prong just after (CCW of) the one it arrives on
    top_successor = {}
    for key in prongs:
        end_cls = closed[key].point.vertex_class
        seq = order[end_cls]
        pos = seq.index(("in", arrival[key]))
        k = (pos + 1) % len(seq)
        while seq[k][0] != "out":
            k = (k + 1) % len(seq)
        top_successor[key] = (end_cls, seq[k][1])
    bottoms = _cycles(prongs, successor)
    tops = _cycles(prongs, top_successor)
    pieces_by_face = _pieces_by_face(segs)
    top_of = {}
    for cyc in tops:
        for key in cyc:
            top_of[key] = cyc
    cylinders = []
    for cyc in bottoms:
        circ = sum((_fraction(closed[k].holonomy, direction) for k in cyc), Scalar(0, 0, surface.d))
        for num, den in _PROBES:
            frac = Scalar(num, 0, surface.d) / den
            height, hit = _height(surface, segs[cyc[0]], frac, direction, pieces_by_face)
            if hit is not None:
                break
        else:
            raise AssertionError("every perpendicular probe ran into a vertex")
        top_cycle = top_of.get(hit, ())
        cylinders.append(
            Cylinder(direction, circ, height, tuple(segs[k] for k in cyc), tuple(segs[k] for k in top_cycle))
        )
    cylinders.sort(key=lambda c: (float(c.circumference), float(c.height)))
    total = sum((c.area for c in cylinders), Scalar(0, 0, surface.d))
    if total != surface.area:
        raise AssertionError(f"cylinder areas sum to {total}, surface area is {surface.area}")
    return Decomposition(
        direction, True, tuple(cylinders), tuple(segs[k] for k in prongs), None, budget
    )


# starting points (as fractions of a bottom connection) for the height probe
_PROBES = ((1, 2), (1, 3), (1, 5), (2, 7), (3, 11), (5, 13), (7, 17), (11, 19))


def _fraction(hol: Vec2, direction: Vec2) -> Scalar:
    return hol.x / direction.x if direction.x else hol.y / direction.y


def _cycles(keys, succ) -> list[list]:
    seen = set()
    out = []
    for k in keys:
        if k in seen:
            continue
        cyc = []
        while k not in seen:
            seen.add(k)
            cyc.append(k)
            k = succ[k]
        out.append(cyc)
    return out


def _pieces_by_face(segs: dict) -> dict:
    out: dict = {}
    for key, seg in segs.items():
        for piece in seg.pieces:
            out.setdefault(piece.face, []).append((key, piece))
    return out


def _height(surface: Surface, seg: Segment, frac: Scalar, direction: Vec2, pieces_by_face) -> tuple[Scalar, tuple]:
    """Walk perpendicular to ``direction`` from a point of ``seg`` to the next connection."""
    perp = Vec2(-direction.y, direction.x)
    face, pos = seg.point_at(frac)
    start = surface.point(face, pos)
    face, pos = _start_in_face(surface, start, perp)
    zero = Scalar(0, 0, surface.d)
    origin = pos
    for step in walk(surface, face, pos, perp, Vec2(zero, zero)):
        best = None
        for key, piece in pieces_by_face.get(step.face, ()):
            s = _hit_param(step.start, step.end, piece.start, piece.end)
            if s is None or (step.start == origin and step.offset.is_zero() and not s):
                continue
            if best is None or (s - best[0]).sign() < 0:
                best = (s, key)
        if best is not None:
            s, key = best
            hit = step.start + (step.end - step.start) * s + step.offset
            return _fraction(hit - origin, perp), key
        if step.kind == "vertex":
            # a boundary through this vertex may have no piece in this face;
            # give up on this probe and let the caller start elsewhere
            return _fraction(step.end + step.offset - origin, perp), None
    raise AssertionError("perpendicular walk ended unexpectedly")


def _hit_param(p: Vec2, q: Vec2, a: Vec2, b: Vec2):
    """Parameter s in [0, 1] where p + s(q-p) meets the closed segment ab, if transversal."""
    r = q - p
    e = b - a
    den = cross(r, e)
    if not den:
        return None
    s = cross(a - p, e) / den
    u = cross(a - p, r) / den
    if s.sign() < 0 or (s - 1).sign() > 0 or u.sign() < 0 or (u - 1).sign() > 0:
        return None
    return s


def purely_periodic_in_direction(surface: Surface, direction: Vec2, max_len_sq=None) -> Periodicity:
    """Whether ``direction`` decomposes into cylinders with pairwise rational moduli of circumference."""
    dec = cylinder_decomposition(surface, direction, max_len_sq)
    if not dec.complete:
        return Periodicity("undecided", dec)
    cyl = dec.cylinders
    for i in range(len(cyl)):
        for j in range(i + 1, len(cyl)):
            if not (cyl[i].circumference / cyl[j].circumference).is_rational():
                return Periodicity("no", dec, (i, j))
    return Periodicity("yes", dec)


def format_decomposition(dec: Decomposition) -> str:
    d = dec.direction
    lines = [f"direction=({format_scalar(d.x)},{format_scalar(d.y)}) complete={'yes' if dec.complete else 'no'}"]
    if not dec.complete:
        cls, corner, budget = dec.witness
        lines.append(f"open_prong=v{cls} corner={corner[0]}:{corner[1]} budget_len_sq={format_scalar(budget)}")
        return "\n".join(lines) + "\n"
    for i, c in enumerate(dec.cylinders):
        lines.append(
            f"cylinder {i}: circumference={format_scalar(c.circumference)} height={format_scalar(c.height)} "
            f"boundary={len(c.bottom)}+{len(c.top)}"
        )
    return "\n".join(lines) + "\n"
