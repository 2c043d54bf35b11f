"""Exact straight-line tracing and segment enumeration.

Enumeration develops face copies into the plane from the start point and
keeps, per branch, the open cone of directions still visible.  Developed
singular (or marked) vertices inside a cone stop the exact ray through them;
regular vertices let it continue, which is handled by walking that single ray.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BudgetTooLargeGuard, NoSingularities, SectorRequired, ZeroDirection
from .exactnum import Scalar, Vec2, cross, dot, format_scalar, lex_cmp, norm_sq, S
from .surface import EDGE, INTERIOR, VERTEX, Surface, SurfacePoint, in_sector

DEFAULT_NODE_CAP = 10**7


@dataclass(frozen=True)
class Crossing:
    """Exit of a segment from ``face`` through ``edge`` at parameter ``t``.

    ``t`` lies strictly in (0, 1) for edge crossings; ``t == 0`` marks a
    passage through the regular vertex at the start of ``edge``.
    """

    face: int
    edge: int
    t: Scalar

    def __str__(self):
        return f"{self.face}:{self.edge}@{format_scalar(self.t)}"


@dataclass(frozen=True)
class Piece:
    face: int
    start: Vec2
    end: Vec2


@dataclass(frozen=True, eq=False)
class Segment:
    """A singularity-free straight segment between two surface points."""

    start: SurfacePoint
    end: SurfacePoint
    holonomy: Vec2
    crossings: tuple[Crossing, ...]
    pieces: tuple[Piece, ...]
    length_sq: Scalar

    def key(self):
        first = self.pieces[0]
        return (
            self.holonomy,
            first.face,
            first.start,
            tuple((c.face, c.edge, c.t) for c in self.crossings),
        )

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def point_at(self, s: Scalar) -> tuple[int, Vec2]:
        """Face and local position at fraction ``s`` (0..1) of the holonomy."""
        done = Scalar(0, 0, s.d) if isinstance(s, Scalar) else S(0)
        hol = self.holonomy
        for piece in self.pieces:
            frac = _fraction_along(piece.end - piece.start, hol)
            if (done + frac - s).sign() >= 0:
                return piece.face, piece.start + hol * (s - done)
            done = done + frac
        last = self.pieces[-1]
        return last.face, last.end

    def format(self) -> str:
        cr = ",".join(str(c) for c in self.crossings)
        return (
            f"len_sq={format_scalar(self.length_sq)} "
            f"hol=({format_scalar(self.holonomy.x)},{format_scalar(self.holonomy.y)}) "
            f"crossings=[{cr}]"
        )

    def __repr__(self):
        return f"<Segment {self.start}->{self.end} {self.format()}>"


def _fraction_along(v: Vec2, hol: Vec2) -> Scalar:
    if hol.x:
        return v.x / hol.x
    return v.y / hol.y


def segment_order(a: Segment, b: Segment) -> int:
    c = (a.length_sq - b.length_sq).sign()
    if c:
        return c
    ka = [(x.face, x.edge) for x in a.crossings]
    kb = [(x.face, x.edge) for x in b.crossings]
    if ka != kb:
        return -1 if ka < kb else 1
    c = lex_cmp(a.holonomy, b.holonomy)
    if c:
        return c
    fa, fb = a.pieces[0].face, b.pieces[0].face
    if fa != fb:
        return -1 if fa < fb else 1
    c = lex_cmp(a.pieces[0].start, b.pieces[0].start)
    if c:
        return c
    ta = [x.t for x in a.crossings]
    tb = [x.t for x in b.crossings]
    for u, v in zip(ta, tb):
        c = (u - v).sign()
        if c:
            return c
    return 0


def sort_segments(segments) -> list[Segment]:
    return sorted(segments, key=functools.cmp_to_key(segment_order))


# -- single-face geometry ---------------------------------------------------

def face_exit(surface: Surface, face: int, pos: Vec2, direction: Vec2):
    """Where the ray from ``pos`` (in the closed face) leaves the face.

    Returns ``("vertex", j, point, 0)`` or ``("edge", i, point, t)``.
    The ray must point into the face or along one of its edges.
    """
    poly = surface.faces[face]
    n = len(poly)
    cr = []
    for j in range(n):
        w = poly[j] - pos
        c = cross(direction, w)
        s = c.sign()
        if s == 0 and dot(direction, w).sign() > 0:
            return "vertex", j, poly[j], Scalar(0, 0, surface.d)
        cr.append((c, s))
    for i in range(n):
        ci, si = cr[i]
        cj, sj = cr[(i + 1) % n]
        if si < 0 and sj > 0:
            t = ci / (ci - cj)
            return "edge", i, poly[i] + (poly[(i + 1) % n] - poly[i]) * t, t
    raise ValueError(f"ray from {pos} along {direction} does not leave face {face}")


@dataclass
class WalkStep:
    face: int
    start: Vec2
    end: Vec2
    offset: Vec2
    kind: str  # "edge" or "vertex"
    index: int
    t: Scalar
    vertex_class: int = -1


def walk(surface: Surface, face: int, pos: Vec2, direction: Vec2, offset: Vec2) -> Iterator[WalkStep]:
    """Follow the straight ray face by face; stops after reaching a singular vertex.

    ``pos`` must be in the closed face with ``direction`` pointing into it
    (or along an edge).  ``offset`` translates face coordinates to the
    developing plane.
    """
    while True:
        kind, idx, q, t = face_exit(surface, face, pos, direction)
        if kind == "edge":
            yield WalkStep(face, pos, q, offset, kind, idx, t)
            g, _ = surface.partner[(face, idx)]
            shift = surface.shifts[(face, idx)]
            face, pos, offset = g, q + shift, offset - shift
        else:
            cls = surface.corner_class[(face, idx)]
            yield WalkStep(face, pos, q, offset, kind, idx, t, cls)
            if surface.singular[cls]:
                return
            g, m = surface.corner_containing(cls, direction)
            w = surface.faces[g][m]
            face, pos, offset = g, w, offset + q - w


def _on_open_closed(r: Vec2, s: Vec2, q: Vec2) -> bool:
    """r on the segment (s, q]."""
    if r == s:
        return False
    if cross(q - s, r - s).sign():
        return False
    return dot(r - s, r - q).sign() <= 0


def _dist_sq_to_segment(a: Vec2, p1: Vec2, p2: Vec2) -> Scalar:
    e = p2 - p1
    t = dot(a - p1, e) / norm_sq(e)
    if t.sign() <= 0:
        return norm_sq(a - p1)
    if (t - 1).sign() >= 0:
        return norm_sq(a - p2)
    return norm_sq(a - (p1 + e * t))


def field_sqrt(x: Scalar) -> Scalar | None:
    """Exact square root inside the field, or None."""
    import gmpy2

    if x.sign() < 0:
        return None
    if not x.b:
        q = x.a
        if gmpy2.is_square(q.numerator) and gmpy2.is_square(q.denominator):
            return Scalar(gmpy2.mpq(gmpy2.isqrt(q.numerator), gmpy2.isqrt(q.denominator)), 0, x.d)
        if x.d == 1:
            return None
        # (b sqrt d)^2 = b^2 d
        r = q / x.d
        if gmpy2.is_square(r.numerator) and gmpy2.is_square(r.denominator):
            return Scalar(0, gmpy2.mpq(gmpy2.isqrt(r.numerator), gmpy2.isqrt(r.denominator)), x.d)
        return None
    # (p + q sqrt d)^2 = p^2 + d q^2 + 2 p q sqrt d
    n = x.field_norm()
    if n < 0 or not (gmpy2.is_square(n.numerator) and gmpy2.is_square(n.denominator)):
        return None
    rn = gmpy2.mpq(gmpy2.isqrt(n.numerator), gmpy2.isqrt(n.denominator))
    for cand in ((x.a + rn) / 2, (x.a - rn) / 2):
        if cand <= 0:
            continue
        if gmpy2.is_square(cand.numerator) and gmpy2.is_square(cand.denominator):
            p = gmpy2.mpq(gmpy2.isqrt(cand.numerator), gmpy2.isqrt(cand.denominator))
            qq = x.b / (2 * p)
            root = Scalar(p, qq, x.d)
            if root.sign() < 0:
                root = -root
            if root * root == x:
                return root
    return None


# -- trace ------------------------------------------------------------------

@dataclass(frozen=True)
class TraceResult:
    """Outcome of :func:`trace`.

    ``stopped`` is ``"singularity"`` or ``"budget"``.  On a budget stop the end
    point sits at length exactly sqrt(budget) when that is a field element
    (``exact_end``); otherwise it is the last crossing within budget.
    """

    stopped: str
    point: SurfacePoint
    holonomy: Vec2
    length_sq: Scalar
    crossings: tuple[Crossing, ...]
    pieces: tuple[Piece, ...]
    exact_end: bool = True


def _start_in_face(surface: Surface, start: SurfacePoint, direction: Vec2, corner=None):
    if start.kind == INTERIOR:
        return start.face, start.pos
    if start.kind == EDGE:
        e = surface.edge_vector(start.face, start.edge)
        if cross(e, direction).sign() >= 0:
            return start.face, start.pos
        g, _ = surface.partner[(start.face, start.edge)]
        return g, start.pos + surface.shifts[(start.face, start.edge)]
    cls = start.vertex_class
    if corner is None:
        if surface.singular[cls]:
            raise SectorRequired(f"start is the singular vertex v{cls}; pass the corner sector")
        corner = surface.corner_containing(cls, direction)
    else:
        corner = tuple(corner)
        if surface.corner_class.get(corner) != cls or not in_sector(direction, *surface.corner_sector(corner)):
            raise SectorRequired(f"direction {direction} is not in corner {corner}")
    f, i = corner
    return f, surface.faces[f][i]


def trace(surface: Surface, start: SurfacePoint, direction: Vec2, max_len_sq, corner=None) -> TraceResult:
    """Trace forward until the first singular/marked vertex or the length budget."""
    direction = direction.with_field(surface.d)
    if direction.is_zero():
        raise ZeroDirection("direction must be nonzero")
    budget = S(max_len_sq, surface.d)
    face, pos = _start_in_face(surface, start, direction, corner)
    origin = pos
    crossings: list[Crossing] = []
    pieces: list[Piece] = []
    dir_sq = norm_sq(direction)
    for step in walk(surface, face, pos, direction, Vec2(Scalar(0, 0, surface.d), Scalar(0, 0, surface.d))):
        end_dev = step.end + step.offset
        travelled = norm_sq(end_dev - origin)
        if (travelled - budget).sign() > 0:
            root = field_sqrt(budget / dir_sq)
            if root is not None:
                stop_local = step.start + direction * (root - _param(step.start + step.offset - origin, direction))
                pieces.append(Piece(step.face, step.start, stop_local))
                hol = stop_local + step.offset - origin
                return TraceResult("budget", surface.point(step.face, stop_local), hol, norm_sq(hol),
                                   tuple(crossings), tuple(pieces), True)
            hol = step.start + step.offset - origin
            return TraceResult("budget", surface.point(step.face, step.start), hol, norm_sq(hol),
                               tuple(crossings), tuple(pieces), False)
        pieces.append(Piece(step.face, step.start, step.end))
        if step.kind == "vertex" and surface.singular[step.vertex_class]:
            hol = end_dev - origin
            return TraceResult("singularity", surface.vertex_point(step.vertex_class), hol, travelled,
                               tuple(crossings), tuple(pieces), True)
        crossings.append(Crossing(step.face, step.index, step.t))
        if (travelled - budget).sign() == 0:
            return TraceResult("budget", _step_end_point(surface, step), end_dev - origin, travelled,
                               tuple(crossings), tuple(pieces), True)
    raise AssertionError("walk ended without a singularity")


def _param(v: Vec2, direction: Vec2) -> Scalar:
    return v.x / direction.x if direction.x else v.y / direction.y


def _step_end_point(surface: Surface, step: WalkStep) -> SurfacePoint:
    if step.kind == "vertex":
        return surface.vertex_point(step.vertex_class)
    return surface.point(step.face, step.end)


# -- enumeration --------------------------------------------------------------

class _Search:
    """Cone-clipped unfolding search from ``x`` for developed copies of ``y``."""

    def __init__(self, surface: Surface, x: SurfacePoint, y: SurfacePoint, budget: Scalar, node_cap: int):
        self.M = surface
        self.x = x
        self.y = y
        self.budget = budget
        self.node_cap = node_cap
        self.nodes = 0
        self.found: dict = {}
        zero = Scalar(0, 0, surface.d)
        self.zero_vec = Vec2(zero, zero)
        self.y_class = y.vertex_class if y.kind == VERTEX else None
        self.y_reps: dict[int, list[tuple[Vec2, int]]] = {}
        if y.kind != VERTEX:
            edges = [-1]
            if y.kind == EDGE:
                edges = [y.edge, surface.partner[(y.face, y.edge)][1]]
            for (f, p), edge in zip(surface.representations(y), edges):
                self.y_reps.setdefault(f, []).append((p, edge))

    # chain entries are (face, offset, exit_edge); apex lives in chain[0] face coordinates
    def starts(self):
        M, x = self.M, self.x
        if x.kind == VERTEX:
            return [(f, M.faces[f][i], i) for f, i in M.classes[x.vertex_class]]
        return [(x.face, x.pos, None)]

    def run_start(self, face: int, apex: Vec2, corner) -> list:
        """Handle the start face directly; return root cone nodes."""
        M = self.M
        self.apex = apex
        poly = M.faces[face]
        n = len(poly)
        origin = self.zero_vec
        if corner is None:
            ray_vertices = [j for j in range(n) if poly[j] != apex]
            cone_edges = list(range(n))
            sector = None
        else:
            ray_vertices = [(corner + k) % n for k in range(1, n - 1)]
            cone_edges = [(corner + k) % n for k in range(1, n - 1)]
            sector = M.corner_sector((face, corner))
        for r, _edge in self.y_reps.get(face, ()):
            if r == apex:
                continue
            d = r - apex
            if sector is not None and not in_sector(d, *sector):
                continue
            if (norm_sq(d) - self.budget).sign() <= 0:
                self._emit([], face, origin, r, [Piece(face, apex, r)], [])
        for j in ray_vertices:
            d = poly[j] - apex
            if (norm_sq(d) - self.budget).sign() <= 0:
                self._vertex_ray([], face, origin, j)
        roots = []
        for e in cone_edges:
            right = poly[e] - apex
            left = poly[(e + 1) % n] - apex
            node = self._child([], face, origin, e, right, left)
            if node is not None:
                roots.append(node)
        return roots

    def _child(self, chain, face, offset, edge, right, left):
        M = self.M
        poly = M.faces[face]
        p1 = poly[edge] + offset
        p2 = poly[(edge + 1) % len(poly)] + offset
        if (_dist_sq_to_segment(self.apex, p1, p2) - self.budget).sign() > 0:
            return None
        g, j = M.partner[(face, edge)]
        shift = M.shifts[(face, edge)]
        return (chain + [(face, offset, edge)], g, offset - shift, j, right, left)

    def run_node(self, node, stack: list):
        chain, face, offset, entry, right, left = node
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise BudgetTooLargeGuard(f"unfolding exceeded {self.node_cap} nodes")
        M = self.M
        apex = self.apex
        poly = M.faces[face]
        n = len(poly)
        dirs = [poly[m] + offset - apex for m in range(n)]

        for r, edge in self.y_reps.get(face, ()):
            if edge == entry:
                continue
            d = r + offset - apex
            if cross(right, d).sign() > 0 and cross(d, left).sign() > 0 and (norm_sq(d) - self.budget).sign() <= 0:
                self._emit(chain, face, offset, r + offset, None, None)

        for k in range(2, n):
            m = (entry + k) % n
            d = dirs[m]
            if cross(right, d).sign() > 0 and cross(d, left).sign() > 0:
                if (norm_sq(d) - self.budget).sign() <= 0:
                    self._vertex_ray(chain, face, offset, m)

        for k in range(1, n):
            e = (entry + k) % n
            lo = dirs[e]
            hi = dirs[(e + 1) % n]
            r2 = lo if cross(right, lo).sign() > 0 else right
            l2 = hi if cross(hi, left).sign() > 0 else left
            if cross(r2, l2).sign() <= 0:
                continue
            child = self._child(chain, face, offset, e, r2, l2)
            if child is not None:
                stack.append(child)

    def _corridor(self, chain, face, offset, target: Vec2):
        """Pieces and crossings of the straight path apex -> target (developed)."""
        apex = self.apex
        d = target - apex
        pieces: list[Piece] = []
        crossings: list[Crossing] = []
        prev = apex
        M = self.M
        for cface, coff, edge in chain:
            poly = M.faces[cface]
            p1 = poly[edge] + coff
            p2 = poly[(edge + 1) % len(poly)] + coff
            c1 = cross(d, p1 - apex)
            c2 = cross(d, p2 - apex)
            t = c1 / (c1 - c2)
            point = p1 + (p2 - p1) * t
            if point == prev and not pieces:
                # apex on the first window: nothing travelled in the start face
                prev = point
                continue
            pieces.append(Piece(cface, prev - coff, point - coff))
            crossings.append(Crossing(cface, edge, t))
            prev = point
        pieces.append(Piece(face, prev - offset, target - offset))
        return pieces, crossings

    def _emit(self, chain, face, offset, target_dev, pieces, crossings):
        if pieces is None:
            pieces, crossings = self._corridor(chain, face, offset, target_dev)
        seg = make_segment(self.M, self.x, self.y, target_dev - self.apex, pieces)
        self.found.setdefault(seg.key(), seg)

    def _vertex_ray(self, chain, face, offset, corner):
        M = self.M
        target = M.faces[face][corner] + offset
        cls = M.corner_class[(face, corner)]
        base_pieces = None
        if self.y_class == cls:
            base_pieces, base_cross = self._corridor(chain, face, offset, target)
            self._emit(chain, face, offset, target, base_pieces, base_cross)
        if M.singular[cls]:
            return
        if base_pieces is None:
            base_pieces, base_cross = self._corridor(chain, face, offset, target)
        direction = target - self.apex
        g, m = M.corner_containing(cls, direction)
        w = M.faces[g][m]
        pieces = list(base_pieces)
        crossings = list(base_cross) + [Crossing(face, corner, Scalar(0, 0, M.d))]
        budget = self.budget
        for step in walk(M, g, w, direction, target - w):
            for r, _edge in self.y_reps.get(step.face, ()):
                if _on_open_closed(r, step.start, step.end):
                    dev = r + step.offset
                    if (norm_sq(dev - self.apex) - budget).sign() <= 0:
                        self._emit(None, None, None, dev, pieces + [Piece(step.face, step.start, r)], list(crossings))
            end_dev = step.end + step.offset
            if (norm_sq(end_dev - self.apex) - budget).sign() > 0:
                return
            pieces.append(Piece(step.face, step.start, step.end))
            if step.kind == "vertex":
                if self.y_class == step.vertex_class:
                    self._emit(None, None, None, end_dev, list(pieces), list(crossings))
                crossings.append(Crossing(step.face, step.index, step.t))
            else:
                crossings.append(Crossing(step.face, step.index, step.t))

    def run_all(self, roots_by_start):
        for (face, apex, _corner), roots in roots_by_start:
            self.apex = apex
            stack = list(roots)
            while stack:
                self.run_node(stack.pop(), stack)


def _search_worker(args):
    surface, x, y, budget, cap, tasks = args
    s = _Search(surface, x, y, budget, cap)
    s.run_all(tasks)
    return list(s.found.values()), s.nodes


def segments_between(
    surface: Surface,
    x: SurfacePoint,
    y: SurfacePoint,
    max_len_sq,
    node_cap: int = DEFAULT_NODE_CAP,
    workers: int = 1,
) -> list[Segment]:
    """Every singularity-free straight segment from x to y with length^2 <= budget.

    Output is sorted by (length^2, crossing sequence, holonomy) and free of
    duplicates.  Raises BudgetTooLargeGuard if the unfolding tree exceeds
    ``node_cap`` nodes.
    """
    budget = S(max_len_sq, surface.d)
    if budget.sign() <= 0:
        return []
    search = _Search(surface, x, y, budget, node_cap)
    roots_by_start = []
    for start in search.starts():
        roots = search.run_start(*start)
        roots_by_start.append((start, roots))
    if workers <= 1:
        search.run_all(roots_by_start)
        found = search.found
    else:
        tasks: list[list] = [[] for _ in range(workers)]
        k = 0
        for start, roots in roots_by_start:
            for root in roots:
                tasks[k % workers].append((start, [root]))
                k += 1
        quota = max(1, node_cap // workers)
        found = dict(search.found)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for segs, _nodes in pool.map(_search_worker, [(surface, x, y, budget, quota, t) for t in tasks]):
                for seg in segs:
                    found.setdefault(seg.key(), seg)
    return sort_segments(found.values())


def count_nodes(surface: Surface, x: SurfacePoint, y: SurfacePoint, max_len_sq) -> int:
    """Size of the unfolding tree (diagnostics)."""
    budget = S(max_len_sq, surface.d)
    search = _Search(surface, x, y, budget, DEFAULT_NODE_CAP)
    roots_by_start = [(st, search.run_start(*st)) for st in search.starts()]
    search.run_all(roots_by_start)
    return search.nodes


def saddle_connections(surface: Surface, max_len_sq, node_cap: int = DEFAULT_NODE_CAP) -> list[Segment]:
    """All oriented segments joining singular or marked vertices."""
    sing = surface.singular_classes()
    if not sing:
        raise NoSingularities("surface has no singular or marked vertex")
    out = []
    for a in sing:
        for b in sing:
            out.extend(segments_between(surface, surface.vertex_point(a), surface.vertex_point(b), max_len_sq, node_cap))
    return sort_segments(out)


def reverse_segment(surface: Surface, seg: Segment) -> Segment:
    """The same segment traversed backwards."""
    pieces = [Piece(p.face, p.end, p.start) for p in reversed(seg.pieces)]
    return make_segment(surface, seg.end, seg.start, -seg.holonomy, pieces)


def _canonical_piece(surface: Surface, piece: Piece) -> Piece:
    """A piece lying along a glued edge is stored on the lower edge of the pair."""
    poly = surface.faces[piece.face]
    for i in range(len(poly)):
        e = surface.edge_vectors[piece.face][i]
        if cross(e, piece.start - poly[i]).sign() == 0 and cross(e, piece.end - poly[i]).sign() == 0:
            g, _ = surface.partner[(piece.face, i)]
            if (g, surface.partner[(piece.face, i)][1]) < (piece.face, i):
                shift = surface.shifts[(piece.face, i)]
                return Piece(g, piece.start + shift, piece.end + shift)
            break
    return piece


def make_segment(surface: Surface, x: SurfacePoint, y: SurfacePoint, holonomy: Vec2, pieces) -> Segment:
    """Assemble a segment in canonical form from its face pieces."""
    pieces = [p for p in pieces if p.start != p.end] or list(pieces[:1])
    pieces = tuple(_canonical_piece(surface, p) for p in pieces)
    crossings = tuple(_exit_record(surface, p.face, p.end) for p in pieces[:-1])
    return Segment(x, y, holonomy, crossings, pieces, norm_sq(holonomy))


def _exit_record(surface: Surface, face: int, pos: Vec2) -> Crossing:
    poly = surface.faces[face]
    n = len(poly)
    for j in range(n):
        if poly[j] == pos:
            return Crossing(face, j, Scalar(0, 0, surface.d))
    for i in range(n):
        e = surface.edge_vectors[face][i]
        w = pos - poly[i]
        if cross(e, w).sign() == 0:
            return Crossing(face, i, _fraction_along(w, e))
    raise ValueError("piece end is not on the face boundary")


def format_segments(segments: Sequence[Segment]) -> str:
    return "".join(s.format() + "\n" for s in segments)
