"""Translation surfaces presented as convex polygons glued by translations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadGluing,
    Disconnected,
    FieldMismatch,
    NonConvexFace,
    NonParallelGluing,
    NonPositiveDeterminant,
    ParseError,
    PointNotOnSurface,
)
from .exactnum import Mat2, Scalar, Vec2, cross, dot, format_scalar, parse_scalar, vec

Edge = tuple[int, int]
Corner = tuple[int, int]

INTERIOR = "interior"
EDGE = "edge"
VERTEX = "vertex"

_POSITIVE_X = None  # built lazily per field


def in_sector(direction: Vec2, start: Vec2, stop: Vec2) -> bool:
    """Whether ``direction`` lies in the half-open sector ``[start, stop)``.

    The sector is swept counterclockwise and must be narrower than pi.
    """
    c = cross(start, direction).sign()
    if c < 0:
        return False
    if c == 0 and dot(start, direction).sign() <= 0:
        return False
    return cross(direction, stop).sign() > 0


@dataclass(frozen=True)
class CoverData:
    """A translation covering ``p`` of the unit torus R^2/Z^2.

    A point ``q`` of face ``f`` maps to ``to_unit @ (q + offsets[f]) mod Z^2``.
    """

    to_unit: Mat2
    offsets: tuple[Vec2, ...]
    degree: int
    base: str = "torus"
    info: Mapping = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    """A point of a surface in canonical form.

    ``kind`` is ``interior``, ``edge`` or ``vertex``.  Edge points live on the
    lower ``(face, edge)`` of the glued pair; vertex points are identified by
    their class id alone (``face``/``pos`` then name the first corner of the
    class, for convenience).
    """

    face: int
    pos: Vec2
    kind: str
    edge: int = -1
    vertex_class: int = -1

    def key(self):
        if self.kind == VERTEX:
            return (VERTEX, self.vertex_class)
        return (self.kind, self.face, self.edge, self.pos)

    def __eq__(self, other):
        if not isinstance(other, SurfacePoint):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def sort_key(self):
        if self.kind == VERTEX:
            return (0, self.vertex_class, 0, 0.0, 0.0)
        fx, fy = self.pos.to_float()
        return (1, self.face, self.edge, fx, fy)

    def __str__(self):
        if self.kind == VERTEX:
            return f"v{self.vertex_class}"
        return f"{self.face}:({self.pos.x},{self.pos.y})"


class Surface:
    """A validated translation surface.

    Faces are strictly convex counterclockwise polygons.  Edge ``(f, i)`` runs
    from vertex ``i`` to vertex ``i+1`` of face ``f``; ``partner`` is the
    gluing involution on edges.
    """

    def __init__(
        self,
        faces: Sequence[Sequence[Vec2]],
        gluings: Mapping[Edge, Edge] | Iterable[tuple[Edge, Edge]],
        d: int = 1,
        marked: Iterable[int] | Iterable[Corner] = (),
        name: str | None = None,
        cover: CoverData | None = None,
    ):
        self.d = d
        self.name = name
        self.faces: tuple[tuple[Vec2, ...], ...] = tuple(tuple(_in_field(v, d) for v in f) for f in faces)
        self.partner: dict[Edge, Edge] = _gluing_map(gluings)
        self._validate_faces()
        self._validate_gluings()
        self._check_connected()
        self.edge_vectors = tuple(
            tuple(f[(i + 1) % len(f)] - f[i] for i in range(len(f))) for f in self.faces
        )
        self.shifts: dict[Edge, Vec2] = {}
        for (f, i), (g, j) in self.partner.items():
            self.shifts[(f, i)] = self.faces[g][(j + 1) % len(self.faces[g])] - self.faces[f][i]
        self._build_vertex_classes()
        self.marked: frozenset[int] = frozenset(self._resolve_marks(marked))
        self.singular: tuple[bool, ...] = tuple(
            self.multiplicity[c] > 1 or c in self.marked for c in range(len(self.classes))
        )
        n_edges = len(self.partner) // 2
        euler = len(self.classes) - n_edges + len(self.faces)
        if euler % 2:
            raise BadGluing("odd Euler characteristic")
        self.genus = (2 - euler) // 2
        excess = sum(k - 1 for k in self.multiplicity)
        if excess != 2 * self.genus - 2:
            raise BadGluing(
                f"Gauss-Bonnet violated: sum(k-1)={excess}, 2g-2={2 * self.genus - 2}"
            )
        self.area = sum((_polygon_area(f) for f in self.faces), Scalar(0, 0, d))
        self.cover = cover
        if cover is not None:
            _check_cover(self, cover)

    # -- validation ---------------------------------------------------
    def _validate_faces(self):
        if not self.faces:
            raise BadGluing("surface has no faces")
        for fi, face in enumerate(self.faces):
            n = len(face)
            if n < 3:
                raise NonConvexFace(f"face {fi} has fewer than 3 vertices")
            for i in range(n):
                e1 = face[(i + 1) % n] - face[i]
                e2 = face[(i + 2) % n] - face[(i + 1) % n]
                if cross(e1, e2).sign() <= 0:
                    raise NonConvexFace(f"face {fi} is not strictly convex counterclockwise at vertex {(i + 1) % n}")

    def _validate_gluings(self):
        edges = {(f, i) for f, face in enumerate(self.faces) for i in range(len(face))}
        if set(self.partner) != edges:
            missing = sorted(edges - set(self.partner))
            extra = sorted(set(self.partner) - edges)
            raise BadGluing(f"gluing must cover every edge exactly once (missing {missing}, unknown {extra})")
        for e, p in self.partner.items():
            if p == e:
                raise BadGluing(f"edge {e} glued to itself")
            if self.partner[p] != e:
                raise BadGluing(f"gluing is not an involution at {e}")
            f, i = e
            g, j = p
            fe = self.faces[f]
            ge = self.faces[g]
            v1 = fe[(i + 1) % len(fe)] - fe[i]
            v2 = ge[(j + 1) % len(ge)] - ge[j]
            if not (v1 + v2).is_zero():
                raise NonParallelGluing(f"edges {e} and {p} are not opposite translates")

    def _check_connected(self):
        seen = {0}
        stack = [0]
        while stack:
            f = stack.pop()
            for i in range(len(self.faces[f])):
                g = self.partner[(f, i)][0]
                if g not in seen:
                    seen.add(g)
                    stack.append(g)
        if len(seen) != len(self.faces):
            raise Disconnected(f"faces {sorted(set(range(len(self.faces))) - seen)} unreachable from face 0")

    def _build_vertex_classes(self):
        corner_class: dict[Corner, int] = {}
        classes: list[list[Corner]] = []
        for f, face in enumerate(self.faces):
            for i in range(len(face)):
                if (f, i) in corner_class:
                    continue
                cid = len(classes)
                cycle = []
                c = (f, i)
                while c not in corner_class:
                    corner_class[c] = cid
                    cycle.append(c)
                    c = self.ccw_next_corner(c)
                if c != (f, i):
                    raise BadGluing("corner cycle did not close")
                classes.append(cycle)
        self.corner_class = corner_class
        self.classes: list[list[Corner]] = classes
        east = vec(1, 0, self.d)
        mult = []
        for cycle in classes:
            k = sum(1 for c in cycle if in_sector(east, *self.corner_sector(c)))
            mult.append(k)
        self.multiplicity: tuple[int, ...] = tuple(mult)

    def _resolve_marks(self, marked):
        out = set()
        for m in marked:
            if isinstance(m, tuple) or isinstance(m, list):
                corner = (int(m[0]), int(m[1]))
                if corner not in self.corner_class:
                    raise BadGluing(f"marked corner {corner} does not exist")
                out.add(self.corner_class[corner])
            else:
                if not 0 <= int(m) < len(self.classes):
                    raise BadGluing(f"marked vertex class {m} does not exist")
                out.add(int(m))
        return out

    # -- combinatorics ------------------------------------------------
    def n_faces(self) -> int:
        return len(self.faces)

    def vertex(self, f: int, i: int) -> Vec2:
        face = self.faces[f]
        return face[i % len(face)]

    def edge_vector(self, f: int, i: int) -> Vec2:
        return self.edge_vectors[f][i % len(self.faces[f])]

    def ccw_next_corner(self, corner: Corner) -> Corner:
        f, i = corner
        n = len(self.faces[f])
        return self.partner[(f, (i - 1) % n)]

    def corner_sector(self, corner: Corner) -> tuple[Vec2, Vec2]:
        """Boundary directions ``(outgoing edge, reversed incoming edge)``."""
        f, i = corner
        face = self.faces[f]
        n = len(face)
        return face[(i + 1) % n] - face[i], face[(i - 1) % n] - face[i]

    def corner_containing(self, vclass: int, direction: Vec2) -> Corner:
        for c in self.classes[vclass]:
            if in_sector(direction, *self.corner_sector(c)):
                return c
        raise ValueError(f"direction {direction} not found around vertex class {vclass}")

    def is_singular(self, vclass: int) -> bool:
        return self.singular[vclass]

    def singular_classes(self) -> list[int]:
        return [c for c in range(len(self.classes)) if self.singular[c]]

    def cone_angles(self) -> list[int]:
        """Cone angle of every vertex class, in multiples of 2*pi."""
        return list(self.multiplicity)

    # -- points -------------------------------------------------------
    def point(self, face: int, pos: Vec2) -> SurfacePoint:
        """Classify and canonicalize a position in the closed polygon ``face``."""
        if not 0 <= face < len(self.faces):
            raise PointNotOnSurface(f"no face {face}")
        pos = _in_field(pos, self.d)
        poly = self.faces[face]
        n = len(poly)
        zeros = []
        for i in range(n):
            s = cross(self.edge_vectors[face][i], pos - poly[i]).sign()
            if s < 0:
                raise PointNotOnSurface(f"{pos} is outside face {face}")
            if s == 0:
                zeros.append(i)
        if not zeros:
            return SurfacePoint(face, pos, INTERIOR)
        if len(zeros) == 1:
            i = zeros[0]
            g, j = self.partner[(face, i)]
            if (g, j) < (face, i):
                return SurfacePoint(g, pos + self.shifts[(face, i)], EDGE, edge=j)
            return SurfacePoint(face, pos, EDGE, edge=i)
        # two supporting lines: pos is the vertex shared by consecutive edges
        i = zeros[1] if zeros[0] + 1 == zeros[1] else zeros[0]
        return self.vertex_point(self.corner_class[(face, i)])

    def vertex_point(self, vclass: int) -> SurfacePoint:
        f, i = self.classes[vclass][0]
        return SurfacePoint(f, self.faces[f][i], VERTEX, vertex_class=vclass)

    def representations(self, p: SurfacePoint) -> list[tuple[int, Vec2]]:
        """Every (face, position) pair that denotes ``p``."""
        if p.kind == INTERIOR:
            return [(p.face, p.pos)]
        if p.kind == EDGE:
            g, _ = self.partner[(p.face, p.edge)]
            return [(p.face, p.pos), (g, p.pos + self.shifts[(p.face, p.edge)])]
        return [(f, self.faces[f][i]) for f, i in self.classes[p.vertex_class]]

    def point_is_singular(self, p: SurfacePoint) -> bool:
        return p.kind == VERTEX and self.singular[p.vertex_class]

    def face_contains(self, face: int, pos: Vec2) -> bool:
        poly = self.faces[face]
        return all(
            cross(self.edge_vectors[face][i], pos - poly[i]).sign() >= 0 for i in range(len(poly))
        )

    def centroid(self, face: int) -> Vec2:
        poly = self.faces[face]
        total = poly[0]
        for v in poly[1:]:
            total = total + v
        return total / len(poly)

    # -- derived surfaces ---------------------------------------------
    def with_marked(self, extra: Iterable[int]) -> "Surface":
        return Surface(
            self.faces, self.partner, self.d, marked=set(self.marked) | set(extra), name=self.name, cover=self.cover
        )

    # -- equality / serialization --------------------------------------
    def canonical_gluings(self) -> list[tuple[Edge, Edge]]:
        return sorted((e, p) for e, p in self.partner.items() if e < p)

    def marked_corners(self) -> list[Corner]:
        return sorted(self.classes[c][0] for c in self.marked)

    def to_dict(self) -> dict:
        out = {
            "field_d": self.d,
            "faces": [[[format_scalar(v.x), format_scalar(v.y)] for v in face] for face in self.faces],
            "gluings": [[list(e), list(p)] for e, p in self.canonical_gluings()],
            "marked_vertices": [list(c) for c in self.marked_corners()],
        }
        if self.name is not None:
            out["name"] = self.name
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def __eq__(self, other):
        if not isinstance(other, Surface):
            return NotImplemented
        return (
            self.d == other.d
            and self.faces == other.faces
            and self.partner == other.partner
            and self.marked == other.marked
        )

    def __hash__(self):
        return hash((self.d, self.faces))

    def __repr__(self):
        label = self.name or "surface"
        return (
            f"<Surface {label}: {len(self.faces)} faces, genus {self.genus}, "
            f"cone angles {list(self.multiplicity)}, area {self.area}>"
        )


def _in_field(v: Vec2, d: int) -> Vec2:
    try:
        return v.with_field(d)
    except FieldMismatch:
        raise
    except AttributeError as exc:
        raise TypeError(f"expected Vec2, got {type(v).__name__}") from exc


def _gluing_map(gluings) -> dict[Edge, Edge]:
    pairs = gluings.items() if isinstance(gluings, Mapping) else gluings
    out: dict[Edge, Edge] = {}
    for e, p in pairs:
        e = (int(e[0]), int(e[1]))
        p = (int(p[0]), int(p[1]))
        for a, b in ((e, p), (p, e)):
            if a in out and out[a] != b:
                raise BadGluing(f"edge {a} glued twice")
            out[a] = b
    return out


def _polygon_area(face: Sequence[Vec2]) -> Scalar:
    total = cross(face[-1], face[0])
    for i in range(len(face) - 1):
        total = total + cross(face[i], face[i + 1])
    return total / 2


def _check_cover(surface: Surface, cover: CoverData) -> None:
    if len(cover.offsets) != len(surface.faces):
        raise BadGluing("cover data needs one offset per face")
    for (f, i), (g, _) in surface.partner.items():
        jump = cover.to_unit @ (surface.shifts[(f, i)] + cover.offsets[g] - cover.offsets[f])
        if not (jump.x.is_integer() and jump.y.is_integer()):
            raise BadGluing(f"cover map is not continuous across edge {(f, i)}")


def build_surface(faces, gluings, d: int = 1, marked=(), name: str | None = None, cover: CoverData | None = None) -> Surface:
    """Validate raw polygon and gluing data into a :class:`Surface`."""
    return Surface(faces, gluings, d=d, marked=marked, name=name, cover=cover)


def gl2_act(surface: Surface, g: Mat2) -> Surface:
    """Postcompose every chart with the linear map ``g`` (``det g > 0``)."""
    entries = [e.with_field(surface.d) for e in g.entries()]
    g = Mat2(*entries)
    if g.det().sign() <= 0:
        raise NonPositiveDeterminant(f"det = {g.det()}")
    faces = [[g @ v for v in face] for face in surface.faces]
    cover = None
    if surface.cover is not None:
        c = surface.cover
        cover = CoverData(
            to_unit=c.to_unit @ g.inverse(),
            offsets=tuple(g @ o for o in c.offsets),
            degree=c.degree,
            base=c.base,
            info=c.info,
        )
    return Surface(faces, surface.partner, surface.d, marked=surface.marked, name=surface.name, cover=cover)


_ALLOWED_FIELDS = {"field_d", "faces", "gluings", "marked_vertices", "name"}


def surface_from_dict(data: Mapping) -> Surface:
    unknown = set(data) - _ALLOWED_FIELDS
    if unknown:
        raise ParseError(f"unknown surface fields: {sorted(unknown)}")
    for req in ("field_d", "faces", "gluings"):
        if req not in data:
            raise ParseError(f"surface file lacks {req!r}")
    d = data["field_d"]
    if not isinstance(d, int) or d < 1:
        raise ParseError("field_d must be a positive integer")
    faces = []
    for face in data["faces"]:
        verts = []
        for pair in face:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ParseError(f"bad vertex {pair!r}")
            if not all(isinstance(x, (str, int)) for x in pair):
                raise ParseError(f"vertex coordinates must be exact strings, got {pair!r}")
            verts.append(Vec2(parse_scalar(str(pair[0]), d), parse_scalar(str(pair[1]), d)))
        faces.append(verts)
    gluings = []
    for pair in data["gluings"]:
        try:
            (f, i), (g, j) = pair
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad gluing {pair!r}") from exc
        gluings.append(((f, i), (g, j)))
    marked = [tuple(c) for c in data.get("marked_vertices", [])]
    return Surface(faces, gluings, d=d, marked=marked, name=data.get("name"))


def loads_surface(text: str) -> Surface:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"surface file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("surface file must hold an object")
    return surface_from_dict(data)


def load_surface(path) -> Surface:
    with open(path, encoding="utf-8") as fh:
        return loads_surface(fh.read())
