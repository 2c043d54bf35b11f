"""Rational billiard tables and their translation-surface unfoldings.

The linear parts of the reflections in the sides of a rational polygon
generate a finite dihedral group G.  One copy ``g(P)`` is made for each
``g`` in G; side ``i`` of copy ``g`` is glued to side ``i`` of copy
``g r_i``.  Copies with ``det g = -1`` have their vertex order reversed so
every face stays counterclockwise, which makes each gluing a translation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BadParams, FieldInsufficient, NonConvexFace
from .exactnum import Mat2, S, Scalar, Vec2, cross, dot, norm_sq
from .surface import Surface, SurfacePoint, _polygon_area

GROUP_CAP = 4096

# tan(pi * p/q) for the angles whose tangent is quadratic: q -> (radicand, {p: (a, b)})
# meaning a + b*sqrt(radicand).  q = 2 is handled separately (tangent undefined).
_TAN = {
    4: (1, {1: (1, 0), 3: (-1, 0)}),
    3: (3, {1: (0, 1), 2: (0, -1)}),
    6: (3, {1: (0, Fraction(1, 3)), 5: (0, Fraction(-1, 3))}),
    12: (3, {1: (2, -1), 5: (2, 1), 7: (-2, -1), 11: (-2, 1)}),
    8: (2, {1: (-1, 1), 3: (1, 1), 5: (-1, -1), 7: (1, -1)}),
}


def _field_name(d: int) -> str:
    return "Q" if d == 1 else f"Q(sqrt{d})"


def angle_tangent(angle: Fraction, d: int) -> Scalar | None:
    """tan(pi * angle) as an element of Q(sqrt d); None for a right angle.

    Raises FieldInsufficient when the rotation by that angle is not defined
    over the field.
    """
    p, q = angle.numerator, angle.denominator
    if not 0 < angle < 1:
        raise BadParams(f"interior angle pi*{angle} must lie strictly between 0 and pi")
    if q == 2:
        return None
    entry = _TAN.get(q)
    if entry is None or (entry[0] != 1 and entry[0] != d):
        raise FieldInsufficient(f"cos(pi*{p}/{q}) is not representable in {_field_name(d)}")
    radicand, table = entry
    a, b = table[p]
    if radicand == 1:
        return Scalar(a, 0, d)
    return Scalar(a, b, d)


@dataclass(frozen=True)
class RationalPolygon:
    """A convex polygon whose angle at vertex ``i`` is ``pi * angles[i]``."""

    vertices: tuple[Vec2, ...]
    angles: tuple[Fraction, ...]
    d: int = 1

    def __post_init__(self):
        n = len(self.vertices)
        if n < 3 or len(self.angles) != n:
            raise BadParams("need at least three vertices and one angle per vertex")
        if sum(self.angles) != n - 2:
            raise BadParams(f"angles sum to pi*{sum(self.angles)}, expected pi*{n - 2}")
        tangents = []
        bad = []
        for ang in self.angles:
            try:
                tangents.append(angle_tangent(ang, self.d))
            except FieldInsufficient:
                bad.append(ang)
        if bad:
            worst = min(bad)
            raise FieldInsufficient(
                f"cos(pi*{worst.numerator}/{worst.denominator}) is not representable in {_field_name(self.d)}"
            )
        for i, tan in enumerate(tangents):
            here = self.vertices[i]
            a = self.vertices[(i + 1) % n] - here
            b = self.vertices[i - 1] - here
            c = cross(a, b)
            if c.sign() <= 0:
                raise NonConvexFace(f"polygon is not strictly convex counterclockwise at vertex {i}")
            ok = not dot(a, b) if tan is None else c == tan * dot(a, b)
            if not ok:
                raise BadParams(f"vertex {i} does not have angle pi*{self.angles[i]}")

    @property
    def area(self) -> Scalar:
        return _polygon_area(self.vertices)


def polygon(vertices: Sequence, angles: Sequence, d: int = 1) -> RationalPolygon:
    verts = tuple(v.with_field(d) if isinstance(v, Vec2) else Vec2(S(v[0], d), S(v[1], d)) for v in vertices)
    return RationalPolygon(verts, tuple(Fraction(a) for a in angles), d)


def reflection(u: Vec2) -> Mat2:
    """Linear reflection fixing the line spanned by ``u``."""
    n = norm_sq(u)
    xx, yy, xy = u.x * u.x, u.y * u.y, u.x * u.y
    return Mat2((xx - yy) / n, xy * 2 / n, xy * 2 / n, (yy - xx) / n)


def reflection_group(P: RationalPolygon) -> list[Mat2]:
    """Elements of the group generated by the side reflections, in BFS order."""
    n = len(P.vertices)
    gens = [reflection(P.vertices[(i + 1) % n] - P.vertices[i]) for i in range(n)]
    group = [Mat2.identity(P.d)]
    index = {group[0]: 0}
    for g in group:
        for r in gens:
            h = g @ r
            if h not in index:
                if len(group) >= GROUP_CAP:
                    raise BadParams(f"reflection group exceeds {GROUP_CAP} elements")
                index[h] = len(group)
                group.append(h)
    return group


@dataclass(frozen=True)
class PointLift:
    """Sends a point of P to its copies on the unfolded surface."""

    surface: Surface
    group: tuple[Mat2, ...]

    def __call__(self, pos: Vec2) -> list[SurfacePoint]:
        pos = pos.with_field(self.surface.d)
        out = {self.surface.point(f, g @ pos) for f, g in enumerate(self.group)}
        return sorted(out, key=lambda p: p.sort_key())


def unfold_billiard(P: RationalPolygon, name: str | None = None) -> tuple[Surface, PointLift]:
    group = reflection_group(P)
    index = {g: k for k, g in enumerate(group)}
    n = len(P.vertices)
    faces = []
    for g in group:
        img = [g @ v for v in P.vertices]
        if g.det().sign() < 0:
            img.reverse()
        faces.append(img)

    def face_edge(k: int, i: int) -> int:
        # side i of P runs from vertex i to i+1; reversed copies list it as edge n-2-i
        return i if group[k].det().sign() > 0 else (n - 2 - i) % n

    gens = [reflection(P.vertices[(i + 1) % n] - P.vertices[i]) for i in range(n)]
    gluings = {}
    for k, g in enumerate(group):
        for i in range(n):
            other = index[g @ gens[i]]
            gluings[(k, face_edge(k, i))] = (other, face_edge(other, i))
    surface = Surface(faces, gluings, P.d, name=name or f"unfolding({n}-gon)")
    return surface, PointLift(surface, tuple(group))


def square() -> RationalPolygon:
    return polygon([(0, 0), (1, 0), (1, 1), (0, 1)], ["1/2"] * 4)


def right_isosceles() -> RationalPolygon:
    return polygon([(0, 0), (1, 0), (0, 1)], ["1/2", "1/4", "1/4"])


POLYGONS = {"square": square, "right_isosceles": right_isosceles}
