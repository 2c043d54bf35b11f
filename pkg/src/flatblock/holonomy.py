"""Absolute-period holonomy and torus-cover detection.

Closed loops come from the face adjacency graph: fix a spanning tree, develop
every face along it, and read off the translation mismatch across each
non-tree gluing.  A finitely generated subgroup of the plane is discrete
exactly when its rank as an abelian group equals the dimension of its real
span; both ranks are computed by exact elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateRank
from .exactnum import Scalar, Vec2, cross, dot, format_scalar, norm_sq
from .surface import Surface


@dataclass(frozen=True)
class HolonomyGroup:
    generators: tuple[Vec2, ...]
    z_rank: int
    span_dim: int
    lattice_basis: tuple[Vec2, Vec2] | None = None

    @property
    def discrete(self) -> bool:
        return self.z_rank == self.span_dim


@dataclass(frozen=True)
class TorusCover:
    """Outcome of :func:`torus_cover`.

    On ``yes`` the lattice is the absolute-period lattice, so ``degree`` is the
    smallest degree of a translation map onto a torus.  On ``no`` the
    ``witness`` is a pair of generators that are dependent over R but not
    over Q (or, failing that, more generators than the span dimension that
    are independent over Q).
    """

    verdict: bool
    group: HolonomyGroup
    lattice: tuple[Vec2, Vec2] | None = None
    degree: Scalar | None = None
    branch_points: tuple = ()
    witness: tuple[Vec2, ...] = ()


def face_offsets(surface: Surface) -> tuple[list[Vec2], list[tuple]]:
    """Developing offsets along a BFS spanning tree, and the non-tree gluings."""
    zero = Scalar(0, 0, surface.d)
    offsets: list[Vec2 | None] = [None] * len(surface.faces)
    offsets[0] = Vec2(zero, zero)
    tree: set = set()
    queue = [0]
    for f in queue:
        for i in range(len(surface.faces[f])):
            g, j = surface.partner[(f, i)]
            if offsets[g] is None:
                offsets[g] = offsets[f] - surface.shifts[(f, i)]
                tree.add((f, i))
                tree.add((g, j))
                queue.append(g)
    extra = sorted(e for e in surface.partner if e not in tree and e < surface.partner[e])
    return offsets, extra  # type: ignore[return-value]


def _coords(v: Vec2) -> list[Fraction]:
    return [Fraction(int(q.numerator), int(q.denominator)) for q in (v.x.a, v.x.b, v.y.a, v.y.b)]


def _rank_q(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col] / p
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _span_dim(vectors: list[Vec2]) -> int:
    nonzero = [v for v in vectors if not v.is_zero()]
    if not nonzero:
        return 0
    first = nonzero[0]
    return 2 if any(cross(first, v) for v in nonzero[1:]) else 1


def _integer_echelon(rows: list[list[int]]) -> list[list[int]]:
    """Row echelon form over Z (unimodular row operations); zero rows dropped."""
    rows = [list(r) for r in rows if any(r)]
    out = []
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        live = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            head = live[0]
            nxt = [head]
            for r in live[1:]:
                q = r[col] // head[col]
                r = [a - q * b for a, b in zip(r, head)]
                (nxt if r[col] else rest).append(r)
            live = nxt
        if live:
            head = live[0]
            if head[col] < 0:
                head = [-a for a in head]
            out.append(head)
        rows = [r for r in rest if any(r)]
    return out


def absolute_holonomy(surface: Surface) -> HolonomyGroup:
    offsets, extra = face_offsets(surface)
    gens = []
    for f, i in extra:
        g, _ = surface.partner[(f, i)]
        gens.append(offsets[f] - surface.shifts[(f, i)] - offsets[g])
    gens = [v for v in gens if not v.is_zero()]
    z_rank = _rank_q([_coords(v) for v in gens]) if gens else 0
    span = _span_dim(gens)
    basis = None
    if z_rank == span == 2:
        basis = _lattice_basis(gens, surface.d)
    return HolonomyGroup(tuple(gens), z_rank, span, basis)


def _lattice_basis(gens: list[Vec2], d: int) -> tuple[Vec2, Vec2]:
    coords = [_coords(v) for v in gens]
    den = 1
    for row in coords:
        for c in row:
            den = math.lcm(den, c.denominator)
    rational = all(not v.x.b and not v.y.b for v in gens)
    if rational:
        # columns (y, x): the echelon rows are (c, b) and (0, a)
        ints = [[int(r[2] * den), int(r[0] * den)] for r in coords]
        ech = _integer_echelon(ints)
        (c, b), (_, a) = ech
        b %= a
        u = Vec2(Scalar(Fraction(a, den), 0, d), Scalar(0, 0, d))
        v = Vec2(Scalar(Fraction(b, den), 0, d), Scalar(Fraction(c, den), 0, d))
        return u, v
    ints = [[int(c * den) for c in r] for r in coords]
    ech = _integer_echelon(ints)
    if len(ech) != 2:
        raise DegenerateRank(f"expected a rank 2 lattice, found rank {len(ech)}")
    u, v = (
        Vec2(Scalar(Fraction(r[0], den), Fraction(r[1], den), d), Scalar(Fraction(r[2], den), Fraction(r[3], den), d))
        for r in ech
    )
    return gauss_reduce(u, v)


def gauss_reduce(u: Vec2, v: Vec2) -> tuple[Vec2, Vec2]:
    """Lagrange-Gauss reduction with a positively oriented result."""
    if (norm_sq(u) - norm_sq(v)).sign() > 0:
        u, v = v, u
    while True:
        mu = dot(u, v) / norm_sq(u)
        k = (mu + Fraction(1, 2)).floor()
        v = v - u * k
        if (norm_sq(v) - norm_sq(u)).sign() >= 0:
            break
        u, v = v, u
    if cross(u, v).sign() < 0:
        v = -v
    return u, v


def lattice_coordinates(p: Vec2, basis: tuple[Vec2, Vec2]) -> tuple[Scalar, Scalar]:
    u, v = basis
    det = cross(u, v)
    return cross(p, v) / det, cross(u, p) / det


def reduce_mod_lattice(p: Vec2, basis: tuple[Vec2, Vec2]) -> Vec2:
    s, t = lattice_coordinates(p, basis)
    u, v = basis
    return u * s.frac() + v * t.frac()


def torus_cover(surface: Surface) -> TorusCover:
    group = absolute_holonomy(surface)
    if not group.discrete:
        return TorusCover(False, group, witness=_witness(group.generators))
    if group.z_rank < 2:
        raise DegenerateRank(f"holonomy is discrete of rank {group.z_rank}")
    basis = group.lattice_basis
    covol = abs(cross(*basis))
    degree = surface.area / covol
    if not degree.is_integer():
        raise AssertionError(f"non-integral degree {degree}")
    offsets, _ = face_offsets(surface)
    sing = surface.singular_classes() or [0]
    base_f, base_i = surface.classes[sing[0]][0]
    origin = surface.faces[base_f][base_i] + offsets[base_f]
    branch = []
    for cls in sing:
        f, i = surface.classes[cls][0]
        image = reduce_mod_lattice(surface.faces[f][i] + offsets[f] - origin, basis)
        branch.append((cls, image, surface.multiplicity[cls]))
    return TorusCover(True, group, basis, degree, tuple(branch))


def _witness(gens) -> tuple[Vec2, ...]:
    """Generators exposing the rank excess.

    Prefers two parallel generators with an irrational ratio; otherwise returns
    ``span_dim + 1`` generators that are independent over Q.
    """
    for i, u in enumerate(gens):
        for v in gens[i + 1:]:
            if cross(u, v):
                continue
            ratio = v.x / u.x if u.x else v.y / u.y
            if not ratio.is_rational():
                return u, v
    chosen: list[Vec2] = []
    target = _span_dim(list(gens)) + 1
    for v in gens:
        if _rank_q([_coords(w) for w in chosen + [v]]) > len(chosen):
            chosen.append(v)
            if len(chosen) == target:
                break
    return tuple(chosen)


def in_lattice(p: Vec2, basis: tuple[Vec2, Vec2]) -> bool:
    s, t = lattice_coordinates(p, basis)
    return s.is_integer() and t.is_integer()


def degree_over(surface: Surface, basis: tuple[Vec2, Vec2]) -> Scalar | None:
    """Degree of the translation map onto R^2/L for the lattice spanned by ``basis``.

    Such a map exists iff every absolute period lies in L; None otherwise.
    """
    group = absolute_holonomy(surface)
    if not all(in_lattice(g, basis) for g in group.generators):
        return None
    return surface.area / abs(cross(*basis))


def format_torus_cover(tc: TorusCover) -> str:
    def fv(v):
        return f"({format_scalar(v.x)},{format_scalar(v.y)})"

    if not tc.verdict:
        lines = ["torus_cover: no", f"z_rank: {tc.group.z_rank}", f"span_dim: {tc.group.span_dim}"]
        if tc.witness:
            lines.append("witness: " + " ".join(fv(w) for w in tc.witness))
        return "\n".join(lines) + "\n"
    u, v = tc.lattice
    lines = [
        "torus_cover: yes",
        f"lattice: [{fv(u)},{fv(v)}]",
        f"degree: {format_scalar(tc.degree)}",
        "branch_points: [" + ",".join(f"v{c}@{fv(p)}x{k}" for c, p, k in tc.branch_points) + "]",
    ]
    return "\n".join(lines) + "\n"
