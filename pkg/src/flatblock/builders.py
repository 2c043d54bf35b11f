"""Constructors for the standard surfaces: tori, origamis, L-shapes, covers."""

from __future__ import annotations

import itertools
import math
import re
from typing import Mapping, Sequence

from .errors import BadParams, DisconnectedCover, NotTransitive, UnknownBuiltin
from .exactnum import Mat2, Scalar, Vec2, parse_scalar, vec
from .surface import CoverData, Surface

# square corners and edges: 0 bottom, 1 right, 2 top, 3 left
BOTTOM, RIGHT, TOP, LEFT = 0, 1, 2, 3


def rectangle(x0, y0, w, h, d: int = 1) -> list[Vec2]:
    x0, y0, w, h = (v if isinstance(v, Scalar) else Scalar(v, 0, d) for v in (x0, y0, w, h))
    return [Vec2(x0, y0), Vec2(x0 + w, y0), Vec2(x0 + w, y0 + h), Vec2(x0, y0 + h)]


def torus(marked: bool = False) -> Surface:
    faces = [rectangle(0, 0, 1, 1)]
    gluings = [((0, BOTTOM), (0, TOP)), ((0, LEFT), (0, RIGHT))]
    cover = CoverData(Mat2.identity(), (vec(0, 0),), degree=1, base="torus")
    return Surface(faces, gluings, marked=[0] if marked else [], name="torus", cover=cover)


def torus_grid(n: int) -> Surface:
    """The unit torus cut into n^2 squares of side 1/n.

    Its vertex set is exactly ``m_n^{-1}(0)``.
    """
    if n < 1:
        raise BadParams("torus_grid needs n >= 1")
    side = Scalar(1) / n
    faces = []
    for j in range(n):
        for i in range(n):
            faces.append(rectangle(side * i, side * j, side, side))
    gluings = []
    for j in range(n):
        for i in range(n):
            f = j * n + i
            gluings.append(((f, RIGHT), (j * n + (i + 1) % n, LEFT)))
            gluings.append(((f, TOP), (((j + 1) % n) * n + i, BOTTOM)))
    cover = CoverData(Mat2.identity(), tuple(vec(0, 0) for _ in faces), degree=1, base="torus", info={"grid": n})
    return Surface(faces, gluings, name=f"torus_grid({n})", cover=cover)


def parse_permutation(spec, m: int | None = None) -> list[int]:
    """Permutation of ``1..m`` from image list or cycle notation, returned 0-based.

    ``[2, 3, 1]`` and ``"(1 2 3)"`` describe the same permutation.
    """
    if isinstance(spec, str):
        cycles = re.findall(r"\(([^()]*)\)", spec)
        if m is None:
            nums = [int(t) for c in cycles for t in re.split(r"[\s,]+", c.strip()) if t]
            m = max(nums, default=0)
        perm = list(range(m))
        for c in cycles:
            items = [int(t) - 1 for t in re.split(r"[\s,]+", c.strip()) if t]
            for a, b in zip(items, items[1:] + items[:1]):
                perm[a] = b
        return _check_perm(perm)
    perm = [int(x) - 1 for x in spec]
    return _check_perm(perm)


def _check_perm(perm: list[int]) -> list[int]:
    if sorted(perm) != list(range(len(perm))):
        raise BadParams(f"not a permutation: {[p + 1 for p in perm]}")
    return perm


def origami(h: Sequence[int] | str, v: Sequence[int] | str, name: str | None = None) -> Surface:
    """Square-tiled surface: square i glued right-to-left to h(i), top-to-bottom to v(i).

    Permutations act on ``1..m`` (image lists or cycle strings).
    """
    hp = parse_permutation(h)
    vp = parse_permutation(v)
    m = max(len(hp), len(vp))
    hp = hp + list(range(len(hp), m))
    vp = vp + list(range(len(vp), m))
    if not _transitive(hp, vp):
        raise NotTransitive("<h, v> does not act transitively")
    faces = [rectangle(0, 0, 1, 1) for _ in range(m)]
    gluings = []
    for i in range(m):
        gluings.append(((i, RIGHT), (hp[i], LEFT)))
        gluings.append(((i, TOP), (vp[i], BOTTOM)))
    cover = CoverData(Mat2.identity(), tuple(vec(0, 0) for _ in range(m)), degree=m, base="torus",
                      info={"h": tuple(hp), "v": tuple(vp)})
    return Surface(faces, gluings, name=name or "origami", cover=cover)


def _transitive(h: list[int], v: list[int]) -> bool:
    m = len(h)
    if m == 0:
        return False
    seen = {0}
    stack = [0]
    inv_h = [0] * m
    inv_v = [0] * m
    for i in range(m):
        inv_h[h[i]] = i
        inv_v[v[i]] = i
    while stack:
        i = stack.pop()
        for j in (h[i], v[i], inv_h[i], inv_v[i]):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == m


def commutator_cycle_type(h: Sequence[int], v: Sequence[int]) -> list[int]:
    """Cycle lengths of ``h v h^-1 v^-1`` (0-based permutations), sorted descending."""
    m = len(h)
    inv_h = [0] * m
    inv_v = [0] * m
    for i in range(m):
        inv_h[h[i]] = i
        inv_v[v[i]] = i
    # composition applied right to left: v^-1 first
    comm = [h[v[inv_h[inv_v[i]]]] for i in range(m)]
    seen = [False] * m
    lengths = []
    for i in range(m):
        if not seen[i]:
            n = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = comm[j]
                n += 1
            lengths.append(n)
    return sorted(lengths, reverse=True)


STAIRCASE_H = "(1 2)(3 4)(5 6)"
STAIRCASE_V = "(1 6)(2 3)(4 5)"
# cell positions of the six unit squares climbing the ladder
STAIRCASE_CELLS = ((0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2))


def staircase() -> Surface:
    """Six-cell Escher staircase in unit cells.

    Rows of two cells are horizontal cylinders; the deck map climbing one step
    is the cell permutation (1 3 5)(2 4 6).  The covering torus is R^2/L with
    L spanned by (2, 0) and (1, 1), of degree 3.
    """
    base = origami(STAIRCASE_H, STAIRCASE_V, name="staircase")
    lattice = Mat2(2, 1, 0, 1)  # columns (2,0) and (1,1)
    cover = CoverData(
        to_unit=lattice.inverse(),
        offsets=tuple(vec(x, y) for x, y in STAIRCASE_CELLS),
        degree=3,
        base="staircase-quotient",
        info={"deck": (2, 3, 4, 5, 0, 1), "lattice": ((2, 0), (1, 1))},
    )
    return Surface(base.faces, base.partner, name="staircase", cover=cover)


def l_shaped(a=1, b=1, d: int = 1, name: str | None = None) -> Surface:
    """L-shaped genus-2 surface: unit square with an a-wide arm to the right
    and a b-tall arm on top; opposite sides glued.

    Faces: 0 = corner square, 1 = right arm, 2 = top arm.
    """
    a = a if isinstance(a, Scalar) else Scalar(a, 0, d)
    b = b if isinstance(b, Scalar) else Scalar(b, 0, d)
    if a.sign() <= 0 or b.sign() <= 0:
        raise BadParams("l_shaped arms must have positive size")
    d = max(a.d, b.d)
    one = Scalar(1, 0, d)
    zero = Scalar(0, 0, d)
    faces = [
        rectangle(zero, zero, one, one, d),
        rectangle(one, zero, a, one, d),
        rectangle(zero, one, one, b, d),
    ]
    gluings = [
        ((0, RIGHT), (1, LEFT)),
        ((1, RIGHT), (0, LEFT)),
        ((2, RIGHT), (2, LEFT)),
        ((0, TOP), (2, BOTTOM)),
        ((2, TOP), (0, BOTTOM)),
        ((1, TOP), (1, BOTTOM)),
    ]
    cover = None
    if a.is_rational() and b.is_rational() and a.is_integer() and b.is_integer() and d == 1:
        cover = CoverData(
            Mat2.identity(),
            (vec(0, 0), vec(0, 0), vec(0, 0)),
            degree=int((1 + a * 1 + b * 1).rational()),
            base="torus",
        )
    return Surface(faces, gluings, d=d, name=name or f"l_shaped({a},{b})", cover=cover)


def golden_l() -> Surface:
    """L-shape whose bottom cylinder has circumference (1+sqrt5)/2 and top 1."""
    phi = parse_scalar("1/2+1/2*sqrt(5)")
    return l_shaped(phi - 1, Scalar(1, 0, 5), d=5, name="golden_l")


def octagon() -> Surface:
    """Regular octagon of side 1 with opposite sides glued (genus 2, one 6pi point)."""
    s = parse_scalar("1/2*sqrt(2)")
    o = Scalar(0, 0, 2)
    one = Scalar(1, 0, 2)
    pts = [
        Vec2(o, o), Vec2(one, o), Vec2(one + s, s), Vec2(one + s, one + s),
        Vec2(one, one + s + s), Vec2(o, one + s + s), Vec2(-s, one + s), Vec2(-s, s),
    ]
    gluings = [((0, i), (0, i + 4)) for i in range(4)]
    return Surface([pts], gluings, d=2, name="octagon")


# -- branched covers of the grid torus ------------------------------------

def _grid_edge_keys(n: int) -> list[tuple[str, int, int]]:
    return [(kind, i, j) for kind in ("v", "h") for j in range(n) for i in range(n)]


def grid_monodromy(n: int, k: int, shifts: Mapping[tuple[str, int, int], int]) -> dict[tuple[int, int], int]:
    """Local monodromy (in Z/k) around every grid vertex (i/n, j/n).

    ``('v', i, j)`` is the right side of cell (i, j), ``('h', i, j)`` its top.
    """
    def s(kind, i, j):
        return shifts.get((kind, i % n, j % n), 0)

    out = {}
    for j in range(n):
        for i in range(n):
            m = s("v", i - 1, j - 1) + s("h", i, j - 1) - s("v", i - 1, j) - s("h", i - 1, j - 1)
            out[(i, j)] = m % k
    return out


def branched_cover_grid(n: int, k: int, edge_shifts: Mapping[tuple[str, int, int], int]) -> Surface:
    """Cyclic degree-k cover of ``torus_grid(n)``.

    Face ``s*n*n + j*n + i`` is cell (i, j) on sheet s.  Crossing the right
    (top) side of cell (i, j) adds ``edge_shifts[('v'|'h', i, j)]`` to the sheet.
    """
    if n < 1 or k < 2:
        raise BadParams("branched_cover_grid needs n >= 1 and k >= 2")
    for key in edge_shifts:
        if key not in set(_grid_edge_keys(n)):
            raise BadParams(f"unknown grid edge {key}")
    side = Scalar(1) / n
    faces = []
    for s in range(k):
        for j in range(n):
            for i in range(n):
                faces.append(rectangle(side * i, side * j, side, side))

    def fid(s, i, j):
        return (s % k) * n * n + (j % n) * n + (i % n)

    gluings = []
    for s in range(k):
        for j in range(n):
            for i in range(n):
                sv = edge_shifts.get(("v", i, j), 0)
                sh = edge_shifts.get(("h", i, j), 0)
                gluings.append(((fid(s, i, j), RIGHT), (fid(s + sv, i + 1, j), LEFT)))
                gluings.append(((fid(s, i, j), TOP), (fid(s + sh, i, j + 1), BOTTOM)))
    if not _faces_connected(len(faces), gluings):
        raise DisconnectedCover("edge shifts generate a proper subgroup; cover is disconnected")
    mono = grid_monodromy(n, k, edge_shifts)
    cover = CoverData(
        Mat2.identity(),
        tuple(vec(0, 0) for _ in faces),
        degree=k,
        base=f"torus_grid({n})",
        info={"grid": n, "sheets": k, "monodromy": mono, "shifts": dict(edge_shifts)},
    )
    return Surface(faces, gluings, name=f"branched_cover_grid({n},{k})", cover=cover)


def _faces_connected(n_faces: int, gluings) -> bool:
    adj: dict[int, set[int]] = {f: set() for f in range(n_faces)}
    for (f, _), (g, _) in gluings:
        adj[f].add(g)
        adj[g].add(f)
    seen = {0}
    stack = [0]
    while stack:
        f = stack.pop()
        for g in adj[f]:
            if g not in seen:
                seen.add(g)
                stack.append(g)
    return len(seen) == n_faces


def find_full_ramification_shifts(n: int, k: int, limit: int = 1 << 20) -> dict[tuple[str, int, int], int]:
    """Search edge shifts making every grid vertex's monodromy a generator of Z/k.

    Exhaustive in lexicographic order up to ``limit`` assignments; the result is
    re-checked through :func:`grid_monodromy` and connectivity.
    """
    keys = _grid_edge_keys(n)
    for count, values in enumerate(itertools.product(range(k), repeat=len(keys))):
        if count >= limit:
            break
        shifts = {key: val for key, val in zip(keys, values) if val}
        mono = grid_monodromy(n, k, shifts)
        if all(math.gcd(m, k) == 1 for m in mono.values()):
            try:
                branched_cover_grid(n, k, shifts)
            except DisconnectedCover:
                continue
            return shifts
    raise BadParams(f"no fully ramified shift assignment found for n={n}, k={k}")


# -- rectilinear splitting -----------------------------------------------

def split_rectilinear(vertices: Sequence[Vec2]):
    """Cut an axis-aligned simple polygon into grid rectangles.

    The grid lines pass through every vertex coordinate, so no rectangle
    edge meets a neighbour in a T-junction.  Returns
    ``(faces, internal_gluings, boundary)`` where ``boundary`` lists, for each
    original edge index, the ``(face, edge)`` pieces covering it in order.
    """
    from .exactnum import cross, dot, norm_sq

    n = len(vertices)
    for i in range(n):
        e = vertices[(i + 1) % n] - vertices[i]
        if e.x and e.y:
            raise BadParams("polygon is not axis-aligned")
    xs = _exact_sort({v.x for v in vertices})
    ys = _exact_sort({v.y for v in vertices})
    cells: dict[tuple[int, int], int] = {}
    faces: list[list[Vec2]] = []
    for a, (x0, x1) in enumerate(zip(xs, xs[1:])):
        xm = (x0 + x1) / 2
        for b, (y0, y1) in enumerate(zip(ys, ys[1:])):
            ym = (y0 + y1) / 2
            # count horizontal edges above the cell centre
            above = sum(
                1
                for i in range(n)
                if vertices[i].y == vertices[(i + 1) % n].y
                and (vertices[i].y - ym).sign() > 0
                and ((vertices[i].x - xm).sign() != (vertices[(i + 1) % n].x - xm).sign())
            )
            if above % 2:
                cells[(a, b)] = len(faces)
                faces.append([Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)])
    twice_area = vertices[0].x * 0
    for i in range(n):
        twice_area = twice_area + cross(vertices[i], vertices[(i + 1) % n])
    if not faces or twice_area.sign() <= 0:
        raise BadParams("polygon must be simple, nondegenerate and counterclockwise")
    internal = []
    for (a, b), f in cells.items():
        if (a + 1, b) in cells:
            internal.append(((f, RIGHT), (cells[(a + 1, b)], LEFT)))
        if (a, b + 1) in cells:
            internal.append(((f, TOP), (cells[(a, b + 1)], BOTTOM)))
    glued = {e for pair in internal for e in pair}
    boundary: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for f, face in enumerate(faces):
        for e in range(4):
            if (f, e) in glued:
                continue
            p, q = face[e], face[(e + 1) % 4]
            for i in range(n):
                u, w = vertices[i], vertices[(i + 1) % n]
                if _on_segment(p, u, w) and _on_segment(q, u, w) and dot(q - p, w - u).sign() > 0:
                    boundary[i].append((f, e))
                    break
            else:
                raise BadParams("rectilinear split failed; polygon must be simple and counterclockwise")
    for i in range(n):
        u = vertices[i]
        boundary[i] = _exact_sort(boundary[i], key=lambda fe: norm_sq(faces[fe[0]][fe[1]] - u))
    return faces, internal, boundary


def _exact_sort(values, key=lambda v: v):
    import functools

    return sorted(values, key=functools.cmp_to_key(lambda a, b: (key(a) - key(b)).sign()))


def _on_segment(p: Vec2, u: Vec2, w: Vec2) -> bool:
    from .exactnum import cross, dot

    if cross(w - u, p - u).sign():
        return False
    return dot(p - u, p - w).sign() <= 0


# -- registry --------------------------------------------------------------

BUILTINS = ("torus", "torus_grid", "staircase", "l_shaped", "golden_l", "octagon", "origami", "grid_cover")


def builtin(name: str, *params) -> Surface:
    """Named example surface, e.g. ``builtin('torus_grid', 3)`` or ``builtin('l_shaped:1,2')``."""
    if ":" in name and not params:
        name, _, rest = name.partition(":")
        params = tuple(p for p in rest.split(",") if p)
    name = name.strip()
    try:
        if name == "torus":
            _no_params(name, params)
            return torus()
        if name == "torus_marked":
            _no_params(name, params)
            return torus(marked=True)
        if name == "torus_grid":
            if len(params) != 1:
                raise BadParams("torus_grid takes one parameter n")
            return torus_grid(int(params[0]))
        if name == "staircase":
            _no_params(name, params)
            return staircase()
        if name == "l_shaped":
            if len(params) not in (0, 2):
                raise BadParams("l_shaped takes parameters a,b")
            if not params:
                return l_shaped()
            a, b = (p if isinstance(p, Scalar) else parse_scalar(str(p)) for p in params)
            d = max(a.d, b.d)
            return l_shaped(a.with_field(d), b.with_field(d), d=d)
        if name == "golden_l":
            _no_params(name, params)
            return golden_l()
        if name == "octagon":
            _no_params(name, params)
            return octagon()
        if name == "origami":
            if len(params) != 2:
                raise BadParams("origami takes two permutations h,v in cycle notation")
            return origami(str(params[0]), str(params[1]), name=f"origami({params[0]},{params[1]})")
        if name == "grid_cover":
            if len(params) != 2:
                raise BadParams("grid_cover takes parameters n,k")
            n, k = int(params[0]), int(params[1])
            return branched_cover_grid(n, k, find_full_ramification_shifts(n, k))
    except ValueError as exc:
        if isinstance(exc, BadParams):
            raise
        raise BadParams(str(exc)) from exc
    raise UnknownBuiltin(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


def _no_params(name, params):
    if params:
        raise BadParams(f"{name} takes no parameters")
