"""Blocking sets: verification, bounds on blocking cardinality, torus formulas.

Every bound here is about a finite family: the segments from x to y up to a
length budget.  A pairwise interior-disjoint subfamily of size n forces any
blocking set to have at least n points.  A set stabbing the whole family is a
blocking set certified only up to the budget.  The one unconditional upper
certificate is the descent argument of :func:`certify_non_illumination`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BadParams, ContainsEndpoint, NoCoverData
from .exactnum import Scalar, Vec2, cross, dot, format_scalar, norm_sq
from .surface import VERTEX, Surface, SurfacePoint
from .tracer import Segment, segments_between

# family sizes beyond this are solved greedily and flagged non-optimal
EXACT_LIMIT = 2000


@dataclass(frozen=True)
class BlockingInstance:
    surface: Surface
    x: SurfacePoint
    y: SurfacePoint
    budget: Scalar

    def segments(self, workers: int = 1) -> list[Segment]:
        return segments_between(self.surface, self.x, self.y, self.budget, workers=workers)


@dataclass(frozen=True)
class Verification:
    blocked: bool
    segments: int
    witness: Segment | None = None


# -- point / segment incidence ------------------------------------------------

@dataclass(frozen=True)
class _Span:
    seg: int
    face: int
    start: Vec2
    end: Vec2
    s0: Scalar
    s1: Scalar
    box: tuple[float, float, float, float]


def _spans(index: int, seg: Segment) -> list[_Span]:
    hol = seg.holonomy
    use_x = bool(hol.x)
    total = hol.x if use_x else hol.y
    out = []
    s = Scalar(0, 0, hol.x.d)
    for p in seg.pieces:
        delta = (p.end.x - p.start.x) if use_x else (p.end.y - p.start.y)
        s_next = s + delta / total
        (ax, ay), (bx, by) = p.start.to_float(), p.end.to_float()
        box = (min(ax, bx) - 1e-9, max(ax, bx) + 1e-9, min(ay, by) - 1e-9, max(ay, by) + 1e-9)
        out.append(_Span(index, p.face, p.start, p.end, s, s_next, box))
        s = s_next
    return out


def _param_on_span(span: _Span, pos: Vec2) -> Scalar | None:
    """Global parameter of ``pos`` if it lies on the closed span."""
    r = span.end - span.start
    w = pos - span.start
    if cross(r, w):
        return None
    rr = norm_sq(r)
    t = dot(w, r) / rr
    if t.sign() < 0 or (t - 1).sign() > 0:
        return None
    return span.s0 + (span.s1 - span.s0) * t


def _interior(s: Scalar) -> bool:
    return s.sign() > 0 and (s - 1).sign() < 0


def point_on_interior(surface: Surface, seg: Segment, point: SurfacePoint, spans=None) -> bool:
    """Whether ``point`` lies in the interior of ``seg``."""
    if surface.point_is_singular(point):
        return False
    reps = surface.representations(point)
    for span in spans if spans is not None else _spans(0, seg):
        for f, pos in reps:
            if f != span.face:
                continue
            s = _param_on_span(span, pos)
            if s is not None and _interior(s):
                return True
    return False


def verify_blocking(inst: BlockingInstance, points: Iterable[SurfacePoint], segments=None) -> Verification:
    """Blocked iff every segment up to the budget has a point of ``points`` inside it."""
    pts = list(points)
    if inst.x in pts or inst.y in pts:
        raise ContainsEndpoint("a blocking set may not contain x or y")
    M = inst.surface
    segs = inst.segments() if segments is None else segments
    live = [p for p in pts if not M.point_is_singular(p)]
    for seg in segs:
        spans = _spans(0, seg)
        if not any(point_on_interior(M, seg, p, spans) for p in live):
            return Verification(False, len(segs), seg)
    return Verification(True, len(segs))


# -- pairwise geometry ----------------------------------------------------------

@dataclass
class _Arrangement:
    """Incidences among a segment family, computed once per family."""

    surface: Surface
    segments: Sequence[Segment]
    spans: list[list[_Span]] = field(default_factory=list)
    conflicts: list[int] = field(default_factory=list)  # bitmask per segment
    transversal: dict = field(default_factory=dict)  # point key -> (point, segment mask)
    breaks: list[list[Scalar]] = field(default_factory=list)  # interior parameters per segment
    overlap_partners: list[set] = field(default_factory=list)

    def build(self) -> "_Arrangement":
        M = self.surface
        n = len(self.segments)
        self.spans = [_spans(i, s) for i, s in enumerate(self.segments)]
        self.conflicts = [0] * n
        self.breaks = [[] for _ in range(n)]
        self.overlap_partners = [set() for _ in range(n)]
        by_face: dict[int, list[_Span]] = {}
        for spans in self.spans:
            for sp in spans:
                by_face.setdefault(sp.face, []).append(sp)
        for face, spans in by_face.items():
            for a_i in range(len(spans)):
                a = spans[a_i]
                for b in spans[a_i + 1:]:
                    if a.seg == b.seg:
                        continue
                    if a.box[1] < b.box[0] or b.box[1] < a.box[0] or a.box[3] < b.box[2] or b.box[3] < a.box[2]:
                        continue
                    self._pair(face, a, b)
        # passages through regular vertices
        passages: dict[int, dict[int, list[Scalar]]] = {}
        for i, spans in enumerate(self.spans):
            for sp in spans[:-1]:
                point = M.point(sp.face, sp.end)
                if point.kind == VERTEX:
                    passages.setdefault(point.vertex_class, {}).setdefault(i, []).append(sp.s1)
        for cls, hits in passages.items():
            point = M.vertex_point(cls)
            mask = 0
            for i, params in hits.items():
                mask |= 1 << i
                self.breaks[i].extend(params)
            self._add_point(point, mask)
            for i in hits:
                self.conflicts[i] |= mask & ~(1 << i)
        return self

    def _add_point(self, point: SurfacePoint, mask: int):
        key = point.key()
        if key in self.transversal:
            old = self.transversal[key]
            self.transversal[key] = (old[0], old[1] | mask)
        else:
            self.transversal[key] = (point, mask)

    def _pair(self, face: int, a: _Span, b: _Span):
        r = a.end - a.start
        e = b.end - b.start
        den = cross(r, e)
        w = b.start - a.start
        if den:
            s = cross(w, e) / den
            u = cross(w, r) / den
            if s.sign() < 0 or (s - 1).sign() > 0 or u.sign() < 0 or (u - 1).sign() > 0:
                return
            sa = a.s0 + (a.s1 - a.s0) * s
            sb = b.s0 + (b.s1 - b.s0) * u
            if not (_interior(sa) and _interior(sb)):
                return
            point = self.surface.point(face, a.start + r * s)
            self._add_point(point, (1 << a.seg) | (1 << b.seg))
            self.breaks[a.seg].append(sa)
            self.breaks[b.seg].append(sb)
            self._conflict(a.seg, b.seg)
            return
        if cross(w, r):
            return  # parallel, disjoint lines
        rr = norm_sq(r)
        t0 = dot(b.start - a.start, r) / rr
        t1 = dot(b.end - a.start, r) / rr
        lo, hi = (t0, t1) if t0 <= t1 else (t1, t0)
        zero = Scalar(0, 0, rr.d)
        one = zero + 1
        lo = lo if lo > zero else zero
        hi = hi if hi < one else one
        if (hi - lo).sign() < 0:
            return
        self.overlap_partners[a.seg].add(b.seg)
        self.overlap_partners[b.seg].add(a.seg)
        for t in (lo, hi):
            sa = a.s0 + (a.s1 - a.s0) * t
            pos = a.start + r * t
            sb = _param_on_span(b, pos)
            if _interior(sa):
                self.breaks[a.seg].append(sa)
            if sb is not None and _interior(sb):
                self.breaks[b.seg].append(sb)
        if (hi - lo).sign() > 0:
            self._conflict(a.seg, b.seg)
        else:
            sa = a.s0 + (a.s1 - a.s0) * lo
            sb = _param_on_span(b, a.start + r * lo)
            if _interior(sa) and sb is not None and _interior(sb):
                self._conflict(a.seg, b.seg)

    def _conflict(self, i: int, j: int):
        self.conflicts[i] |= 1 << j
        self.conflicts[j] |= 1 << i

    def point_at(self, i: int, s: Scalar) -> SurfacePoint:
        for sp in self.spans[i]:
            if (s - sp.s1).sign() <= 0:
                frac = (s - sp.s0) / (sp.s1 - sp.s0)
                return self.surface.point(sp.face, sp.start + (sp.end - sp.start) * frac)
        raise ValueError("parameter beyond segment end")

    def candidates(self, exclude: set) -> dict:
        """Stabbing candidates: key -> (point, mask of segments through it).

        Every point of a segment interior is either a transversal crossing or
        regular-vertex passage, an endpoint of a collinear overlap, or lies
        strictly between two consecutive such break points; in the last case
        it meets exactly the segments that the midpoint of that gap meets.
        """
        cands = dict(self.transversal)
        half = None
        for i, seg in enumerate(self.segments):
            if half is None:
                half = Scalar(1, 0, seg.holonomy.x.d) / 2
            params = _unique_sorted(self.breaks[i])
            stops = [Scalar(0, 0, half.d)] + params + [Scalar(1, 0, half.d)]
            probes = list(params)
            probes.extend((u + v) * half for u, v in zip(stops, stops[1:]))
            partners = self.overlap_partners[i]
            for s in probes:
                point = self.point_at(i, s)
                mask = 1 << i
                for j in partners:
                    if point_on_interior(self.surface, self.segments[j], point, self.spans[j]):
                        mask |= 1 << j
                key = point.key()
                if key in cands:
                    cands[key] = (cands[key][0], cands[key][1] | mask)
                else:
                    cands[key] = (point, mask)
        for key in [k for k in cands if k in exclude]:
            del cands[key]
        return cands


def _unique_sorted(values: list[Scalar]) -> list[Scalar]:
    out: list[Scalar] = []
    for v in sorted(values):
        if not out or v != out[-1]:
            out.append(v)
    return out


def interiors_intersect(surface: Surface, a: Segment, b: Segment) -> bool:
    arr = _Arrangement(surface, [a, b]).build()
    return bool(arr.conflicts[0])


# -- maximum independent set ------------------------------------------------------

def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def max_independent_set(adj: list[int], target: int | None = None, node_cap: int = 200000) -> tuple[list[int], bool]:
    """Maximum independent set of the conflict graph by branch and bound.

    Stops early once ``target`` vertices are found.  Returns the set and
    whether it is proven optimal (or reached ``target``).
    """
    n = len(adj)
    if n == 0:
        return [], True
    full = (1 << n) - 1
    # greedy warm start: smallest degree first
    order = sorted(range(n), key=lambda v: (_popcount(adj[v]), v))
    best: list[int] = []
    cand = full
    for v in order:
        if cand >> v & 1:
            best.append(v)
            cand &= ~adj[v] & ~(1 << v)
    state = {"best": best, "nodes": 0, "done": target is not None and len(best) >= target}
    if n > EXACT_LIMIT:
        return sorted(best), False

    def clique_cover(c: int) -> int:
        count = 0
        while c:
            v = (c & -c).bit_length() - 1
            clique = 1 << v
            rest = c & adj[v]
            while rest:
                u = (rest & -rest).bit_length() - 1
                clique |= 1 << u
                rest &= adj[u]
            c &= ~clique
            count += 1
        return count

    def search(c: int, chosen: list[int]):
        if state["done"]:
            return
        state["nodes"] += 1
        if state["nodes"] > node_cap:
            state["done"] = True
            state["capped"] = True
            return
        if not c:
            if len(chosen) > len(state["best"]):
                state["best"] = list(chosen)
                if target is not None and len(chosen) >= target:
                    state["done"] = True
            return
        if len(chosen) + clique_cover(c) <= len(state["best"]):
            return
        v = max(_bits(c), key=lambda u: _popcount(adj[u] & c))
        if not adj[v] & c:
            # isolated: always take it
            search(c & ~(1 << v), chosen + [v])
            return
        search(c & ~adj[v] & ~(1 << v), chosen + [v])
        search(c & ~(1 << v), chosen)

    search(full, [])
    optimal = not state.get("capped", False)
    return sorted(state["best"]), optimal


# -- minimum set cover -----------------------------------------------------------

def min_set_cover(universe: int, sets: list[int], node_cap: int = 500000) -> tuple[list[int], bool]:
    """Smallest list of indices into ``sets`` whose union covers ``universe``."""
    if not universe:
        return [], True
    n_elems = universe.bit_length()
    covering: dict[int, list[int]] = {e: [] for e in _bits(universe)}
    for idx, s in enumerate(sets):
        for e in _bits(s & universe):
            covering[e].append(idx)
    if any(not v for v in covering.values()):
        raise ValueError("some element is covered by no candidate")
    reach = {e: 0 for e in covering}
    for e, idxs in covering.items():
        for idx in idxs:
            reach[e] |= sets[idx]

    def greedy(unc: int) -> list[int]:
        out = []
        while unc:
            idx = max(range(len(sets)), key=lambda k: (_popcount(sets[k] & unc), -k))
            out.append(idx)
            unc &= ~sets[idx]
        return out

    state = {"best": greedy(universe), "nodes": 0, "capped": False}

    def lower(unc: int) -> int:
        count = 0
        rest = unc
        for e in sorted(_bits(unc), key=lambda e: len(covering[e])):
            if rest >> e & 1:
                count += 1
                rest &= ~reach[e]
        return count

    def search(unc: int, chosen: list[int]):
        if state["capped"]:
            return
        state["nodes"] += 1
        if state["nodes"] > node_cap:
            state["capped"] = True
            return
        if not unc:
            if len(chosen) < len(state["best"]):
                state["best"] = list(chosen)
            return
        if len(chosen) + lower(unc) >= len(state["best"]):
            return
        e = min(_bits(unc), key=lambda e: (len(covering[e]), e))
        opts = sorted(covering[e], key=lambda k: (-_popcount(sets[k] & unc), k))
        kept: list[int] = []
        for k in opts:
            m = sets[k] & unc
            if any(m & ~(sets[j] & unc) == 0 for j in kept):
                continue
            kept.append(k)
        for k in kept:
            search(unc & ~sets[k], chosen + [k])

    search(universe, [])
    del n_elems
    return state["best"], not state["capped"]


# -- bounds ----------------------------------------------------------------------

@dataclass(frozen=True)
class LowerBound:
    n: int
    family: tuple[Segment, ...]
    optimal: bool


def disjoint_family_lower_bound(inst: BlockingInstance, segments=None, target: int | None = None) -> LowerBound:
    """Largest pairwise interior-disjoint subfamily of the segments."""
    segs = inst.segments() if segments is None else list(segments)
    # with a target in view, try short prefixes first: a disjoint subfamily of
    # a prefix is a disjoint subfamily of the whole family
    size = 8 if target is not None else len(segs)
    while True:
        size = min(size, len(segs))
        part = segs[:size]
        arr = _Arrangement(inst.surface, part).build()
        chosen, optimal = max_independent_set(arr.conflicts, target)
        if size == len(segs) or (target is not None and len(chosen) >= target):
            return LowerBound(len(chosen), tuple(part[i] for i in chosen), optimal)
        size *= 2


def pairwise_disjoint(surface: Surface, family: Sequence[Segment]) -> bool:
    arr = _Arrangement(surface, list(family)).build()
    return not any(arr.conflicts)


@dataclass(frozen=True)
class StabResult:
    m: int
    points: tuple[SurfacePoint, ...]
    optimal: bool
    note: str = ""


def min_stab(inst: BlockingInstance, segments=None) -> StabResult:
    """Fewest points meeting the interior of every segment up to the budget."""
    segs = inst.segments() if segments is None else list(segments)
    if not segs:
        return StabResult(0, (), True, "no trajectories up to budget")
    arr = _Arrangement(inst.surface, segs).build()
    cands = arr.candidates({inst.x.key(), inst.y.key()})
    items = sorted(cands.values(), key=lambda pm: pm[0].sort_key())
    universe = (1 << len(segs)) - 1
    chosen, optimal = min_set_cover(universe, [m for _, m in items])
    points = tuple(sorted((items[k][0] for k in chosen), key=lambda p: p.sort_key()))
    return StabResult(len(points), points, optimal)


# -- torus formulas -----------------------------------------------------------------

def _frac_vec(v: Vec2) -> Vec2:
    return Vec2(v.x.frac(), v.y.frac())


def torus_point(p) -> Vec2:
    """A point of R^2/Z^2 with coordinates reduced into [0, 1)."""
    if not isinstance(p, Vec2):
        p = Vec2(*p)
    return _frac_vec(p)


def mn_preimage(n: int, p) -> list[Vec2]:
    """The n^2 points q with n*q = p on the unit torus."""
    if n < 1:
        raise BadParams("n must be positive")
    p = torus_point(p)
    return sorted(
        (torus_point((p + Vec2(i, j).with_field(p.x.d)) / n) for i in range(n) for j in range(n)),
        key=lambda v: (v.x, v.y),
    )


def torus_blocking_set(x, y, n: int = 2, a: int = 1) -> list[Vec2]:
    """Points a/n of the way along every segment from x to y on the unit torus.

    Computed as ``((n-a) x + a y + a (i, j)) / n``; this is the preimage under
    m_n of ``(n-a) x + a y``.  For ``x == y`` the point ``x`` itself is
    dropped, leaving ``x + m_n^{-1}(0)`` minus ``x``.
    """
    if n < 2 or not 1 <= a < n or math.gcd(a, n) != 1:
        raise BadParams(f"need n >= 2 and 1 <= a < n coprime to n (got n={n}, a={a})")
    x = torus_point(x)
    y = torus_point(y)
    image = x * (n - a) + y * a
    pts = mn_preimage(n, image)
    if x == y:
        pts = [p for p in pts if p != x]
    return pts


def torus_points(surface: Surface, pts: Iterable[Vec2]) -> list[SurfacePoint]:
    """Unit-torus coordinates as points of the one-face torus builtin."""
    return [surface.point(0, p.with_field(surface.d)) for p in pts]


# -- covers ----------------------------------------------------------------------------

def project(surface: Surface, p: SurfacePoint) -> Vec2:
    """Image of ``p`` on the unit torus under the recorded covering map."""
    cover = surface.cover
    if cover is None:
        raise NoCoverData(f"{surface.name or 'surface'} records no covering map")
    if p.kind == VERTEX:
        f, i = surface.classes[p.vertex_class][0]
        pos = surface.faces[f][i]
    else:
        f, pos = p.face, p.pos
    return torus_point(cover.to_unit @ (pos + cover.offsets[f]))


@dataclass(frozen=True)
class Lift:
    points: tuple[SurfacePoint, ...]
    breakdown: tuple  # (base point, preimage count, ramification indices)

    @property
    def cardinality(self) -> int:
        return len(self.points)


def lift_blocking_to_cover(surface: Surface, base_points: Iterable[Vec2]) -> Lift:
    """Full preimage of base torus points, with ramification data."""
    cover = surface.cover
    if cover is None:
        raise NoCoverData(f"{surface.name or 'surface'} records no covering map")
    inv = cover.to_unit.inverse()
    allpts: dict = {}
    breakdown = []
    for b in base_points:
        b = torus_point(b).with_field(surface.d)
        found: dict = {}
        for f, face in enumerate(surface.faces):
            imgs = [cover.to_unit @ (v + cover.offsets[f]) for v in face]
            lo_x = min(v.x for v in imgs).floor() - 1
            hi_x = max(v.x for v in imgs).floor() + 1
            lo_y = min(v.y for v in imgs).floor() - 1
            hi_y = max(v.y for v in imgs).floor() + 1
            for i in range(int(lo_x), int(hi_x) + 1):
                for j in range(int(lo_y), int(hi_y) + 1):
                    q = inv @ (b + Vec2(i, j).with_field(surface.d)) - cover.offsets[f]
                    if surface.face_contains(f, q):
                        p = surface.point(f, q)
                        found[p.key()] = p
        pts = sorted(found.values(), key=lambda p: p.sort_key())
        ram = tuple(surface.multiplicity[p.vertex_class] if p.kind == VERTEX else 1 for p in pts)
        if sum(ram) != cover.degree:
            raise AssertionError(f"preimages of {b} have total ramification {sum(ram)}, degree {cover.degree}")
        breakdown.append((b, len(pts), ram))
        for p in pts:
            allpts[p.key()] = p
    return Lift(tuple(sorted(allpts.values(), key=lambda p: p.sort_key())), tuple(breakdown))


@dataclass(frozen=True)
class NonIllumination:
    certified: bool
    n: int = 0
    a: int = 0
    base_set: tuple[Vec2, ...] = ()
    lifted: tuple[SurfacePoint, ...] = ()
    ramification: tuple = ()


def certify_non_illumination(surface: Surface, x: SurfacePoint, y: SurfacePoint, max_n: int = 6) -> NonIllumination:
    """Look for (n, a) whose formula blocking set on the base lifts to cone points only.

    Every segment from x to y projects to a base segment, which meets the
    formula set; the lift then runs into a cone point, so no segment exists.
    """
    if surface.cover is None or not surface.singular_classes():
        return NonIllumination(False)
    if surface.point_is_singular(x) or surface.point_is_singular(y):
        return NonIllumination(False)
    px, py = project(surface, x), project(surface, y)
    for n in range(2, max_n + 1):
        for a in range(1, n):
            if math.gcd(a, n) != 1:
                continue
            base = mn_preimage(n, px * (n - a) + py * a)
            lift = lift_blocking_to_cover(surface, base)
            if all(surface.point_is_singular(p) for p in lift.points):
                return NonIllumination(True, n, a, tuple(base), lift.points, lift.breakdown)
    return NonIllumination(False)


def check_non_illumination(surface: Surface, x: SurfacePoint, y: SurfacePoint, cert: NonIllumination) -> bool:
    """Independent re-check of a certificate's claims."""
    if not cert.certified:
        return False
    px, py = project(surface, x), project(surface, y)
    expected = mn_preimage(cert.n, px * (cert.n - cert.a) + py * cert.a)
    if list(cert.base_set) != expected:
        return False
    lift = lift_blocking_to_cover(surface, expected)
    return all(surface.point_is_singular(p) for p in lift.points)


# -- report --------------------------------------------------------------------

@dataclass(frozen=True)
class BlockingReport:
    instance: BlockingInstance
    segments: int
    lower: int
    lower_family: tuple[Segment, ...]
    lower_optimal: bool
    upper: int | None
    upper_kind: str  # "length-bounded", "structural" or "none"
    upper_source: str
    upper_set: tuple[SurfacePoint, ...]
    min_stab: int | None = None
    notes: tuple[str, ...] = ()

    @property
    def interval(self) -> tuple[int, int | None]:
        return self.lower, self.upper


def _formula_candidates(inst: BlockingInstance) -> list[tuple[str, list[SurfacePoint]]]:
    M = inst.surface
    out = []
    if M.cover is not None:
        px, py = project(M, inst.x), project(M, inst.y)
        base = torus_blocking_set(px, py, 2, 1)
        pts = list(lift_blocking_to_cover(M, base).points)
        label = "torus formula m_2^-1(x+y)" if px != py else "torus formula x+B0"
        if M.cover.degree > 1:
            label = "lifted " + label
        out.append((label, pts))
    if M.genus == 2:
        from .autos import apply, hyperelliptic_involution

        try:
            h, fixed = hyperelliptic_involution(M)
        except Exception:  # not in the supported family
            h = None
        if h is not None and apply(h, inst.x) == inst.y and inst.x != inst.y:
            out.append(("weierstrass points", [fp.point for fp in fixed if fp.label == "weierstrass"]))
    return out


def bc_report(inst: BlockingInstance, workers: int = 1, run_min_stab: bool | None = None) -> BlockingReport:
    """Certified interval for bc(x, y) at the instance budget."""
    M = inst.surface
    cert = certify_non_illumination(M, inst.x, inst.y)
    if cert.certified:
        return BlockingReport(
            inst, 0, 0, (), True, 0, "structural",
            f"descent n={cert.n} a={cert.a}: formula set lifts to cone points", (),
            notes=("no trajectory at any length",),
        )
    segs = inst.segments(workers=workers)
    if not segs:
        return BlockingReport(inst, 0, 0, (), True, 0, "length-bounded", "no trajectories up to budget", (), 0)
    best = None
    notes = []
    for label, pts in _formula_candidates(inst):
        if inst.x in pts or inst.y in pts:
            notes.append(f"{label}: contains an endpoint, skipped")
            continue
        ver = verify_blocking(inst, pts, segs)
        if ver.blocked:
            if best is None or len(pts) < len(best[1]):
                best = (label, pts)
        else:
            notes.append(f"{label}: not blocking at budget")
    target = len(best[1]) if best else None
    lower = disjoint_family_lower_bound(inst, segs, target)
    m = None
    if run_min_stab or (run_min_stab is None and (best is None or lower.n < len(best[1]))):
        stab = min_stab(inst, segs)
        m = stab.m
        if best is None or stab.m < len(best[1]):
            best = ("minimum stabbing set", list(stab.points))
        if not stab.optimal:
            notes.append("stabbing search capped; value is an upper estimate")
    label, pts = best
    pts = sorted(pts, key=lambda p: p.sort_key())
    return BlockingReport(
        inst, len(segs), lower.n, lower.family, lower.optimal, len(pts), "length-bounded", label,
        tuple(pts), m, tuple(notes),
    )


def format_point(p: SurfacePoint) -> str:
    if p.kind == VERTEX:
        return f"v{p.vertex_class}"
    return f"{p.face}:({format_scalar(p.pos.x)},{format_scalar(p.pos.y)})"


def format_report(rep: BlockingReport) -> str:
    upper = "inf" if rep.upper is None else str(rep.upper)
    lines = [
        f"x={format_point(rep.instance.x)} y={format_point(rep.instance.y)} budget_len_sq={format_scalar(rep.instance.budget)}",
        f"segments={rep.segments}",
        f"bc_interval=[{rep.lower},{upper}]",
        f"lower={rep.lower} certificate=disjoint-family optimal={'yes' if rep.lower_optimal else 'no'}",
        f"upper={upper} certificate={rep.upper_kind} source={rep.upper_source}",
        "upper_set=[" + ",".join(format_point(p) for p in rep.upper_set) + "]",
    ]
    if rep.min_stab is not None:
        lines.append(f"min_stab={rep.min_stab}")
    for seg in rep.lower_family:
        lines.append("family " + seg.format())
    for note in rep.notes:
        lines.append("note " + note)
    return "\n".join(lines) + "\n"
