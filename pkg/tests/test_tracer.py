from __future__ import annotations

import random
from fractions import Fraction

import pytest

from flatblock.blocking import project
from flatblock.builders import builtin, l_shaped, origami, staircase, torus, torus_grid
from flatblock.errors import BudgetTooLargeGuard, NoSingularities, SectorRequired, ZeroDirection
from flatblock.exactnum import parse_matrix, vec
from flatblock.surface import gl2_act, in_sector
from flatblock.tracer import (
    format_segments,
    reverse_segment,
    saddle_connections,
    segments_between,
    trace,
)


def _hols(segs):
    return sorted((s.holonomy.x.rational(), s.holonomy.y.rational()) for s in segs)


def _lattice_oracle(x, y, budget):
    out = []
    for a in range(-7, 8):
        for b in range(-7, 8):
            h = (y[0] - x[0] + a, y[1] - x[1] + b)
            if h != (0, 0) and h[0] ** 2 + h[1] ** 2 <= budget:
                out.append(h)
    return sorted(out)


def _rand_q(rng):
    den = rng.choice([1, 2, 3, 4, 5, 7, 9])
    return Fraction(rng.randrange(den), den)


# -- trace -----------------------------------------------------------------------

def test_trace_torus_horizontal_loop():
    T = torus()
    res = trace(T, T.point(0, vec("1/2", "1/2")), vec(1, 0), 9)
    assert res.stopped == "budget" and res.exact_end
    assert res.holonomy == vec(3, 0)
    assert res.point == T.point(0, vec("1/2", "1/2"))


def test_trace_irrational_budget_stops_at_last_crossing():
    T = torus()
    res = trace(T, T.point(0, vec("1/2", "1/2")), vec(1, 0), 5)
    assert res.stopped == "budget" and not res.exact_end
    assert res.holonomy == vec("3/2", 0)


def test_trace_l_horizontal_prongs():
    # every square corner of the 3-square L is the cone point, so each of the
    # three horizontal prongs stops after one unit
    L = l_shaped()
    xi = L.vertex_point(0)
    prongs = [c for c in L.classes[0] if in_sector(vec(1, 0), *L.corner_sector(c))]
    assert len(prongs) == 3
    for corner in prongs:
        res = trace(L, xi, vec(1, 0), 4, corner=corner)
        assert res.stopped == "singularity" and res.point == xi
        assert res.holonomy == vec(1, 0)


def test_trace_errors():
    L = l_shaped()
    with pytest.raises(ZeroDirection):
        trace(L, L.point(0, vec("1/2", "1/2")), vec(0, 0), 4)
    with pytest.raises(SectorRequired):
        trace(L, L.vertex_point(0), vec(1, 0), 4)


# -- segments_between ------------------------------------------------------------

def test_torus_half_point_segments():
    T = torus()
    segs = segments_between(T, T.point(0, vec(0, 0)), T.point(0, vec("1/2", "1/2")), 4)
    assert len(segs) == 12
    assert _hols(segs) == _lattice_oracle((0, 0), (Fraction(1, 2), Fraction(1, 2)), 4)


def test_torus_shortest_loops():
    T = torus()
    o = T.point(0, vec(0, 0))
    assert _hols(segments_between(T, o, o, 1)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_zero_budget_is_empty():
    L = l_shaped()
    assert segments_between(L, L.vertex_point(0), L.vertex_point(0), 0) == []


def test_lattice_oracle_random():
    rng = random.Random(11)
    T = torus()
    for _ in range(40):
        x = (_rand_q(rng), _rand_q(rng))
        y = (_rand_q(rng), _rand_q(rng))
        budget = rng.randint(0, 25)
        segs = segments_between(T, T.point(0, vec(*x)), T.point(0, vec(*y)), budget)
        assert _hols(segs) == _lattice_oracle(x, y, budget)


def test_output_sorted_and_unique():
    L = l_shaped()
    segs = segments_between(L, L.point(0, vec("1/3", "1/5")), L.point(2, vec("2/3", "10/7")), 20)
    keys = [s.key() for s in segs]
    assert len(set(keys)) == len(keys)
    lens = [s.length_sq for s in segs]
    assert all((a - b).sign() <= 0 for a, b in zip(lens, lens[1:]))
    for s in segs:
        assert all(0 <= c.t < 1 for c in s.crossings)


def test_reversibility():
    rng = random.Random(4)
    for M in (l_shaped(), staircase(), origami("(1 2 3)", "(1 2)")):
        for _ in range(3):
            fx, fy = rng.randrange(len(M.faces)), rng.randrange(len(M.faces))
            x = M.point(fx, M.faces[fx][0] + vec(_rand_q(rng) / 2 + Fraction(1, 11), Fraction(1, 13)))
            y = M.point(fy, M.faces[fy][0] + vec(Fraction(2, 9), _rand_q(rng) / 2 + Fraction(1, 17)))
            fwd = segments_between(M, x, y, 12)
            back = {s.key() for s in segments_between(M, y, x, 12)}
            assert fwd
            for s in fwd:
                assert reverse_segment(M, s).key() in back


def test_gl2_equivariance_on_torus():
    T = torus()
    g = parse_matrix("2,0,0,1/2")
    G = gl2_act(T, g)
    x, y = vec("1/5", "1/3"), vec("3/4", "1/7")
    budget = 16
    src = segments_between(T, T.point(0, x), T.point(0, y), budget)
    # images have length^2 at most 4*budget; compare after filtering by the preimage norm
    img = segments_between(G, G.point(0, g @ x), G.point(0, g @ y), 4 * budget)
    inv = g.inverse()
    pulled = sorted(
        (h.x.rational(), h.y.rational())
        for h in (inv @ s.holonomy for s in img)
        if (h.x * h.x + h.y * h.y - budget).sign() <= 0
    )
    assert pulled == _hols(src)


def test_vertex_endpoints_and_saddle_connections():
    L = l_shaped()
    sc = saddle_connections(L, 4)
    hols = [(s.holonomy.x.rational(), s.holonomy.y.rational()) for s in sc]
    # three horizontal connections of length 1; (2,0) would pass through the cone point
    assert hols.count((1, 0)) == 3 and (2, 0) not in hols
    assert len(sc) == 24
    marked = torus(marked=True)
    assert _hols(saddle_connections(marked, 1)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    with pytest.raises(NoSingularities):
        saddle_connections(torus(), 1)


def test_no_singular_point_inside_segments():
    L = l_shaped()
    xi = L.vertex_point(0)
    for s in segments_between(L, xi, xi, 13):
        # interior pieces never end at the cone point before the last one
        for p in s.pieces[:-1]:
            end = L.point(p.face, p.end)
            assert end != xi


def test_regular_vertex_passages_are_allowed():
    # torus_grid(2) has four regular unmarked vertices; the diagonal passes two of them
    M = torus_grid(2)
    x = M.point(0, vec("1/8", "1/8"))
    segs = segments_between(M, x, x, 2)
    assert (1, 1) in _hols(segs)
    diag = next(s for s in segs if _hols([s]) == [(1, 1)])
    assert any(c.t == 0 for c in diag.crossings)


def test_node_cap_guard():
    L = l_shaped()
    with pytest.raises(BudgetTooLargeGuard):
        segments_between(L, L.vertex_point(0), L.vertex_point(0), 400, node_cap=50)


def test_workers_do_not_change_output():
    M = staircase()
    x = M.point(0, vec("1/3", "1/7"))
    y = M.point(3, M.faces[3][0] + vec("1/2", "2/9"))
    a = format_segments(segments_between(M, x, y, 30))
    b = format_segments(segments_between(M, x, y, 30, workers=3))
    assert a == b and a


def test_segment_format_line():
    T = torus()
    segs = segments_between(T, T.point(0, vec(0, 0)), T.point(0, vec("1/2", "1/2")), 1)
    line = segs[0].format()
    assert line.startswith("len_sq=1/2 hol=(") and "crossings=[" in line


def test_cover_projection_consistency():
    M = builtin("grid_cover:2,2")
    base = torus_grid(2)
    cover = M.cover
    x = M.point(0, M.faces[0][0] + vec("1/9", "1/7"))
    y = M.point(5, M.faces[5][0] + vec("2/7", "1/5"))
    segs = segments_between(M, x, y, 6)
    assert segs
    px, py = project(M, x), project(M, y)
    base_segs = segments_between(base, _base_point(base, px), _base_point(base, py), 6 * _scale(cover))
    base_hols = {(h.x.rational(), h.y.rational()) for h in (s.holonomy for s in base_segs)}
    for s in segs:
        h = cover.to_unit @ s.holonomy
        assert (h.x.rational(), h.y.rational()) in base_hols


def _scale(cover):
    # largest squared stretch of the linear part, bounded by its Frobenius norm^2
    m = cover.to_unit
    return sum(v.rational() ** 2 for v in (m.a, m.b, m.c, m.d)) + 1


def _base_point(base, p):
    for f in range(len(base.faces)):
        if base.face_contains(f, p):
            return base.point(f, p)
    raise AssertionError("point not found on base")
