from __future__ import annotations

import random
from fractions import Fraction

import pytest

from flatblock.autos import (
    apply,
    audit,
    deck_translation,
    hyperelliptic_involution,
    weierstrass_midpoint_check,
    weierstrass_points,
)
from flatblock.builders import l_shaped, octagon, staircase, torus
from flatblock.errors import BadParams, NotApplicable
from flatblock.exactnum import Mat2, Scalar, vec
from flatblock.tracer import Piece, make_segment, reverse_segment, segments_between


def _random_regular(M, rng):
    f = rng.randrange(len(M.faces))
    corner = M.faces[f][0]
    return M.point(f, corner + vec(Fraction(rng.randint(1, 97), 101), Fraction(rng.randint(1, 89), 103)))


def test_staircase_deck_map():
    S = staircase()
    D = deck_translation(S)
    assert D.order == 3 and D.derivative == Mat2.identity()
    assert audit(D)
    x = S.point(0, S.faces[0][0] + vec("1/3", "1/5"))
    orbit = [x, apply(D, x), apply(D, apply(D, x))]
    assert len(set(orbit)) == 3 and apply(D, orbit[2]) == x


def test_deck_map_preserves_segment_sets():
    S = staircase()
    D = deck_translation(S)
    x = S.point(0, S.faces[0][0] + vec("1/3", "1/5"))
    y = S.point(1, S.faces[1][0] + vec("1/2", "3/7"))
    a = segments_between(S, x, y, 10)
    b = segments_between(S, apply(D, x), apply(D, y), 10)
    assert sorted(str(s.holonomy) for s in a) == sorted(str(s.holonomy) for s in b)


def test_no_deck_map_on_plain_surfaces():
    with pytest.raises(NotApplicable):
        deck_translation(l_shaped())


def test_l_shaped_involution_fixed_points():
    L = l_shaped()
    h, fixed = hyperelliptic_involution(L)
    labels = [fp.label for fp in fixed]
    assert labels.count("cone point") == 1 and labels.count("weierstrass") == 5
    assert fixed[0].point == L.vertex_point(0)
    assert {str(p) for p in weierstrass_points(L)} == {
        "0:(1/2,1/2)", "1:(3/2,1/2)", "1:(3/2,0)", "2:(1/2,3/2)", "2:(1,3/2)"
    }
    assert audit(h) and h.order == 2


def test_octagon_involution():
    assert len(weierstrass_points(octagon())) == 5


def test_involution_only_in_genus_two():
    with pytest.raises(NotApplicable):
        hyperelliptic_involution(torus())
    with pytest.raises(NotApplicable):
        hyperelliptic_involution(staircase())


def test_involution_maps_segments_to_reversed_segments():
    L = l_shaped()
    h, _ = hyperelliptic_involution(L)
    rng = random.Random(3)
    x = _random_regular(L, rng)
    y = apply(h, x)
    segs = segments_between(L, x, y, 10)
    keys = {s.key() for s in segs}
    assert segs
    for s in segs:
        pieces = []
        for p in s.pieces:
            f, a = h.image(p.face, p.start)
            _, b = h.image(p.face, p.end)
            pieces.append(Piece(f, a, b))
        image = make_segment(L, y, x, -s.holonomy, pieces)
        assert reverse_segment(L, image).key() in keys


def test_midpoint_check_random():
    L = l_shaped()
    rng = random.Random(7)
    for _ in range(4):
        res = weierstrass_midpoint_check(L, _random_regular(L, rng), 16)
        assert res.verified and res.segments > 0


def test_midpoint_check_catches_missing_point():
    L = l_shaped()
    pts = weierstrass_points(L)
    x = L.point(0, vec("1/7", "2/9"))
    res = weierstrass_midpoint_check(L, x, 16, points=pts[1:])
    assert not res.verified
    mid = L.point(*res.counterexample.point_at(Scalar(1, 0, 1) / 2))
    assert mid == pts[0]


def test_midpoint_check_rejects_fixed_points():
    L = l_shaped()
    with pytest.raises(BadParams):
        weierstrass_midpoint_check(L, weierstrass_points(L)[0], 4)
