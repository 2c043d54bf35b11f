from __future__ import annotations

import random

from flatblock.builders import builtin, golden_l, l_shaped, octagon, origami, staircase, torus, torus_grid
from flatblock.exactnum import cross, vec
from flatblock.holonomy import (
    absolute_holonomy,
    degree_over,
    format_torus_cover,
    gauss_reduce,
    in_lattice,
    reduce_mod_lattice,
    torus_cover,
)
from flatblock.surface import gl2_act
from flatblock.exactnum import parse_matrix

Z2 = (vec(1, 0), vec(0, 1))


def test_torus_and_grid():
    for M in (torus(), torus_grid(3)):
        tc = torus_cover(M)
        assert tc.verdict and tc.degree == 1
        assert abs(cross(*tc.lattice)) == 1


def test_l_shaped_is_degree_three():
    tc = torus_cover(l_shaped())
    assert tc.verdict and tc.degree == 3
    assert degree_over(l_shaped(), Z2) == 3
    # one branch point, the cone point of angle 6pi
    assert [(c, k) for c, _, k in tc.branch_points] == [(0, 3)]


def test_staircase_quotient_lattice():
    S = staircase()
    tc = torus_cover(S)
    assert tc.verdict and tc.degree == 3
    assert in_lattice(vec(2, 0), tc.lattice) and in_lattice(vec(1, 1), tc.lattice)
    assert abs(cross(*tc.lattice)) == 2
    assert degree_over(S, Z2) == 6


def test_origamis_cover_the_unit_torus():
    rng = random.Random(21)
    checked = 0
    while checked < 15:
        m = rng.randint(1, 8)
        h, v = list(range(1, m + 1)), list(range(1, m + 1))
        rng.shuffle(h)
        rng.shuffle(v)
        try:
            M = origami(h, v)
        except Exception:
            continue
        checked += 1
        tc = torus_cover(M)
        assert tc.verdict
        assert degree_over(M, Z2) == m
        # the period lattice sits inside Z^2 and the two degrees differ by its index
        assert all(in_lattice(g, tc.lattice) for g in absolute_holonomy(M).generators)
        assert all(in_lattice(b, Z2) for b in tc.lattice)
        covol = abs(cross(*tc.lattice))
        assert covol.is_integer() and tc.degree * covol == m


def test_golden_l_is_not_a_torus_cover():
    tc = torus_cover(golden_l())
    assert not tc.verdict
    assert tc.group.z_rank > tc.group.span_dim == 2
    w = tc.witness
    if len(w) == 2:
        u, v = w
        assert cross(u, v) == 0
        ratio = v.x / u.x if u.x else v.y / u.y
        assert not ratio.is_rational()
    assert "torus_cover: no" in format_torus_cover(tc)


def test_octagon_is_not_a_torus_cover():
    assert not torus_cover(octagon()).verdict


def test_gl2_image_of_origami():
    M = l_shaped()
    g = parse_matrix("1,1,0,1")
    tc = torus_cover(gl2_act(M, g))
    assert tc.verdict and tc.degree == 3


def test_grid_cover_degree():
    M = builtin("grid_cover:2,2")
    tc = torus_cover(M)
    assert tc.verdict
    assert degree_over(M, Z2) == 2


def test_degree_over_rejects_small_lattice():
    assert degree_over(l_shaped(), (vec(2, 0), vec(0, 1))) is None


def test_gauss_reduction_and_mod():
    u, v = gauss_reduce(vec(5, 1), vec(4, 1))
    assert abs(cross(u, v)) == 1
    assert {(u.x.rational(), u.y.rational()), (v.x.rational(), v.y.rational())} <= {
        (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)
    }
    r = reduce_mod_lattice(vec("7/3", "-5/2"), Z2)
    assert r == vec("1/3", "1/2")
