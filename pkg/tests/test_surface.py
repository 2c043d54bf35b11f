from __future__ import annotations

import random
from fractions import Fraction

import pytest

from flatblock.builders import (
    branched_cover_grid,
    builtin,
    commutator_cycle_type,
    find_full_ramification_shifts,
    l_shaped,
    octagon,
    origami,
    rectangle,
    split_rectilinear,
    staircase,
    torus,
    torus_grid,
)
from flatblock.errors import (
    BadParams,
    DisconnectedCover,
    FieldMismatch,
    NonConvexFace,
    NonParallelGluing,
    NonPositiveDeterminant,
    NotTransitive,
    ParseError,
    PointNotOnSurface,
    UnknownBuiltin,
)
from flatblock.exactnum import Mat2, Scalar, parse_matrix, vec
from flatblock.surface import EDGE, INTERIOR, VERTEX, build_surface, gl2_act, loads_surface


def _euler_ok(M):
    return sum(k - 1 for k in M.multiplicity) == 2 * M.genus - 2


def test_unit_square_torus():
    M = build_surface([rectangle(0, 0, 1, 1)], [((0, 0), (0, 2)), ((0, 1), (0, 3))])
    assert M.genus == 1
    assert len(M.classes) == 1 and M.multiplicity == (1,)
    assert M.singular == (False,)


def test_three_square_l():
    faces = [rectangle(0, 0, 1, 1), rectangle(1, 0, 1, 1), rectangle(0, 1, 1, 1)]
    gluings = [((0, 1), (1, 3)), ((1, 1), (0, 3)), ((2, 1), (2, 3)), ((0, 2), (2, 0)), ((2, 2), (0, 0)), ((1, 2), (1, 0))]
    M = build_surface(faces, gluings)
    # V=1, E=6, F=3 gives Euler characteristic -2
    assert len(M.classes) == 1 and len(M.partner) // 2 == 6
    assert M.genus == 2 and M.multiplicity == (3,)


def test_non_parallel_gluing():
    with pytest.raises(NonParallelGluing):
        build_surface([rectangle(0, 0, 1, 1)], [((0, 3), (0, 2)), ((0, 0), (0, 1))])


def test_non_convex_face():
    bad = [vec(0, 0), vec(2, 0), vec(1, "1/10"), vec(1, 1)]
    with pytest.raises(NonConvexFace):
        build_surface([bad], [((0, 0), (0, 2)), ((0, 1), (0, 3))])


def test_builtin_examples():
    T = builtin("torus")
    assert T.area == 1 and T.genus == 1
    S = builtin("staircase")
    assert len(S.faces) == 6 and S.area == 6 and _euler_ok(S)
    G = builtin("golden_l")
    assert G.d == 5 and G.genus == 2
    assert builtin("l_shaped:1,2").area == 4
    assert builtin("torus_grid:3").area == 1
    with pytest.raises(UnknownBuiltin):
        builtin("klein_bottle")
    with pytest.raises(BadParams):
        builtin("torus_grid")


def test_octagon():
    M = octagon()
    assert M.genus == 2 and M.multiplicity == (3,)


def test_torus_grid_vertices_are_mn_preimage_of_zero():
    n = 3
    M = torus_grid(n)
    assert len(M.classes) == n * n
    positions = set()
    for cls in M.classes:
        f, i = cls[0]
        v = M.faces[f][i]
        positions.add((v.x.rational() % 1, v.y.rational() % 1))
    assert positions == {(Fraction(i, n), Fraction(j, n)) for i in range(n) for j in range(n)}


def test_origami_examples():
    M = origami("(1 2 3)", "(1)(2)(3)")
    assert M.genus == 1 and M.area == 3
    # commutator with one 3-cycle: a single cone point of angle 6pi
    h, v = "(1 2)(3)", "(1 3)(2)"
    assert commutator_cycle_type([1, 0, 2], [2, 1, 0]) == [3]
    H2 = origami(h, v)
    assert H2.genus == 2 and sorted(H2.multiplicity) == [3]
    with pytest.raises(NotTransitive):
        origami([1, 2], [1, 2])


def test_origami_commutator_oracle_random():
    rng = random.Random(5)
    for _ in range(40):
        m = rng.randint(1, 7)
        h = list(range(m))
        v = list(range(m))
        rng.shuffle(h)
        rng.shuffle(v)
        try:
            M = origami([i + 1 for i in h], [i + 1 for i in v])
        except NotTransitive:
            continue
        assert M.area == m
        assert sorted(M.multiplicity, reverse=True) == commutator_cycle_type(h, v)
        assert _euler_ok(M)


def test_branched_cover_unramified():
    M = branched_cover_grid(1, 2, {("v", 0, 0): 1})
    assert M.genus == 1 and len(M.faces) == 2 and M.area == 2
    assert not M.singular_classes()


def test_branched_cover_fully_ramified():
    shifts = find_full_ramification_shifts(2, 2)
    M = branched_cover_grid(2, 2, shifts)
    # Riemann-Hurwitz: 2 - 2g = 2*0 - 4
    assert M.genus == 3
    assert sorted(M.multiplicity) == [2, 2, 2, 2]
    assert M.area == 2 * torus_grid(2).area


def test_branched_cover_disconnected():
    with pytest.raises(DisconnectedCover):
        branched_cover_grid(2, 2, {})


def test_gluing_vectors_cancel():
    for M in (staircase(), l_shaped(), octagon(), builtin("grid_cover:2,2")):
        for (f, i), (g, j) in M.partner.items():
            assert (M.edge_vector(f, i) + M.edge_vector(g, j)).is_zero()


def test_gl2_identity_and_diag():
    T = torus()
    assert gl2_act(T, Mat2.identity()) == T
    g = parse_matrix("2,0,0,1/2")
    G = gl2_act(T, g)
    assert G.area == T.area and G.genus == 1
    with pytest.raises(NonPositiveDeterminant):
        gl2_act(T, parse_matrix("1,1,1,1"))


def test_gl2_is_an_action():
    L = l_shaped()
    g = parse_matrix("1,1,0,1")
    h = parse_matrix("2,0,1,1")
    assert gl2_act(gl2_act(L, g), h) == gl2_act(L, h @ g)
    assert gl2_act(L, h @ g).area == L.area * (h @ g).det()


def test_gl2_field_mismatch():
    with pytest.raises(FieldMismatch):
        gl2_act(builtin("golden_l"), Mat2(Scalar(0, 1, 2), 0, 0, 1, 2))


def test_serialization_roundtrip():
    for M in (torus(marked=True), l_shaped(2, 1), builtin("golden_l"), octagon()):
        text = M.dumps()
        back = loads_surface(text)
        assert back == M
        assert back.dumps() == text


def test_parser_rejects_unknown_fields_and_floats():
    with pytest.raises(ParseError):
        loads_surface('{"field_d": 1, "faces": [], "gluings": [], "colour": 1}')
    with pytest.raises(ParseError):
        loads_surface('{"field_d": 1, "faces": [[[0.5, 0], [1, 0], [1, 1]]], "gluings": []}')


def test_point_canonicalization():
    L = l_shaped()
    p = L.point(0, vec(1, "1/2"))  # right edge of face 0, glued to face 1's left edge
    q = L.point(1, vec(1, "1/2"))
    assert p == q and p.kind == EDGE and (p.face, p.edge) == min((0, 1), (1, 3))
    assert L.point(0, vec("1/2", "1/2")).kind == INTERIOR
    assert L.point(2, vec(1, 2)).kind == VERTEX
    with pytest.raises(PointNotOnSurface):
        L.point(0, vec(2, 2))


def test_marked_point():
    T = torus(marked=True)
    assert T.singular == (True,) and T.multiplicity == (1,)


def test_split_rectilinear_l():
    outline = [vec(0, 0), vec(2, 0), vec(2, 1), vec(1, 1), vec(1, 2), vec(0, 2)]
    faces, internal, boundary = split_rectilinear(outline)
    area = sum((f[2] - f[0]).x * (f[2] - f[0]).y for f in faces)
    assert area == 3 and len(faces) == 3 and len(internal) == 2
    assert all(boundary[i] for i in range(len(outline)))


def test_split_rectilinear_t_junction_free():
    # a staircase outline with three steps
    outline = [vec(0, 0), vec(3, 0), vec(3, 1), vec(2, 1), vec(2, 2), vec(1, 2), vec(1, 3), vec(0, 3)]
    faces, internal, boundary = split_rectilinear(outline)
    assert len(faces) == 6
    pieces = [fe for edge in boundary for fe in edge]
    assert len(pieces) == len(set(pieces)) == 4 * len(faces) - 2 * len(internal)
    with pytest.raises(BadParams):
        split_rectilinear(list(reversed(outline)))
