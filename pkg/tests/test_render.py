from __future__ import annotations

import re

from flatblock.autos import weierstrass_points
from flatblock.builders import builtin, l_shaped, staircase, torus
from flatblock.cylinders import cylinder_decomposition
from flatblock.exactnum import vec
from flatblock.render import Overlays, count_elements, deck_colors, layout, render_svg, write_svg
from flatblock.tracer import segments_between
from flatblock.unfolding import right_isosceles, unfold_billiard


def test_torus_with_segments():
    T = torus()
    segs = segments_between(T, T.point(0, vec(0, 0)), T.point(0, vec("1/2", "1/2")), 4)
    svg = render_svg(T, Overlays(segments=segs))
    assert svg.startswith('<?xml version="1.0" encoding="UTF-8"?>\n<svg ')
    assert count_elements(svg, "polygon", "face") == 1
    assert count_elements(svg, "g", "segment") == 12
    assert count_elements(svg, "circle") == 0


def test_staircase_deck_orbit_colours():
    S = staircase()
    svg = render_svg(S)
    assert count_elements(svg, "polygon", "face") == 6
    colors = deck_colors(S)
    # orbits of the deck permutation share a colour
    assert len(set(colors.values())) == 2
    for f, g in enumerate(S.cover.info["deck"]):
        assert colors[f] == colors[g]
        assert f'data-face="{f}" ' in svg
    assert "glued layout" in svg


def test_l_shaped_weierstrass_markers():
    L = l_shaped()
    svg = render_svg(L, Overlays(points=weierstrass_points(L)))
    assert count_elements(svg, "circle") == 5
    assert count_elements(svg, "polygon", "face") == 3


def test_cylinder_overlay():
    L = l_shaped()
    svg = render_svg(L, Overlays(decomposition=cylinder_decomposition(L, vec(1, 0))))
    assert count_elements(svg, "g", "cylinder") == 2


def test_layout_glued_when_possible():
    for M in (staircase(), unfold_billiard(right_isosceles())[0]):
        placed, glued = layout(M)
        assert len(placed) == len(M.faces) and glued


def test_layout_side_by_side_fallback():
    # two sheets over the same squares: every development overlaps
    M = builtin("grid_cover:2,2")
    placed, glued = layout(M)
    assert not glued
    lefts = [min(x for x, _ in face) for face in placed]
    rights = [max(x for x, _ in face) for face in placed]
    assert all(r < l for r, l in zip(rights, lefts[1:]))
    svg = render_svg(M)
    assert "side-by-side layout" in svg
    # every gluing is drawn apart, so each of the 16 edge pairs gets two labels
    assert svg.count('text-anchor="middle"') == 2 * len(M.partner) // 2


def test_deterministic_and_rounded(tmp_path):
    L = l_shaped()
    segs = segments_between(L, L.point(0, vec("1/3", "1/7")), L.point(2, vec("1/2", "11/7")), 9)
    a = render_svg(L, Overlays(segments=segs))
    out = tmp_path / "l.svg"
    write_svg(out, L, Overlays(segments=segs))
    assert out.read_text() == a
    for num in re.findall(r"-?\d+\.\d+", a):
        assert len(num.split(".")[1]) <= 3
