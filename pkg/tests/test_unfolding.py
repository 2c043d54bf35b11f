from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import pytest

from flatblock.errors import BadParams, FieldInsufficient, NonConvexFace
from flatblock.exactnum import Scalar, vec
from flatblock.unfolding import polygon, reflection_group, right_isosceles, square, unfold_billiard


def _oracle(angles):
    """Genus and cone-angle census of the unfolding, from the angles alone.

    With N = lcm of the denominators, vertex pi*p/q contributes N/q cone
    points of angle 2*pi*p; the Euler characteristic then fixes the genus.
    """
    fr = [Fraction(a) for a in angles]
    N = math.lcm(*(a.denominator for a in fr))
    census = Counter()
    for a in fr:
        census[a.numerator] += N // a.denominator
    genus = 1 + Fraction(N, 2) * sum(Fraction(a.numerator - 1, a.denominator) for a in fr)
    return 2 * N, int(genus), census


CASES = [
    (square, None),
    (right_isosceles, None),
    (lambda: polygon([(0, 0), (2, 0), (1, Scalar(0, 1, 3))], ["1/3"] * 3, d=3), None),
    (lambda: polygon([(0, 0), (1, 0), (0, Scalar(0, 1, 3))], ["1/2", "1/3", "1/6"], d=3), None),
    (lambda: polygon([(0, 0), (1, 0), (1, 1), (0, 2)], ["1/2", "1/2", "3/4", "1/4"]), None),
]


@pytest.mark.parametrize("make", [c[0] for c in CASES])
def test_unfolding_matches_angle_oracle(make):
    P = make()
    M, _ = unfold_billiard(P)
    order, genus, census = _oracle(P.angles)
    assert len(M.faces) == order == len(reflection_group(P))
    assert M.genus == genus
    assert Counter(M.multiplicity) == census
    assert M.area == P.area * order
    for (f, i), (g, j) in M.partner.items():
        assert (M.edge_vector(f, i) + M.edge_vector(g, j)).is_zero()


def test_square_unfolds_to_four_square_torus():
    M, lift = unfold_billiard(square())
    assert len(M.faces) == 4 and M.genus == 1 and M.area == 4
    pts = lift(vec("1/5", "1/7"))
    assert len(pts) == 4
    assert {str(p) for p in pts} == {"0:(1/5,1/7)", "1:(1/5,-1/7)", "2:(-1/5,1/7)", "3:(-1/5,-1/7)"}


def test_right_isosceles_lift_has_eight_points():
    M, lift = unfold_billiard(right_isosceles())
    assert len(M.faces) == 8 and M.genus == 1
    assert len(lift(vec("1/5", "1/7"))) == 8


def test_field_insufficient_reports_smallest_angle():
    with pytest.raises(FieldInsufficient, match=r"cos\(pi\*1/5\) is not representable in Q\(sqrt2\)"):
        polygon([(0, 0), (1, 0), (0, 1)], ["1/5", "3/10", "1/2"], d=2)
    with pytest.raises(FieldInsufficient, match=r"cos\(pi\*1/6\) is not representable in Q$"):
        polygon([(0, 0), (1, 0), (0, 1)], ["1/3", "1/6", "1/2"])


def test_bad_polygons():
    with pytest.raises(BadParams):
        polygon([(0, 0), (1, 0), (0, 1)], ["1/2", "1/4", "1/3"])
    with pytest.raises(BadParams):
        # angle sum is right but the shape is not
        polygon([(0, 0), (2, 0), (0, 1)], ["1/2", "1/4", "1/4"])
    with pytest.raises(NonConvexFace):
        polygon([(0, 0), (0, 1), (1, 0)], ["1/2", "1/4", "1/4"])
