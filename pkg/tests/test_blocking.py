from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from flatblock.blocking import (
    BlockingInstance,
    bc_report,
    certify_non_illumination,
    check_non_illumination,
    disjoint_family_lower_bound,
    format_report,
    lift_blocking_to_cover,
    max_independent_set,
    min_set_cover,
    min_stab,
    mn_preimage,
    pairwise_disjoint,
    project,
    torus_blocking_set,
    torus_points,
    verify_blocking,
)
from flatblock.builders import builtin, l_shaped, staircase, torus
from flatblock.errors import BadParams, ContainsEndpoint
from flatblock.exactnum import S, vec
from flatblock.tracer import segments_between


def _q(v):
    return Fraction(int(v.numerator), int(v.denominator))


def _on_torus_segment(x, h, p):
    """Whether p lies on the open segment x + t h, 0 < t < 1, of the unit torus."""
    # |h| <= 3 at the budgets used here, so small translates suffice
    for a in range(-4, 5):
        for b in range(-4, 5):
            dx, dy = p[0] - x[0] + a, p[1] - x[1] + b
            if h[0]:
                t = dx / h[0]
                if dy != t * h[1]:
                    continue
            else:
                if dx:
                    continue
                t = dy / h[1]
            if 0 < t < 1:
                return True
    return False


def _rand_pt(rng):
    den = rng.choice([3, 5, 7, 8, 11])
    return (Fraction(rng.randrange(den), den), Fraction(rng.randrange(den), den))


# -- incidence oracle ------------------------------------------------------------

def test_verify_blocking_matches_torus_oracle():
    rng = random.Random(6)
    T = torus()
    for _ in range(25):
        x, y = _rand_pt(rng), _rand_pt(rng)
        if x == y:
            continue
        inst = BlockingInstance(T, T.point(0, vec(*x)), T.point(0, vec(*y)), S(9))
        segs = inst.segments()
        cand = [_rand_pt(rng) for _ in range(3)] + [
            tuple(_q(c) for c in (p.x.rational(), p.y.rational())) for p in torus_blocking_set(vec(*x), vec(*y))
        ][: rng.randint(0, 4)]
        cand = [c for c in cand if c not in (x, y)]
        hols = [(_q(s.holonomy.x.rational()), _q(s.holonomy.y.rational())) for s in segs]
        expected = all(any(_on_torus_segment(x, h, p) for p in cand) for h in hols)
        ver = verify_blocking(inst, torus_points(T, [vec(*p) for p in cand]), segs)
        assert ver.blocked == expected
        if not expected:
            w = (_q(ver.witness.holonomy.x.rational()), _q(ver.witness.holonomy.y.rational()))
            assert not any(_on_torus_segment(x, w, p) for p in cand)


def test_blocking_set_excludes_endpoints():
    T = torus()
    x = T.point(0, vec(0, 0))
    inst = BlockingInstance(T, x, T.point(0, vec("1/2", 0)), S(4))
    with pytest.raises(ContainsEndpoint):
        verify_blocking(inst, [x])


# -- torus formulas ------------------------------------------------------------------

def test_mn_preimage():
    pts = mn_preimage(3, vec("1/2", 0))
    assert len(pts) == 9
    assert all(((p * 3).x - vec("1/2", 0).x).is_integer() for p in pts)


def test_torus_formula_sets():
    x, y = vec("1/5", "1/7"), vec("2/3", "1/4")
    assert len(torus_blocking_set(x, y)) == 4
    assert len(torus_blocking_set(x, x)) == 3
    assert len(torus_blocking_set(x, y, 3, 2)) == 9
    assert len(torus_blocking_set(x, x, 3, 1)) == 8
    with pytest.raises(BadParams):
        torus_blocking_set(x, y, 4, 2)


def test_torus_bc_report_distinct_and_equal():
    T = torus()
    x, y = T.point(0, vec("1/5", "1/7")), T.point(0, vec("2/3", "1/4"))
    rep = bc_report(BlockingInstance(T, x, y, S(16)))
    assert rep.interval == (4, 4)
    assert pairwise_disjoint(T, rep.lower_family) and len(rep.lower_family) == 4
    rep = bc_report(BlockingInstance(T, x, x, S(16)))
    assert rep.interval == (3, 3)
    text = format_report(rep)
    assert "bc_interval=[3,3]" in text


# -- combinatorial solvers -----------------------------------------------------------

def _brute_mis(adj):
    n = len(adj)
    best = 0
    for r in range(n, 0, -1):
        for sub in itertools.combinations(range(n), r):
            if all(not (adj[i] >> j) & 1 for i in sub for j in sub):
                return r
    return best


def _brute_cover(universe, sets):
    for r in range(len(sets) + 1):
        for sub in itertools.combinations(range(len(sets)), r):
            acc = 0
            for k in sub:
                acc |= sets[k]
            if acc & universe == universe:
                return r
    return None


def test_max_independent_set_brute_force():
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(1, 11)
        adj = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.35:
                    adj[i] |= 1 << j
                    adj[j] |= 1 << i
        chosen, optimal = max_independent_set(adj)
        assert optimal and len(chosen) == _brute_mis(adj)
        assert all(not (adj[i] >> j) & 1 for i in chosen for j in chosen)


def test_min_set_cover_brute_force():
    rng = random.Random(3)
    for _ in range(40):
        u = rng.randint(1, 9)
        universe = (1 << u) - 1
        sets = [rng.randrange(1, 1 << u) for _ in range(rng.randint(1, 8))]
        sets.append(universe & ~(sets[0]) or 1)
        want = _brute_cover(universe, sets)
        if want is None:
            continue
        chosen, optimal = min_set_cover(universe, sets)
        acc = 0
        for k in chosen:
            acc |= sets[k]
        assert optimal and acc == universe and len(chosen) == want


# -- lower bounds and stabbing -----------------------------------------------------

def test_l_shaped_cone_point_family():
    L = l_shaped()
    xi = L.vertex_point(0)
    lb = disjoint_family_lower_bound(BlockingInstance(L, xi, xi, S(25)), target=9)
    assert lb.n >= 9
    assert pairwise_disjoint(L, lb.family)


def test_disjointness_detects_crossing():
    T = torus()
    o = T.point(0, vec(0, 0))
    segs = segments_between(T, o, o, 2)
    by_hol = {str(s.holonomy): s for s in segs}
    # the diagonals (1,1) and (1,-1) cross at (1/2,1/2); (1,0) and (0,1) only share x
    assert not pairwise_disjoint(T, [by_hol["(1, 1)"], by_hol["(1, -1)"]])
    assert pairwise_disjoint(T, [by_hol["(1, 0)"], by_hol["(0, 1)"]])


def test_min_stab_on_torus():
    T = torus()
    inst = BlockingInstance(T, T.point(0, vec("1/5", "1/7")), T.point(0, vec("2/3", "1/4")), S(4))
    st = min_stab(inst)
    assert st.optimal and 1 <= st.m <= 4
    assert verify_blocking(inst, st.points).blocked


# -- covers ------------------------------------------------------------------------------

def test_staircase_lift_blocks_deck_pairs():
    from flatblock.autos import apply, deck_translation

    M = staircase()
    D = deck_translation(M)
    x = M.point(0, M.faces[0][0] + vec("1/3", "1/5"))
    y = apply(D, x)
    px, py = project(M, x), project(M, y)
    lift = lift_blocking_to_cover(M, torus_blocking_set(px, py))
    assert lift.cardinality <= 9
    assert verify_blocking(BlockingInstance(M, x, y, S(16)), lift.points).blocked


def test_grid_cover_non_illumination():
    M = builtin("grid_cover:2,2")
    base = vec("1/3", "1/5")
    xs = lift_blocking_to_cover(M, [base]).points
    ys = lift_blocking_to_cover(M, [-base]).points
    x, y = xs[0], ys[0]
    cert = certify_non_illumination(M, x, y)
    assert cert.certified and cert.n == 2
    assert check_non_illumination(M, x, y, cert)
    assert segments_between(M, x, y, 25) == []
    rep = bc_report(BlockingInstance(M, x, y, S(25)))
    assert rep.interval == (0, 0) and rep.upper_kind == "structural"


def test_grid_cover_other_pairs_not_certified():
    M = builtin("grid_cover:2,2")
    x = lift_blocking_to_cover(M, [vec("1/3", "1/5")]).points[0]
    y = lift_blocking_to_cover(M, [vec("1/7", "2/5")]).points[0]
    cert = certify_non_illumination(M, x, y, max_n=3)
    if not cert.certified:
        assert segments_between(M, x, y, 9)
