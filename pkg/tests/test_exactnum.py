from __future__ import annotations

import random
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest

from flatblock.errors import FieldMismatch, ParseError
from flatblock.exactnum import (
    Mat2,
    Scalar,
    cross,
    dot,
    format_scalar,
    norm_sq,
    parse_matrix,
    parse_scalar,
    scalar_sign,
    vec,
)

getcontext().prec = 60


def _decimal(s: Scalar) -> Decimal:
    a = Decimal(int(s.a.numerator)) / Decimal(int(s.a.denominator))
    b = Decimal(int(s.b.numerator)) / Decimal(int(s.b.denominator))
    return a + b * Decimal(s.d).sqrt()


def _random_scalar(rng: random.Random, d: int) -> Scalar:
    def q():
        return Fraction(rng.randint(-50, 50), rng.randint(1, 30))

    return Scalar(q(), q(), d)


def test_sign_examples():
    assert scalar_sign(Scalar(1, 1, 2)) == 1
    assert scalar_sign(Scalar(0, 0, 5)) == 0
    assert scalar_sign(Scalar(Fraction(-3, 2), 1, 2)) == -1


def test_arith_examples():
    assert Scalar(1, 1, 2) * Scalar(1, -1, 2) == -1
    half = Fraction(1, 2)
    assert Scalar(half, 0, 5) + Scalar(0, half, 5) == parse_scalar("1/2+1/2*sqrt(5)")
    inv = 1 / Scalar(1, 1, 2)
    assert inv == Scalar(-1, 1, 2)
    assert inv * Scalar(1, 1, 2) == 1


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Scalar(1, 1, 2) / Scalar(0, 0, 2)


def test_vector_products():
    assert cross(vec(1, 0), vec(0, 1)) == 1
    assert norm_sq(vec("1/2", "1/2")) == Fraction(1, 2)
    r2 = Scalar(0, 1, 2)
    assert cross(vec(1, r2, 2), vec(r2, 2, 2)) == 0
    assert dot(vec(1, 2), vec(3, 4)) == 11


def test_field_axioms_random():
    rng = random.Random(1)
    for _ in range(300):
        d = rng.choice([2, 3, 5])
        x, y, z = (_random_scalar(rng, d) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        assert x * (y + z) == x * y + x * z
        if x:
            assert x * (1 / x) == 1


def test_order_compatibility_random():
    rng = random.Random(2)
    for _ in range(500):
        d = rng.choice([2, 5])
        x, y = _random_scalar(rng, d), _random_scalar(rng, d)
        if x.sign() > 0 and y.sign() > 0:
            assert (x * y).sign() > 0
            assert (x + y).sign() > 0


def test_sign_matches_high_precision():
    rng = random.Random(3)
    for _ in range(10000):
        d = rng.choice([2, 3, 5, 7])
        s = _random_scalar(rng, d)
        approx = _decimal(s)
        if abs(approx) > Decimal("1e-40"):
            assert s.sign() == (1 if approx > 0 else -1)
        # reducedness: gmpy2 rationals are kept in lowest terms
        assert s.a.denominator > 0


def test_sign_near_zero():
    # 99/70 is a convergent of sqrt 2: tiny but nonzero differences
    assert Scalar(Fraction(99, 70), -1, 2).sign() == 1
    assert Scalar(Fraction(-99, 70), 1, 2).sign() == -1
    assert Scalar(Fraction(-577, 408), 1, 2).sign() == -1


def test_format_and_parse_roundtrip():
    for text in ["0", "1/2", "3*sqrt(2)", "1/2+1/2*sqrt(5)", "-7/3-sqrt(2)", "-sqrt(3)"]:
        assert format_scalar(parse_scalar(text)) == text
    assert format_scalar(Scalar(0, 0, 5)) == "0"


def test_parse_rejects_floats_and_garbage():
    for bad in ["0.5", "1e3", "", "sqrt(4)", "abc", "1/0"]:
        with pytest.raises((ParseError, FieldMismatch)):
            parse_scalar(bad)


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatch):
        Scalar(0, 1, 2) + Scalar(0, 1, 5)
    with pytest.raises(FieldMismatch):
        parse_scalar("sqrt(2)", 5)


def test_rational_promotes_into_field():
    s = Scalar(1, 0, 1) + Scalar(0, 1, 5)
    assert s.d == 5 and s == parse_scalar("1+sqrt(5)")


def test_floor_of_irrational():
    phi = parse_scalar("1/2+1/2*sqrt(5)")
    assert phi.floor() == 1
    assert (-phi).floor() == -2
    assert (phi * 1000).floor() == 1618


def test_matrix():
    g = parse_matrix("2,0,0,1/2")
    assert g.det() == 1
    assert g @ vec(1, 1) == vec(2, "1/2")
    assert g @ g.inverse() == Mat2.identity()
