"""Exact arithmetic in Q and real quadratic fields Q(sqrt(d)).

Every geometric predicate in flatblock reduces to :func:`scalar_sign` on a
:class:`Scalar`.  Rationals are ``gmpy2.mpq`` values (always reduced).
The real embedding is the one with ``sqrt(d) > 0``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

import gmpy2
from gmpy2 import mpq

from .errors import FieldMismatch, ParseError

Rational = type(mpq(0))
Number = Union[int, Fraction, "Scalar"]

_ZERO = mpq(0)
_ONE = mpq(1)


def is_squarefree(d: int) -> bool:
    if d < 1:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _rational(x) -> Rational:
    if isinstance(x, Rational):
        return x
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _rsign(q: Rational) -> int:
    return (q > 0) - (q < 0)


class Scalar:
    """The number ``a + b*sqrt(d)`` with ``a, b`` rational.

    ``d == 1`` is the purely rational mode, in which ``b`` is always zero.
    Scalars from different fields never mix; plain ints and fractions are
    promoted into the field of the other operand.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a = _rational(a)
        b = _rational(b)
        if d == 1:
            a, b = a + b, _ZERO
        self.a = a
        self.b = b
        self.d = d

    @classmethod
    def _raw(cls, a: Rational, b: Rational, d: int) -> "Scalar":
        s = object.__new__(cls)
        s.a = a
        s.b = b
        s.d = d
        return s

    # -- coercion -----------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.d != self.d:
                if other.b == 0 and other.d == 1:
                    return Scalar._raw(other.a, _ZERO, self.d)
                if self.b == 0 and self.d == 1:
                    # caller upgrades self instead; signalled by returning None
                    return None  # type: ignore[return-value]
                raise FieldMismatch(f"Q(sqrt({self.d})) vs Q(sqrt({other.d}))")
            return other
        if isinstance(other, (int, Rational, Fraction)):
            return Scalar._raw(_rational(other), _ZERO, self.d)
        return NotImplemented

    def _pair(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented, NotImplemented
        if o is None:
            return Scalar._raw(self.a, _ZERO, other.d), other
        return self, o

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if type(other) is Scalar and other.d == self.d:
            return Scalar._raw(self.a + other.a, self.b + other.b, self.d)
        s, o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar._raw(s.a + o.a, s.b + o.b, s.d)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Scalar and other.d == self.d:
            return Scalar._raw(self.a - other.a, self.b - other.b, self.d)
        s, o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar._raw(s.a - o.a, s.b - o.b, s.d)

    def __rsub__(self, other):
        s, o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar._raw(o.a - s.a, o.b - s.b, s.d)

    def __mul__(self, other):
        if type(other) is Scalar and other.d == self.d:
            s, o = self, other
        else:
            s, o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        if not s.b and not o.b:
            return Scalar._raw(s.a * o.a, _ZERO, s.d)
        return Scalar._raw(s.a * o.a + s.b * o.b * s.d, s.a * o.b + s.b * o.a, s.d)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar._raw(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.a, -self.b, self.d)

    def field_norm(self) -> Rational:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self) -> "Scalar":
        if not self.b:
            if not self.a:
                raise ZeroDivisionError("Scalar division by zero")
            return Scalar._raw(_ONE / self.a, _ZERO, self.d)
        n = self.field_norm()
        if not n:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._raw(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        s, o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.b:
            if not o.a:
                raise ZeroDivisionError("Scalar division by zero")
            return Scalar._raw(s.a / o.a, s.b / o.a, s.d)
        return s * o.inverse()

    def __rtruediv__(self, other):
        s, o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return o * s.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar._raw(_ONE, _ZERO, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order --------------------------------------------------------
    def sign(self) -> int:
        sa = _rsign(self.a)
        sb = _rsign(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        lhs = self.a * self.a
        rhs = self.b * self.b * self.d
        if lhs > rhs:
            return sa
        if lhs < rhs:
            return sb
        return 0

    def _cmp(self, other) -> int:
        diff = self - other
        if diff is NotImplemented:
            raise TypeError(f"cannot compare Scalar with {type(other).__name__}")
        return diff.sign()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if other.d != self.d and (self.b or other.b):
                return False
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Rational, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # -- queries ------------------------------------------------------
    def is_rational(self) -> bool:
        return not self.b

    def rational(self) -> Rational:
        if self.b:
            raise ValueError(f"{self} is not rational")
        return self.a

    def is_integer(self) -> bool:
        return not self.b and self.a.denominator == 1

    def floor(self) -> int:
        """Exact floor of the real value."""
        if not self.b:
            return int(gmpy2.floor(self.a))
        with gmpy2.context(gmpy2.get_context(), precision=256):
            approx = gmpy2.mpfr(self.a) + gmpy2.mpfr(self.b) * gmpy2.sqrt(self.d)
            n = int(gmpy2.floor(approx))
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def frac(self) -> "Scalar":
        return self - self.floor()

    def __float__(self):
        return float(self.a) + float(self.b) * (self.d ** 0.5)

    def with_field(self, d: int) -> "Scalar":
        if d == self.d:
            return self
        if self.b:
            raise FieldMismatch(f"{self} does not live in Q(sqrt({d}))")
        return Scalar._raw(self.a, _ZERO, d)

    # -- text ---------------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        if self.d == 1:
            return f"Scalar({format_rational(self.a)})"
        return f"Scalar({format_rational(self.a)}, {format_rational(self.b)}, d={self.d})"


def format_rational(q: Rational) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(s: Scalar) -> str:
    """Canonical text form, e.g. ``0``, ``1/2``, ``3*sqrt(2)``, ``1/2+1/2*sqrt(5)``."""
    if not s.b:
        return format_rational(s.a)
    root = f"sqrt({s.d})"
    if s.b == 1:
        irr = root
    elif s.b == -1:
        irr = "-" + root
    else:
        irr = f"{format_rational(s.b)}*{root}"
    if not s.a:
        return irr
    if irr.startswith("-"):
        return f"{format_rational(s.a)}{irr}"
    return f"{format_rational(s.a)}+{irr}"


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?:(?P<a>{_RAT})(?=$|[+-]))?"
    rf"(?:(?P<b>[+-]?(?:\d+(?:/\d+)?)?)\*?sqrt\((?P<d>\d+)\))?$"
)


def parse_scalar(text: str, d: int | None = None) -> Scalar:
    """Parse the canonical grammar; floats and malformed input are rejected.

    When ``d`` is given the result is placed in ``Q(sqrt(d))`` and any
    explicit root must agree with it.
    """
    try:
        return _parse_scalar(text, d)
    except ZeroDivisionError as exc:
        raise ParseError(f"zero denominator in {text!r}") from exc


def _parse_scalar(text: str, d: int | None) -> Scalar:
    raw = text.replace(" ", "")
    m = _SCALAR_RE.match(raw)
    if not raw or m is None or (m.group("a") is None and m.group("d") is None):
        raise ParseError(f"not an exact scalar: {text!r}")
    a = mpq(m.group("a").lstrip("+")) if m.group("a") else _ZERO
    field = d if d is not None else 1
    b = _ZERO
    if m.group("d") is not None:
        rd = int(m.group("d"))
        coeff = m.group("b")
        if coeff in ("", "+"):
            b = _ONE
        elif coeff == "-":
            b = -_ONE
        else:
            b = mpq(coeff.lstrip("+"))
        if rd == 1:
            a, b = a + b, _ZERO
        else:
            if not is_squarefree(rd):
                raise ParseError(f"sqrt({rd}): radicand must be square-free")
            if d is not None and d != rd:
                raise FieldMismatch(f"{text!r} is not in Q(sqrt({d}))")
            field = rd
    return Scalar._raw(a, b, field) if field != 1 else Scalar._raw(a + b, _ZERO, 1)


def S(value, d: int = 1) -> Scalar:
    """Convenience constructor accepting ints, fractions, strings or Scalars."""
    if isinstance(value, Scalar):
        return value if d == 1 or value.d == d else value.with_field(d)
    if isinstance(value, str):
        s = parse_scalar(value, None if d == 1 else d)
        return s if d == 1 else s.with_field(d)
    return Scalar._raw(_rational(value), _ZERO, d)


def scalar_sign(s: Scalar) -> int:
    return s.sign()


def common_field(values: Iterable[Scalar]) -> int:
    d = 1
    for v in values:
        if v.b:
            if d != 1 and d != v.d:
                raise FieldMismatch(f"Q(sqrt({d})) vs Q(sqrt({v.d}))")
            d = v.d
        elif v.d != 1:
            if d != 1 and d != v.d:
                raise FieldMismatch(f"Q(sqrt({d})) vs Q(sqrt({v.d}))")
            d = v.d
    return d


class Vec2:
    """Planar vector with Scalar coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        d = 1
        for v in (x, y):
            if isinstance(v, Scalar) and v.d != 1:
                d = v.d
        self.x = S(x, d)
        self.y = S(y, d)

    @classmethod
    def _raw(cls, x: Scalar, y: Scalar) -> "Vec2":
        v = object.__new__(cls)
        v.x = x
        v.y = y
        return v

    def __add__(self, o: "Vec2") -> "Vec2":
        return Vec2._raw(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec2") -> "Vec2":
        return Vec2._raw(self.x - o.x, self.y - o.y)

    def __neg__(self) -> "Vec2":
        return Vec2._raw(-self.x, -self.y)

    def __mul__(self, k) -> "Vec2":
        return Vec2._raw(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "Vec2":
        return Vec2._raw(self.x / k, self.y / k)

    def __eq__(self, o):
        if not isinstance(o, Vec2):
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def is_zero(self) -> bool:
        return not self.x and not self.y

    def with_field(self, d: int) -> "Vec2":
        return Vec2._raw(self.x.with_field(d), self.y.with_field(d))

    def to_float(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def __repr__(self):
        return f"({self.x}, {self.y})"

    __str__ = __repr__


def vec(x, y, d: int = 1) -> Vec2:
    return Vec2._raw(S(x, d), S(y, d))


def cross(u: Vec2, v: Vec2) -> Scalar:
    return u.x * v.y - u.y * v.x


def dot(u: Vec2, v: Vec2) -> Scalar:
    return u.x * v.x + u.y * v.y


def norm_sq(u: Vec2) -> Scalar:
    return u.x * u.x + u.y * u.y


def orient(u: Vec2, v: Vec2) -> int:
    """Sign of the cross product: +1 if v is counterclockwise of u."""
    return cross(u, v).sign()


def same_direction(u: Vec2, v: Vec2) -> bool:
    """True iff v is a positive multiple of u (both nonzero)."""
    return cross(u, v).sign() == 0 and dot(u, v).sign() > 0


def lex_cmp(u: Vec2, v: Vec2) -> int:
    c = (u.x - v.x).sign()
    if c:
        return c
    return (u.y - v.y).sign()


class Mat2:
    """2x2 matrix ``[[a, b], [c, d]]`` acting on column vectors."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, field: int = 1):
        self.a, self.b, self.c, self.d = (S(v, field) if not isinstance(v, Scalar) else v for v in (a, b, c, d))

    @classmethod
    def identity(cls, field: int = 1) -> "Mat2":
        return cls(1, 0, 0, 1, field)

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other):
        if isinstance(other, Vec2):
            return Vec2._raw(self.a * other.x + self.b * other.y, self.c * other.x + self.d * other.y)
        if isinstance(other, Mat2):
            return Mat2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        return NotImplemented

    def inverse(self) -> "Mat2":
        det = self.det()
        if not det:
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def entries(self) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        return self.a, self.b, self.c, self.d

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def parse_matrix(text: str, d: int | None = None) -> Mat2:
    """Parse ``a,b,c,d`` (row major) into a Mat2."""
    parts = [p for p in text.split(",")]
    if len(parts) != 4:
        raise ParseError(f"matrix needs four comma-separated entries: {text!r}")
    vals = [parse_scalar(p, d) for p in parts]
    field = common_field(vals)
    return Mat2(*(v.with_field(field) for v in vals))
