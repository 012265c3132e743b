"""Exact scalars: arbitrary-precision rationals and one quadratic extension.

Every computation runs either over Q (plain ``fractions.Fraction``) or over
Q(sqrt(d)) for a single square-free d >= 2 fixed per context.  The field is a
property of the enclosing object (matrix, algebra), not of individual values.

Serialization: rationals as the string "p/q" ("p" when q == 1); quadratic
values as {"a": "p/q", "b": "r/s", "d": k}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class FieldMismatchError(ValueError):
    """Values from two different scalar fields were combined."""


class ScalarParseError(ValueError):
    """A scalar string or JSON payload could not be parsed."""


def split_square(m: int) -> tuple[int, int]:
    """Write m >= 1 as q*q*d with d square-free; return (q, d)."""
    if m < 1:
        raise ValueError("split_square needs a positive integer")
    q, d = 1, 1
    f = 2
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            q *= f ** (e // 2)
            if e % 2:
                d *= f
        f += 1
    return q, d * m


def is_square_free(d: int) -> bool:
    return d >= 1 and split_square(d)[0] == 1


def sqrt_fraction(x: Fraction) -> tuple[Fraction, int]:
    """sqrt(x) written as r*sqrt(d) with d square-free; returns (r, d).

    d == 1 means the root is rational.
    """
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0:
        return Fraction(0), 1
    q, d = split_square(x.numerator * x.denominator)
    return Fraction(q, x.denominator), d


class QuadExt:
    """a + b*sqrt(d) with rational a, b and a fixed square-free d >= 2."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _coerce(self, other) -> "QuadExt | None":
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise FieldMismatchError(
                    f"cannot mix sqrt({self.d}) and sqrt({other.d}) values"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.d)
        return None

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadExt):
            if other.d != self.d and self.b and other.b:
                return False
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __neg__(self) -> "QuadExt":
        return QuadExt(-self.a, -self.b, self.d)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(
            self.a * o.a + self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        # (a + b sqrt d)(a - b sqrt d) = a^2 - d b^2, nonzero since d is not a square
        nrm = self.a * self.a - self.d * self.b * self.b
        if nrm == 0:
            raise ZeroDivisionError("division by zero quadratic value")
        return QuadExt(self.a / nrm, -self.b / nrm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadExt(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def __repr__(self) -> str:
        return f"QuadExt({self.a!r}, {self.b!r}, {self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt({self.d})"


Scalar = Union[Fraction, QuadExt]


def _parse_rational(text) -> Fraction:
    if isinstance(text, str):
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarParseError(f"bad rational {text!r}: {exc}") from None
        return value
    if isinstance(text, int):
        return Fraction(text)
    raise ScalarParseError(f"expected a rational string, got {text!r}")


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RationalField:
    """The field Q."""

    @property
    def kind(self) -> str:
        return "rational"

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def of(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return _parse_rational(x)
        if isinstance(x, QuadExt):
            if x.b == 0:
                return x.a
            raise FieldMismatchError("quadratic value used in a rational context")
        raise TypeError(f"cannot coerce {x!r} into Q")

    def parse(self, obj) -> Fraction:
        if isinstance(obj, dict):
            raise ScalarParseError("quadratic scalar in a rational context")
        return _parse_rational(obj)

    def to_json(self, x: Scalar):
        return format_rational(self.of(x))

    def descriptor(self) -> dict:
        return {"kind": "rational"}


@dataclass(frozen=True)
class QuadraticField:
    """The field Q(sqrt(d)) for a fixed square-free d >= 2."""

    d: int

    def __post_init__(self):
        if self.d < 2 or not is_square_free(self.d):
            raise ValueError(f"d must be square-free and >= 2, got {self.d}")

    @property
    def kind(self) -> str:
        return "quadratic"

    def zero(self) -> QuadExt:
        return QuadExt(0, 0, self.d)

    def one(self) -> QuadExt:
        return QuadExt(1, 0, self.d)

    def sqrt_gen(self) -> QuadExt:
        return QuadExt(0, 1, self.d)

    def of(self, x) -> QuadExt:
        if isinstance(x, QuadExt):
            if x.d != self.d:
                if x.b == 0:
                    return QuadExt(x.a, 0, self.d)
                raise FieldMismatchError(
                    f"sqrt({x.d}) value used in a Q(sqrt({self.d})) context"
                )
            return x
        if isinstance(x, (int, Fraction)):
            return QuadExt(x, 0, self.d)
        if isinstance(x, str):
            return QuadExt(_parse_rational(x), 0, self.d)
        raise TypeError(f"cannot coerce {x!r} into Q(sqrt({self.d}))")

    def parse(self, obj) -> QuadExt:
        if isinstance(obj, dict):
            try:
                a = _parse_rational(obj["a"])
                b = _parse_rational(obj["b"])
                d = obj["d"]
            except KeyError as exc:
                raise ScalarParseError(f"quadratic scalar missing key {exc}") from None
            if d != self.d:
                raise FieldMismatchError(
                    f"scalar has d={d} but the context uses d={self.d}"
                )
            return QuadExt(a, b, self.d)
        return QuadExt(_parse_rational(obj), 0, self.d)

    def to_json(self, x: Scalar):
        v = self.of(x)
        return {
            "a": format_rational(v.a),
            "b": format_rational(v.b),
            "d": self.d,
        }

    def descriptor(self) -> dict:
        return {"kind": "quadratic", "d": self.d}


Field = Union[RationalField, QuadraticField]

RATIONAL = RationalField()


def field_from_json(obj) -> Field:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ScalarParseError(f"bad field descriptor {obj!r}")
    if obj["kind"] == "rational":
        return RATIONAL
    if obj["kind"] == "quadratic":
        try:
            return QuadraticField(int(obj["d"]))
        except KeyError:
            raise ScalarParseError("quadratic field descriptor needs 'd'") from None
    raise ScalarParseError(f"unknown field kind {obj['kind']!r}")


def field_of_value(x: Scalar) -> Field:
    if isinstance(x, QuadExt):
        return QuadraticField(x.d)
    return RATIONAL
