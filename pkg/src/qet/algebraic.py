"""Exact arithmetic in the cyclotomic field Q(w), w = e^{i pi/4}, and its real subfield Q(sqrt2).

Every Clifford+T amplitude lives in Q(w).  Probabilities, traces and
expectation values live in Q(sqrt2), where the sign of an element is decidable.

Elements are stored as integer numerators over one positive common
denominator, always gcd-reduced, so equality is structural.
"""

from __future__ import annotations

import re
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Union

Rational = Fraction

Number = Union[int, Fraction]


def _reduce(nums: tuple[int, ...], den: int) -> tuple[tuple[int, ...], int]:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        nums = tuple(-n for n in nums)
        den = -den
    g = reduce(gcd, nums, den)
    if g != 1:
        nums = tuple(n // g for n in nums)
        den //= g
    if not any(nums):
        den = 1
    return nums, den


def _as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class RealField:
    """``a + b*sqrt2`` with rational ``a`` and ``b``."""

    __slots__ = ("_n", "_d", "_hash")

    def __init__(self, a: Number = 0, b: Number = 0) -> None:
        fa, fb = _as_fraction(a), _as_fraction(b)
        den = fa.denominator * fb.denominator // gcd(fa.denominator, fb.denominator)
        nums = (fa.numerator * (den // fa.denominator), fb.numerator * (den // fb.denominator))
        self._n, self._d = _reduce(nums, den)
        self._hash = None

    @classmethod
    def _raw(cls, na: int, nb: int, den: int) -> RealField:
        obj = cls.__new__(cls)
        obj._n, obj._d = _reduce((na, nb), den)
        obj._hash = None
        return obj

    @property
    def a(self) -> Fraction:
        return Fraction(self._n[0], self._d)

    @property
    def b(self) -> Fraction:
        return Fraction(self._n[1], self._d)

    def is_rational(self) -> bool:
        return self._n[1] == 0

    def is_zero(self) -> bool:
        return self._n == (0, 0)

    @staticmethod
    def coerce(x: RealLike) -> RealField:
        if isinstance(x, RealField):
            return x
        if isinstance(x, (int, Fraction)):
            return RealField(x)
        raise TypeError(f"cannot interpret {x!r} as an element of Q(sqrt2)")

    def __add__(self, other: RealLike) -> RealField:
        try:
            o = RealField.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._d * o._d
        return RealField._raw(self._n[0] * o._d + o._n[0] * self._d,
                              self._n[1] * o._d + o._n[1] * self._d, d)

    __radd__ = __add__

    def __neg__(self) -> RealField:
        return RealField._raw(-self._n[0], -self._n[1], self._d)

    def __sub__(self, other: RealLike) -> RealField:
        try:
            o = RealField.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: RealLike) -> RealField:
        return RealField.coerce(other) - self

    def __mul__(self, other: RealLike) -> RealField:
        try:
            o = RealField.coerce(other)
        except TypeError:
            return NotImplemented
        a1, b1 = self._n
        a2, b2 = o._n
        return RealField._raw(a1 * a2 + 2 * b1 * b2, a1 * b2 + b1 * a2, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> RealField:
        a, b = self._n
        norm = a * a - 2 * b * b
        if norm == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt2)")
        # (a + b r)/d inverted is d (a - b r) / (a^2 - 2 b^2)
        return RealField._raw(a * self._d, -b * self._d, norm)

    def __truediv__(self, other: RealLike) -> RealField:
        try:
            o = RealField.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: RealLike) -> RealField:
        return RealField.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> RealField:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = RealField(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sign(self) -> int:
        return sign(self)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RealField):
            return self._n == other._n and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self == RealField(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("R", self._n, self._d))
        return self._hash

    def _cmp(self, other: RealLike) -> int:
        return sign(self - RealField.coerce(other))

    def __lt__(self, other: RealLike) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: RealLike) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: RealLike) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: RealLike) -> bool:
        return self._cmp(other) >= 0

    def __float__(self) -> float:
        return float(self.to_decimal(20))

    def to_decimal(self, digits: int = 15) -> Decimal:
        a, b = self._n
        if a == 0 and b == 0:
            return Decimal(0)
        with localcontext() as ctx:
            # enough guard digits to survive cancellation between a and b*sqrt2
            ctx.prec = digits + 10 + max(len(str(abs(a))), len(str(abs(b))))
            val = (Decimal(self._n[0]) + Decimal(self._n[1]) * Decimal(2).sqrt()) / Decimal(self._d)
            ctx.prec = digits
            return +val

    def __repr__(self) -> str:
        return f"RealField({format_rational(self.a)!r}, {format_rational(self.b)!r})"

    def __str__(self) -> str:
        return format_real(self)


RealLike = Union[RealField, int, Fraction]


def sign(x: RealField) -> int:
    """Exact sign of ``a + b*sqrt2``."""
    a, b = x._n
    if a >= 0 and b >= 0:
        return 0 if a == 0 and b == 0 else 1
    if a <= 0 and b <= 0:
        return -1
    # mixed signs: the larger of a^2 and 2b^2 decides
    diff = a * a - 2 * b * b
    if a > 0:
        return (diff > 0) - (diff < 0)
    return (diff < 0) - (diff > 0)


def leq(x: RealLike, y: RealLike) -> bool:
    return sign(RealField.coerce(y) - RealField.coerce(x)) >= 0


# powers of w reduce via w^4 = -1: w^m = _POW[m % 8] as (sign, exponent)
_POW = [(1, 0), (1, 1), (1, 2), (1, 3), (-1, 0), (-1, 1), (-1, 2), (-1, 3)]


class FieldElem:
    """``c0 + c1*w + c2*w^2 + c3*w^3`` with ``w = e^{i pi/4}``."""

    __slots__ = ("_n", "_d", "_hash")

    def __init__(self, c0: Number = 0, c1: Number = 0, c2: Number = 0, c3: Number = 0) -> None:
        fs = [_as_fraction(c) for c in (c0, c1, c2, c3)]
        den = 1
        for f in fs:
            den = den * f.denominator // gcd(den, f.denominator)
        nums = tuple(f.numerator * (den // f.denominator) for f in fs)
        self._n, self._d = _reduce(nums, den)
        self._hash = None

    @classmethod
    def _raw(cls, nums: tuple[int, int, int, int], den: int) -> FieldElem:
        obj = cls.__new__(cls)
        obj._n, obj._d = _reduce(nums, den)
        obj._hash = None
        return obj

    @classmethod
    def from_real(cls, x: RealLike) -> FieldElem:
        r = RealField.coerce(x)
        a, b = r._n
        # sqrt2 = w - w^3
        return cls._raw((a, b, 0, -b), r._d)

    @classmethod
    def from_parts(cls, re: RealLike, im: RealLike) -> FieldElem:
        return cls.from_real(re) + cls.from_real(im) * I

    @staticmethod
    def coerce(x: FieldLike) -> FieldElem:
        if isinstance(x, FieldElem):
            return x
        if isinstance(x, (int, Fraction)):
            return FieldElem(x)
        if isinstance(x, RealField):
            return FieldElem.from_real(x)
        raise TypeError(f"cannot interpret {x!r} as an element of Q(w)")

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return tuple(Fraction(n, self._d) for n in self._n)  # type: ignore[return-value]

    def is_zero(self) -> bool:
        return not any(self._n)

    def is_one(self) -> bool:
        return self._n == (1, 0, 0, 0) and self._d == 1

    def __add__(self, other: FieldLike) -> FieldElem:
        try:
            o = FieldElem.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        d1, d2 = self._d, o._d
        return FieldElem._raw(tuple(x * d2 + y * d1 for x, y in zip(self._n, o._n)), d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> FieldElem:
        return FieldElem._raw(tuple(-x for x in self._n), self._d)

    def __sub__(self, other: FieldLike) -> FieldElem:
        try:
            o = FieldElem.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: FieldLike) -> FieldElem:
        return FieldElem.coerce(other) - self

    def __mul__(self, other: FieldLike) -> FieldElem:
        try:
            o = FieldElem.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return ZERO
        a0, a1, a2, a3 = self._n
        b0, b1, b2, b3 = o._n
        r0 = a0 * b0 - a1 * b3 - a2 * b2 - a3 * b1
        r1 = a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2
        r2 = a0 * b2 + a1 * b1 + a2 * b0 - a3 * b3
        r3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
        return FieldElem._raw((r0, r1, r2, r3), self._d * o._d)

    __rmul__ = __mul__

    def galois(self, k: int) -> FieldElem:
        """Apply the automorphism ``w -> w^k`` (``k`` odd)."""
        out = [0, 0, 0, 0]
        for j, c in enumerate(self._n):
            s, e = _POW[(j * k) % 8]
            out[e] += s * c
        return FieldElem._raw(tuple(out), self._d)  # type: ignore[arg-type]

    def inverse(self) -> FieldElem:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(w)")
        others = self.galois(3) * self.galois(5) * self.galois(7)
        norm = self * others
        n0, n1, n2, n3 = norm._n
        assert n1 == n2 == n3 == 0, "field norm must be rational"
        return others * FieldElem(Fraction(norm._d, n0))

    def __truediv__(self, other: FieldLike) -> FieldElem:
        try:
            o = FieldElem.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: FieldLike) -> FieldElem:
        return FieldElem.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> FieldElem:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> FieldElem:
        c0, c1, c2, c3 = self._n
        return FieldElem._raw((c0, -c3, -c2, -c1), self._d)

    def real_part(self) -> RealField:
        c0, c1, _, c3 = self._n
        return RealField._raw(2 * c0, c1 - c3, 2 * self._d)

    def imag_part(self) -> RealField:
        _, c1, c2, c3 = self._n
        return RealField._raw(2 * c2, c1 + c3, 2 * self._d)

    def is_real(self) -> bool:
        return self.imag_part().is_zero()

    def to_real(self) -> RealField:
        if not self.is_real():
            raise ValueError(f"{self} is not real")
        return self.real_part()

    def __complex__(self) -> complex:
        return complex(float(self.real_part()), float(self.imag_part()))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElem):
            return self._n == other._n and self._d == other._d
        if isinstance(other, (int, Fraction, RealField)):
            return self == FieldElem.coerce(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("F", self._n, self._d))
        return self._hash

    def __repr__(self) -> str:
        return f"FieldElem({', '.join(repr(format_rational(c)) for c in self.coeffs)})"

    def __str__(self) -> str:
        return format_field(self)


FieldLike = Union[FieldElem, RealField, int, Fraction]

ZERO = FieldElem(0)
ONE = FieldElem(1)
OMEGA = FieldElem(0, 1)
I = FieldElem(0, 0, 1)
SQRT2 = FieldElem(0, 1, 0, -1)
INV_SQRT2 = FieldElem(0, Fraction(1, 2), 0, Fraction(-1, 2))
REAL_SQRT2 = RealField(0, 1)


def field_add(x: FieldElem, y: FieldElem) -> FieldElem:
    return x + y


def field_mul(x: FieldElem, y: FieldElem) -> FieldElem:
    return x * y


def field_neg(x: FieldElem) -> FieldElem:
    return -x


def field_inv(x: FieldElem) -> FieldElem:
    return x.inverse()


def conj(x: FieldElem) -> FieldElem:
    return x.conj()


def real_part(x: FieldElem) -> RealField:
    return x.real_part()


def imag_part(x: FieldElem) -> RealField:
    return x.imag_part()


# ---------------------------------------------------------------- text forms


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_terms(terms: list[tuple[Fraction, str]]) -> str:
    parts: list[str] = []
    for coeff, atom in terms:
        if coeff == 0:
            continue
        neg = coeff < 0
        mag = -coeff if neg else coeff
        if atom and mag == 1:
            body = atom
        elif atom:
            body = f"{format_rational(mag)}*{atom}"
        else:
            body = format_rational(mag)
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts) if parts else "0"


def format_field(x: FieldElem) -> str:
    c = x.coeffs
    return _format_terms([(c[0], ""), (c[1], "w"), (c[2], "w^2"), (c[3], "w^3")])


def format_real(x: RealField) -> str:
    return _format_terms([(x.a, ""), (x.b, "sqrt2")])


_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt2|w|i)|(\*\*|[-+*/^()]))")


class _TextParser:
    def __init__(self, text: str) -> None:
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse algebraic number {text!r} at offset {pos}")
            if m.group(1):
                self.tokens.append(("num", m.group(1)))
            elif m.group(2):
                self.tokens.append(("atom", m.group(2)))
            else:
                tok = m.group(3)
                self.tokens.append(("op", "^" if tok == "**" else tok))
            pos = m.end()
        self.i = 0
        self.text = text

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ValueError(f"unexpected end of algebraic number {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> FieldElem:
        if not self.tokens:
            raise ValueError("empty algebraic number")
        val = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input in algebraic number {self.text!r}")
        return val

    def expr(self) -> FieldElem:
        val = ZERO
        negate = False
        tok = self.peek()
        if tok == ("op", "-") or tok == ("op", "+"):
            negate = self.take()[1] == "-"
        val = self.term()
        if negate:
            val = -val
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> FieldElem:
        val = self.power()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.power()
            val = val * rhs if op == "*" else val / rhs
        return val

    def power(self) -> FieldElem:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, text = self.take()
            if kind != "num":
                raise ValueError(f"exponent must be a natural number in {self.text!r}")
            base = base ** int(text)
        return base

    def atom(self) -> FieldElem:
        kind, text = self.take()
        if kind == "num":
            return FieldElem(int(text))
        if kind == "atom":
            return {"w": OMEGA, "i": I, "sqrt2": SQRT2}[text]
        if text == "(":
            val = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError(f"unbalanced parenthesis in {self.text!r}")
            return val
        if text == "-":
            return -self.power()
        raise ValueError(f"unexpected {text!r} in algebraic number {self.text!r}")


def parse_field(text: str) -> FieldElem:
    """Parse ``a + b*w + c*w^2 + d*w^3``; also accepts ``i``, ``sqrt2`` and parentheses."""
    return _TextParser(text).parse()


def parse_real(text: str) -> RealField:
    """Parse ``a + b*sqrt2`` (any real-valued expression of :func:`parse_field`)."""
    val = parse_field(text)
    if not val.is_real():
        raise ValueError(f"{text!r} is not a real number")
    return val.real_part()
