from __future__ import annotations

import cmath
import math
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qet import linalg
from qet.algebraic import (
    I, INV_SQRT2, OMEGA, ONE, REAL_SQRT2, SQRT2, ZERO, FieldElem, RealField, format_field,
    format_real, parse_field, parse_real, sign,
)

small = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
fields = st.builds(FieldElem, small, small, small, small)
reals = st.builds(RealField, small, small)
nonzero_fields = fields.filter(lambda x: not x.is_zero())

FIELD_EXAMPLES = 2500


def close(x: FieldElem, z: complex) -> bool:
    return abs(complex(x) - z) < 1e-9


def test_omega_generates_eighth_roots():
    assert OMEGA ** 8 == ONE
    assert OMEGA ** 4 == -ONE
    assert OMEGA ** 2 == I
    assert close(OMEGA, cmath.exp(1j * math.pi / 4))


def test_sqrt2_constants():
    assert SQRT2 * SQRT2 == FieldElem(2)
    assert SQRT2 * INV_SQRT2 == ONE
    assert SQRT2.is_real()
    assert SQRT2.to_real() == REAL_SQRT2
    assert REAL_SQRT2 * REAL_SQRT2 == RealField(2)


def test_conjugation_and_parts():
    z = FieldElem(1, 2, 3, 4)
    assert close(z.conj(), complex(z).conjugate())
    assert (z * z.conj()).is_real()
    assert close(FieldElem.from_real(z.real_part()), complex(z).real)
    assert close(FieldElem.from_real(z.imag_part()), complex(z).imag)
    assert FieldElem.from_parts(z.real_part(), z.imag_part()) == z


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (0, 0, 0),
        (1, 0, 1),
        (-1, 0, -1),
        (0, 1, 1),
        (0, -1, -1),
        (3, -2, 1),  # 3 - 2*sqrt2 > 0
        (-3, 2, -1),
        (2, -Fraction(3, 2), -1),  # 2 - 1.5*sqrt2 < 0
        (Fraction(99, 70), -1, 1),  # 99/70 is just above sqrt2
        (Fraction(140, 99), -1, -1),  # 140/99 is just below
    ],
)
def test_exact_sign(a, b, expected):
    assert sign(RealField(a, b)) == expected


def test_real_comparisons_and_decimal():
    x = 2 - 2 * REAL_SQRT2 / 3
    assert str(x.to_decimal(15)) == "1.05719095841794"
    assert RealField(1) < RealField(0, 1) < RealField(3, 0) / 2
    assert float(REAL_SQRT2) == pytest.approx(math.sqrt(2))


def test_decimal_survives_cancellation():
    # 665857/470832 approximates sqrt2 to 12 digits; the difference needs guard digits
    x = RealField(Fraction(665857, 470832), -1)
    with localcontext() as ctx:
        ctx.prec = 60
        ref = Decimal(665857) / Decimal(470832) - Decimal(2).sqrt()
    assert x.to_decimal(15) == +ref.quantize(Decimal("1e-26"))


@pytest.mark.parametrize(
    "text, value",
    [
        ("0", ZERO),
        ("1/2 + 1/2*w", FieldElem(Fraction(1, 2), Fraction(1, 2))),
        ("i", I),
        ("sqrt2/2", INV_SQRT2),
        ("(1 + i)^2", FieldElem(0, 0, 2)),
        ("-w^3", FieldElem(0, 0, 0, -1)),
    ],
)
def test_parse_field(text, value):
    assert parse_field(text) == value


def test_parse_real_rejects_complex():
    assert parse_real("1 - sqrt2") == RealField(1, -1)
    with pytest.raises(ValueError):
        parse_real("i")
    with pytest.raises(ValueError):
        parse_field("1 +")


@given(fields)
def test_format_field_roundtrip(x):
    assert parse_field(format_field(x)) == x


@given(reals)
def test_format_real_roundtrip(x):
    assert parse_real(format_real(x)) == x


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()
    with pytest.raises(ZeroDivisionError):
        RealField(0).inverse()


# field axioms: four properties of 2500 examples each give 10^4 random cases


@settings(max_examples=FIELD_EXAMPLES, deadline=None)
@given(fields, fields, fields)
def test_field_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + ZERO == x and x * ONE == x
    assert x + (-x) == ZERO


@settings(max_examples=FIELD_EXAMPLES, deadline=None)
@given(nonzero_fields, fields)
def test_field_inverse_and_conjugation(x, y):
    assert x * x.inverse() == ONE
    assert (y / x) * x == y
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.conj().conj() == x
    assert close(x * y, complex(x) * complex(y))


@settings(max_examples=FIELD_EXAMPLES, deadline=None)
@given(reals, reals, reals)
def test_real_ordered_field_axioms(x, y, z):
    assert x + y == y + x and x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert (x <= y) or (y <= x)
    if x <= y:
        assert x + z <= y + z
    if x.sign() >= 0 and y.sign() >= 0:
        assert (x * y).sign() >= 0
    f = float(x)
    if abs(f) > 1e-9:
        assert sign(x) == (1 if f > 0 else -1)


@settings(max_examples=FIELD_EXAMPLES, deadline=None)
@given(reals.filter(lambda r: not r.is_zero()), reals)
def test_real_inverse_and_embedding(x, y):
    assert x * x.inverse() == RealField(1)
    fx, fy = FieldElem.from_real(x), FieldElem.from_real(y)
    assert (fx * fy).to_real() == x * y
    assert (fx + fy).to_real() == x + y
    assert fx.is_real()


def test_linalg_basics():
    h = linalg.scale(INV_SQRT2, linalg.matrix([[1, 1], [1, -1]]))
    assert linalg.is_identity(linalg.matmul(h, h))
    assert linalg.is_hermitian(h)
    assert linalg.trace(linalg.identity(4)) == FieldElem(4)
    k = linalg.kron(linalg.matrix([[1, 0], [0, 0]]), linalg.identity(2))
    assert linalg.dim(k) == 4 and k[1][1] == ONE and k[2][2] == ZERO
    assert linalg.determinant(linalg.matrix([[1, 2], [3, 4]])) == FieldElem(-2)


@pytest.mark.parametrize(
    "rows, psd",
    [
        ([[1, 0], [0, 0]], True),
        ([[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 2)]], True),
        ([[Fraction(1, 2), 1], [1, Fraction(1, 2)]], False),
        ([[1, 0], [0, -1]], False),
    ],
)
def test_is_psd(rows, psd):
    assert linalg.is_psd(linalg.matrix(rows)) is psd
