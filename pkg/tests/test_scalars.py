from fractions import Fraction

import pytest

from merosolve.scalars import (
    QComplex,
    canonical_scalar,
    is_exact,
    is_zero,
    mul_frac,
    parse_complex_literal,
    principal_root,
)


def test_exact_arithmetic():
    a = QComplex(1, 2)
    b = QComplex(Fraction(1, 3), -1)
    assert a + b == QComplex(Fraction(4, 3), 1)
    assert a * b == QComplex(Fraction(1, 3) + 2, Fraction(2, 3) - 1)
    assert (a / b) * b == a
    assert a ** 0 == 1
    assert a ** -1 == QComplex(1) / a


def test_i_powers():
    i = QComplex(0, 1)
    assert i * i == -1
    assert i ** 4 == 1
    assert (QComplex(1, 1)) ** 4 == -4


def test_float_contact_degrades_to_complex():
    a = QComplex(1, 2)
    assert isinstance(a + 0.5, complex)
    assert isinstance(0.5 * a, complex)
    assert a + 0.5 == complex(1.5, 2)


def test_rejects_float_construction():
    with pytest.raises(TypeError):
        QComplex(0.5)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QComplex(1) / QComplex(0)


def test_equality_and_hash_against_builtins():
    assert QComplex(2) == 2
    assert QComplex(0, 1) == 1j
    assert hash(QComplex(2)) == hash(2)


def test_canonical_scalar_modes():
    assert is_exact(canonical_scalar(3))
    assert is_exact(canonical_scalar(Fraction(1, 2)))
    assert canonical_scalar(0.5) == 0.5 and not is_exact(canonical_scalar(0.5))


def test_is_zero():
    assert is_zero(QComplex(0))
    assert not is_zero(QComplex(0, Fraction(1, 10 ** 12)))
    assert is_zero(1e-15, tol=1e-12)
    assert not is_zero(1e-10, tol=1e-12)


def test_mul_frac_exact_and_float():
    assert mul_frac(QComplex(0, 3), Fraction(1, 3)) == QComplex(0, 1)
    assert abs(mul_frac(3.0 + 0j, Fraction(1, 3)) - 1.0) < 1e-15


@pytest.mark.parametrize(
    "text,expected,exact",
    [
        ("1", QComplex(1), True),
        ("3/2", QComplex(Fraction(3, 2)), True),
        ("-2i", QComplex(0, -2), True),
        ("1+2i", QComplex(1, 2), True),
        ("i", QComplex(0, 1), True),
        ("-i", QComplex(0, -1), True),
        ("1.5", complex(1.5), False),
        ("0.5-0.5i", complex(0.5, -0.5), False),
        ("1e-3", complex(1e-3), False),
        ("3/2-1/2i", QComplex(Fraction(3, 2), Fraction(-1, 2)), True),
    ],
)
def test_parse_complex_literal(text, expected, exact):
    value = parse_complex_literal(text)
    assert value == expected
    assert is_exact(value) == exact


@pytest.mark.parametrize("bad", ["", "1+", "2x", "1 2", "--3", "i2"])
def test_parse_complex_literal_rejects(bad):
    with pytest.raises(ValueError):
        parse_complex_literal(bad)


def test_principal_root():
    r = principal_root(-4, 4)
    assert abs(r - (1 + 1j)) < 1e-14
    assert principal_root(0, 3) == 0
