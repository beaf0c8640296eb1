import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from affgaudin.scalars import QExt, S, Scalar, ConfigurationError

rats = st.builds(mpq, st.integers(-40, 40), st.integers(1, 12))
qexts = st.builds(QExt, rats, rats)


def test_s_squared_is_minus_two():
    assert S * S == QExt(-2)


def test_basic_arithmetic():
    a = QExt(1, 2)
    b = QExt(mpq(1, 2), -1)
    assert a + b == QExt(mpq(3, 2), 1)
    assert a * b == QExt(mpq(1, 2) + 4, -1 + 1)
    assert (a / a) == QExt(1)
    assert QExt(3) == 3


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        QExt(0).inverse()


def test_str_forms():
    assert str(QExt(mpq(2, 3))) == "2/3"
    assert "s" in str(QExt(0, 1))


@given(qexts, qexts, qexts)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == QExt(0)


@given(qexts)
def test_inverse(a):
    if a:
        assert a * a.inverse() == QExt(1)


@given(qexts)
def test_norm_is_multiplicative_with_conjugate(a):
    conj = QExt(a.rat, -a.srat)
    assert a * conj == QExt(a.norm())


def test_scalar_truncation():
    x = Scalar.monomial(1, u=-1, h=0, cutoff=2) + Scalar.monomial(1, u=0, h=1, cutoff=2)
    y = x * x
    # h^2 terms are dropped at cutoff 2
    assert all(h < 2 for (_, h) in y.terms)
    assert y.truncate(1) == Scalar.monomial(1, u=-2, cutoff=1)


def test_scalar_records_round_trip():
    x = Scalar({(0, 0): QExt(1, 2), (-1, 1): QExt(mpq(-1, 3))})
    assert Scalar.from_records(x.to_records()) == x


def test_mixed_cutoffs_rejected():
    with pytest.raises(ConfigurationError):
        Scalar.const(1, cutoff=2) + Scalar.const(1, cutoff=3)
