import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from affgaudin.algebra import W, Z, State, apply_word, central, current, enumerate_monomials, normal_order
from affgaudin.scalars import QExt
from affgaudin.tensors import COLORS
from affgaudin.vertex import (TruncationError, derivative, expand_at_diagonal, mode_action,
                              skew_symmetry_check, translate, twisted_derivative)

one_point = st.integers(1, 3).flatmap(
    lambda n: st.sampled_from(enumerate_monomials(n, n)).map(lambda m: State.from_monomial(m)))


def test_translate_on_generators():
    # T I^a_{-1}|0> = I^a_{-2}|0>;  T k|0> = 0
    assert translate(State.from_monomial((current(1, -1),))) == State.from_monomial((current(1, -2),))
    assert translate(State.from_monomial((central(),))) == State.zero()
    assert translate(State.vacuum()) == State.zero()


def test_translate_is_derivation():
    v = State.from_monomial((current(1, -1), current(2, -1)))
    expect = normal_order((current(1, -2), current(2, -1))) + normal_order((current(1, -1), current(2, -2)))
    assert translate(v) == expect


@given(st.sampled_from(COLORS), st.integers(-3, 3), one_point)
def test_field_of_depth_one_current(a, n, B):
    # Y(I^a_{-1}|0>, x) = sum I^a_n x^{-n-1}
    A = State.from_monomial((current(a, -1),))
    assert mode_action(A, n, B) == apply_word((current(a, n),), B)


@given(one_point)
def test_vacuum_is_identity(B):
    assert mode_action(State.vacuum(), -1, B) == B
    assert mode_action(State.vacuum(), 0, B) == State.zero()
    assert mode_action(B, -1, State.vacuum()) == B


@given(one_point, one_point)
def test_translate_has_no_zero_mode(A, B):
    assert mode_action(translate(A), 0, B) == State.zero()


@given(one_point, one_point)
def test_skew_symmetry(A, B):
    assert skew_symmetry_check(A, B).ok


@given(one_point, one_point, st.integers(-2, 1))
def test_translate_derivative_property(A, B, n):
    # (TA)_(n) = -n A_(n-1)
    assert mode_action(translate(A), n, B) == mode_action(A, n - 1, B).scale(-n)


def test_twisted_derivative_definition():
    v = State.from_monomial((current(1, -1),))
    d = derivative(Z, v)
    assert d == State.from_monomial((current(1, -1, 1),))
    kv = apply_word((central(),), v)
    assert twisted_derivative(3, Z, v) == d - kv.scale(QExt(mpq(3, 2)))
    assert twisted_derivative(0, Z, v) == d


def test_derivative_of_u_power():
    v = State.from_monomial((current(1, -1, 0, W),), 1, u=-1)
    assert derivative(Z, v) == State.from_monomial((current(1, -1, 0, W),), -1, u=-2)
    assert derivative(W, v) == (State.from_monomial((current(1, -1, 0, W),), 1, u=-2)
                                + State.from_monomial((current(1, -1, 1, W),), 1, u=-1))


def test_expansion_of_regular_state():
    v = State.from_monomial((current(2, -1, 0, W),))
    ser = expand_at_diagonal(v, 2)
    assert ser.is_regular()
    assert ser.coefficient(0) == State.from_monomial((current(2, -1),))
    assert ser.coefficient(2) == State.from_monomial((current(2, -1, 2),), mpq(1, 2))


def test_expansion_pole_and_truncation():
    v = State.from_monomial((current(2, -1, 0, W),), 1, u=-1)
    with pytest.raises(TruncationError):
        expand_at_diagonal(v, 0)
    ser = expand_at_diagonal(v, 1)
    # u^-1 = -x^-1
    assert ser.coefficient(-1) == State.from_monomial((current(2, -1),), -1)
    assert not ser.is_regular()
