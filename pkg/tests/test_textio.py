import json

import pytest
from hypothesis import given, strategies as st

from affgaudin.algebra import Regime, State, current, enumerate_monomials
from affgaudin.scalars import QExt
from affgaudin.textio import (ParseError, format_paper, parse_state, serialize, state_from_records,
                              state_to_records)
from gmpy2 import mpq

coeffs = st.builds(QExt, st.builds(mpq, st.integers(-9, 9), st.integers(1, 5)),
                   st.builds(mpq, st.integers(-9, 9), st.integers(1, 5)))
monos = st.integers(1, 3).flatmap(lambda n: st.sampled_from(enumerate_monomials(n, n, (0, 1))))
states = st.lists(st.tuples(monos, coeffs, st.integers(-2, 0)), max_size=4).map(
    lambda ts: sum((State.from_monomial(m, c, u) for m, c, u in ts), State.zero()))


def test_depth_one_state():
    v = parse_state("1 * I[a=1,p=0,n=-1,pt=z] * vac")
    assert v == State.from_monomial((current(1, -1),))
    assert v.bigrade() == (1, 1)


def test_s_coefficient():
    v = parse_state("s * I[a=3,p=1,n=-2,pt=z] * vac")
    assert v == State.from_monomial((current(3, -2, 1),), QExt(0, 1))


def test_index_sum_and_normal_ordering():
    v = parse_state("d[a,b] * I[a=a,n=-1] * I[a=b,n=-1] * vac")
    assert len(v) == 3
    w = parse_state("I[a=1,n=1] * I[a=1,n=-1] * vac")
    assert w == parse_state("-k[p=1] * vac")


def test_operators():
    assert parse_state("T(I[a=2,n=-1] * vac)") == parse_state("I[a=2,n=-2] * vac")
    assert parse_state("D[j=0](I[a=2,n=-1] * vac)") == parse_state("I[a=2,n=-1,p=1] * vac")


@pytest.mark.parametrize("text,pos", [("I[a=4,n=-1] * vac", 4), ("1 * * vac", 4), ("I[a=1] * vac", 0)])
def test_parse_errors_have_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_state(text)
    assert exc.value.pos == pos


@given(states)
def test_serialize_round_trip(v):
    text = serialize(v)
    assert parse_state(text) == v
    assert serialize(parse_state(text)) == text


@given(states)
def test_records_round_trip(v):
    recs = json.loads(json.dumps(state_to_records(v)))
    assert state_from_records(recs) == v


def test_rescaled_round_trip():
    reg = Regime(True, 3)
    v = parse_state("h^1 * I[a=1,n=-2] * I[a=2,n=-1,p=1] * vac", reg)
    assert parse_state(serialize(v), reg) == v


def test_display_format():
    v = parse_state("2 * u^-1 * I[a=1,n=-2,pt=z] * I[a=1,n=-1,pt=w] * vac")
    assert format_paper(v) == "2 (z-w)^-1 I^{1}_{-2}(z) I^{1}_{-1}(w)|0>"
    assert format_paper(State.zero()) == "0"
