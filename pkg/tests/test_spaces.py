from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from affgaudin.algebra import State, current
from affgaudin.scalars import QExt
from affgaudin.spaces import (Eliminator, in_span, invariant_subspace, rank, solve_columns,
                              state_to_vector, top_term, vector_to_state)


def _oracle_rank(rows):
    """Plain Fraction Gaussian elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    rk, col = 0, 0
    ncol = len(m[0]) if m else 0
    while rk < len(m) and col < ncol:
        piv = next((i for i in range(rk, len(m)) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for i in range(len(m)):
            if i != rk and m[i][col]:
                fct = m[i][col] / m[rk][col]
                m[i] = [a - fct * b for a, b in zip(m[i], m[rk])]
        rk += 1
        col += 1
    return rk


def _as_vec(col):
    return {i: QExt(mpq(x)) for i, x in enumerate(col) if x}


matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=r, max_size=r), min_size=c, max_size=c)))


@given(matrices)
def test_rank_matches_oracle(cols):
    assert rank([_as_vec(c) for c in cols]) == _oracle_rank(cols)


@given(matrices, st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_solution_reproduces_target(cols, coeffs):
    target = {}
    for c, k in zip(cols, coeffs):
        for i, x in enumerate(c):
            target[i] = target.get(i, 0) + k * x
    sol = solve_columns([_as_vec(c) for c in cols], _as_vec([target.get(i, 0) for i in range(len(cols[0]))]))
    assert sol.consistent
    acc = {}
    for j, q in sol.particular.items():
        for i, x in enumerate(cols[j]):
            acc[i] = acc.get(i, QExt(0)) + q * QExt(x)
    assert all(acc.get(i, QExt(0)) == QExt(target.get(i, 0)) for i in range(len(cols[0])))
    assert len(sol.nullspace) == len(cols) - _oracle_rank(cols)
    for ker in sol.nullspace:
        for i in range(len(cols[0])):
            assert sum((q * QExt(cols[j][i]) for j, q in ker.items()), QExt(0)) == QExt(0)


def test_inconsistent_system():
    sol = solve_columns([_as_vec([1, 0])], _as_vec([0, 1]))
    assert not sol.consistent
    assert sol.residual


def test_eliminator_reports_dependence():
    el = Eliminator()
    assert el.add(_as_vec([1, 2]), 0) is None
    dep = el.add(_as_vec([2, 4]), 1)
    assert dep is not None and el.rank == 1


def test_vector_round_trip():
    v = State.from_monomial((current(2, -2), current(1, -1)), QExt(1, 1), u=-1)
    assert vector_to_state(state_to_vector(v)) == v


@pytest.mark.parametrize("n,dim", [(0, 1), (1, 0), (2, 1), (4, 14)])
def test_invariant_dimensions(n, dim):
    sp = invariant_subspace(n)
    assert sp.dimension == dim
    assert sp.check_independent()


def test_invariant_dimension_three():
    # three independent cubic invariants appear in the computed space
    assert invariant_subspace(3).dimension == 3


def test_span_membership():
    sp = invariant_subspace(2)
    v = sp.vectors[0]
    assert in_span(v.scale(3), sp.vectors)
    assert not in_span(State.from_monomial((current(1, -1), current(1, -1))), sp.vectors)


def test_top_term_of_casimir():
    sp = invariant_subspace(2)
    t = top_term(sp.vectors[0], 2)
    (c,) = {t[(a, a)] for a in (1, 2, 3)}
    assert c and t[(1, 2)] == QExt(0)
