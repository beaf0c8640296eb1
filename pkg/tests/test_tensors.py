import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from affgaudin.scalars import QExt, S
from affgaudin.tensors import (COLORS, delta, f, is_invariant, jacobi_holds, structure_constant,
                               sym_tensor_value, symmetrize_indices, verify_syzygies)


def _matchings(idx):
    """Perfect matchings of positions whose paired colors agree (oracle for t)."""
    if not idx:
        return 1
    first, rest = idx[0], idx[1:]
    return sum(_matchings(rest[:k] + rest[k + 1:]) for k in range(len(rest)) if rest[k] == first)


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def test_structure_constants():
    assert f(1, 2, 3) == S
    assert f(2, 1, 3) == -S
    assert f(1, 1, 2) == QExt(0)
    assert structure_constant(3, 1) == (2, S)
    assert structure_constant(2, 2) is None


def test_color_range_checked():
    with pytest.raises(ValueError):
        f(0, 1, 2)


def test_syzygies_and_jacobi():
    rep = verify_syzygies()
    assert rep.ok, rep.counterexamples
    assert set(rep.results) == {"ff_contract_one", "ff_contract_two", "f_delta_cyclic"}
    assert jacobi_holds()


def test_casimir_normalisation():
    # f^{acd} f^{bcd} = -4 delta^{ab}
    for a, b in itertools.product(COLORS, repeat=2):
        tot = sum((f(a, c, d) * f(b, c, d) for c in COLORS for d in COLORS), QExt(0))
        assert tot == QExt(-4 * delta(a, b))


@pytest.mark.parametrize("rank", [2, 4, 6])
def test_sym_tensor_matches_matching_count(rank):
    for idx in itertools.product(COLORS, repeat=rank):
        assert sym_tensor_value(rank, idx) == mpq(_matchings(idx), _double_factorial(rank - 1))


def test_sym_tensor_values():
    assert sym_tensor_value(4, (1, 1, 2, 2)) == mpq(1, 3)
    assert sym_tensor_value(4, (1, 1, 1, 1)) == 1
    assert sym_tensor_value(0, ()) == 1
    with pytest.raises(ValueError):
        sym_tensor_value(3, (1, 1, 1))
    with pytest.raises(ValueError):
        sym_tensor_value(4, (1, 1))


@pytest.mark.parametrize("rank", [2, 4])
def test_symmetric_tensor_is_invariant(rank):
    assert is_invariant(lambda idx: sym_tensor_value(rank, idx), rank)


def test_non_invariant_detected():
    assert not is_invariant(lambda idx: 1 if idx == (1, 1) else 0, 2)


@given(st.lists(st.sampled_from(COLORS), min_size=3, max_size=3))
def test_symmetrize_is_idempotent(idx):
    tensor = {tuple(idx): QExt(1)}
    once = symmetrize_indices(tensor, (0, 1, 2))
    assert symmetrize_indices(once, (0, 1, 2)) == once
    assert sum(once.values(), QExt(0)) == QExt(1)
