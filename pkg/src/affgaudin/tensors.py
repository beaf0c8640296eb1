"""sl2 index bookkeeping with concrete indices 1, 2, 3.

The basis is orthonormal for the invariant form, so upper and lower indices
coincide and the structure constants are f^{abc} = s * eps^{abc}.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Mapping

from gmpy2 import mpq

from .scalars import QExt, S, ZERO

COLORS = (1, 2, 3)

__all__ = [
    "COLORS",
    "ColorIndex",
    "delta",
    "f",
    "structure_constant",
    "sym_tensor_value",
    "symmetrize_indices",
    "verify_syzygies",
    "SyzygyReport",
    "jacobi_holds",
    "is_invariant",
]


def ColorIndex(a: int) -> int:
    """Range-checked sl2 color label."""
    if a not in COLORS:
        raise ValueError(f"color index must be 1, 2 or 3, got {a!r}")
    return a


def _eps(a: int, b: int, c: int) -> int:
    if len({a, b, c}) < 3:
        return 0
    return 1 if (a, b, c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1


def delta(a: int, b: int) -> int:
    return 1 if a == b else 0


@lru_cache(maxsize=None)
def f(a: int, b: int, c: int) -> QExt:
    """Structure constant f^{abc} = s * eps^{abc}."""
    ColorIndex(a), ColorIndex(b), ColorIndex(c)
    e = _eps(a, b, c)
    return S * e if e else ZERO


@lru_cache(maxsize=None)
def structure_constant(a: int, b: int) -> tuple[int, QExt] | None:
    """The unique (c, f^{abc}) with f^{abc} != 0, or None when a == b."""
    if a == b:
        return None
    c = 6 - a - b
    return c, f(a, b, c)


@lru_cache(maxsize=None)
def _sym_sorted(indices: tuple[int, ...]) -> mpq:
    n = len(indices)
    total = 0
    for perm in itertools.permutations(range(n)):
        prod = 1
        for k in range(0, n, 2):
            if indices[perm[k]] != indices[perm[k + 1]]:
                prod = 0
                break
        total += prod
    return mpq(total, factorial(n))


def sym_tensor_value(rank: int, indices) -> mpq:
    """delta_{(i1 i2} ... delta_{i_{2n-1} i_{2n})}, averaged over all permutations."""
    indices = tuple(indices)
    if rank % 2 or rank < 0:
        raise ValueError(f"symmetric invariant tensors have even rank, got {rank}")
    if len(indices) != rank:
        raise ValueError(f"expected {rank} indices, got {len(indices)}")
    for a in indices:
        ColorIndex(a)
    if rank == 0:
        return mpq(1)
    # the value only depends on the multiset of indices
    return _sym_sorted(tuple(sorted(indices)))


def symmetrize_indices(tensor: Mapping[tuple[int, ...], QExt], slots) -> dict[tuple[int, ...], QExt]:
    """Average ``tensor`` over all permutations of the positions in ``slots``."""
    slots = tuple(slots)
    if len(slots) <= 1:
        return {k: QExt.coerce(v) for k, v in tensor.items() if v}
    perms = list(itertools.permutations(slots))
    weight = QExt(mpq(1, len(perms)))
    out: dict[tuple[int, ...], QExt] = {}
    for idx, val in tensor.items():
        val = QExt.coerce(val) * weight
        for perm in perms:
            new = list(idx)
            for src, dst in zip(slots, perm):
                new[dst] = idx[src]
            key = tuple(new)
            out[key] = out.get(key, ZERO) + val
    return {k: v for k, v in out.items() if v}


@dataclass
class SyzygyReport:
    results: dict[str, bool] = field(default_factory=dict)
    counterexamples: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.results.values())


def verify_syzygies() -> SyzygyReport:
    """Check the three quadratic relations between f and delta by enumeration."""
    rep = SyzygyReport()

    def record(name, gen):
        rep.results[name] = True
        for idx, lhs, rhs in gen:
            if lhs != rhs:
                rep.results[name] = False
                rep.counterexamples[name] = (idx, lhs, rhs)
                return

    def ff_cde():
        for a, b, d, e in itertools.product(COLORS, repeat=4):
            lhs = sum((f(a, b, c) * f(c, d, e) for c in COLORS), ZERO)
            rhs = QExt(2 * (delta(a, e) * delta(b, d) - delta(a, d) * delta(b, e)))
            yield (a, b, d, e), lhs, rhs

    def ff_abd():
        for c, d in itertools.product(COLORS, repeat=2):
            lhs = sum((f(a, b, c) * f(a, b, d) for a in COLORS for b in COLORS), ZERO)
            yield (c, d), lhs, QExt(-4 * delta(c, d))

    def f_delta():
        for a, b, c, d, e in itertools.product(COLORS, repeat=5):
            lhs = (f(a, b, c) * delta(d, e) - f(b, c, d) * delta(a, e)
                   + f(c, d, a) * delta(b, e) - f(d, a, b) * delta(c, e))
            yield (a, b, c, d, e), lhs, ZERO

    record("ff_contract_one", ff_cde())
    record("ff_contract_two", ff_abd())
    record("f_delta_cyclic", f_delta())
    return rep


def jacobi_holds() -> bool:
    for a, b, c, e in itertools.product(COLORS, repeat=4):
        tot = ZERO
        for d in COLORS:
            tot = tot + f(a, b, d) * f(d, c, e) + f(b, c, d) * f(d, a, e) + f(c, a, d) * f(d, b, e)
        if tot:
            return False
    return True


def is_invariant(component, rank: int) -> bool:
    """Invariance of a rank-``rank`` tensor given as a callable on index tuples.

    Checks sum_k f^{c a_k b} t^{a_1..b..a_n} = 0 for every c and index tuple.
    """
    for c in COLORS:
        for idx in itertools.product(COLORS, repeat=rank):
            tot = ZERO
            for k in range(rank):
                for b in COLORS:
                    fc = f(c, idx[k], b)
                    if fc:
                        new = idx[:k] + (b,) + idx[k + 1:]
                        tot = tot + fc * QExt.coerce(component(new))
            if tot:
                return False
    return True
