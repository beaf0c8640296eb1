"""Exact linear algebra over Q(s) on spaces of states, invariant subspaces
and top terms."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Iterable, Sequence

from .algebra import (
    CURRENT,
    EXACT,
    Z,
    Regime,
    State,
    _acc,
    diagonal_action,
    enumerate_monomials,
    filtration_degree,
    klein_class,
    monomial_key,
)
from .scalars import ONE, QExt, ZERO
from .tensors import COLORS

__all__ = [
    "Eliminator",
    "LinearProblem",
    "Solution",
    "solve",
    "solve_columns",
    "rank",
    "SubspaceBasis",
    "invariant_subspace",
    "top_term",
    "state_to_vector",
    "vector_to_state",
    "in_span",
    "combine",
]

Vector = dict  # sortable key -> QExt


def state_to_vector(v: State | Sequence[State]) -> Vector:
    """Flatten a state (or a tuple of states, one block each) into a vector."""
    if isinstance(v, State):
        v = (v,)
    out: Vector = {}
    for i, st in enumerate(v):
        for (m, u, h), c in st.items():
            out[_vkey(i, m, u, h)] = c
    return out


def _vkey(block: int, m: tuple, u: int, h: int) -> tuple:
    # Most currents first, then highest pole. Commutator corrections always
    # have fewer currents, so translates and twisted derivatives act
    # triangularly on leading keys and elimination stays sparse.
    return (block, -filtration_degree(m), u, h, monomial_key(m), m)


def vector_to_state(vec: Vector, regime: Regime = EXACT, block: int = 0) -> State:
    return State({(k[5], k[2], k[3]): c for k, c in vec.items() if k[0] == block}, regime, _trusted=True)


def _axpy(y: dict, a: QExt, x: dict) -> None:
    """y += a*x in place, dropping zeros."""
    for k, c in x.items():
        v = y.get(k)
        if v is None:
            y[k] = a * c
        else:
            v = v + a * c
            if v:
                y[k] = v
            else:
                del y[k]


class Eliminator:
    """Incremental sparse elimination; each stored row is monic at its
    smallest key, and keys are processed in increasing order."""

    def __init__(self):
        self.rows: dict = {}
        self.pivot_order: list = []

    def reduce(self, vec: Vector, combo: dict | None = None) -> tuple[Vector, dict]:
        vec = dict(vec)
        combo = dict(combo or {})
        rows = self.rows
        while vec:
            k = min(vec)
            row = rows.get(k)
            if row is None:
                break
            c = -vec[k]
            _axpy(vec, c, row[0])
            _axpy(combo, c, row[1])
        return vec, combo

    def reduce_full(self, vec: Vector, combo: dict | None = None) -> tuple[Vector, dict]:
        """Reduce every key that is a pivot, not just the leading one."""
        vec = dict(vec)
        combo = dict(combo or {})
        rows = self.rows
        done: set = set()
        while True:
            cand = [k for k in vec if k in rows and k not in done]
            if not cand:
                return vec, combo
            k = min(cand)
            c = -vec[k]
            _axpy(vec, c, rows[k][0])
            _axpy(combo, c, rows[k][1])
            done.add(k)

    def add(self, vec: Vector, tag) -> dict | None:
        """Insert a vector labelled ``tag``; return a kernel combination if it
        is dependent on the rows already present."""
        vec, combo = self.reduce(vec, {tag: ONE})
        if not vec:
            return combo
        k = min(vec)
        inv = vec[k].inverse()
        self.rows[k] = ({kk: c * inv for kk, c in vec.items()}, {t: c * inv for t, c in combo.items()})
        self.pivot_order.append(k)
        return None

    @property
    def rank(self) -> int:
        return len(self.rows)


@dataclass
class Solution:
    """Particular solution plus nullspace; coefficients index the unknown basis.

    Both are sparse maps column index -> coefficient; use ``dense`` for lists.
    """

    consistent: bool
    particular: dict[int, QExt]
    nullspace: list[dict[int, QExt]]
    residual: Vector = field(default_factory=dict)
    rank: int = 0
    columns: int = 0

    def residual_state(self, regime: Regime = EXACT, block: int = 0) -> State:
        return vector_to_state(self.residual, regime, block)

    @staticmethod
    def dense(vec: dict[int, QExt], n: int) -> list[QExt]:
        return [vec.get(i, ZERO) for i in range(n)]

    def to_records(self) -> dict:
        return {
            "consistent": self.consistent,
            "particular": {str(i): q.to_record() for i, q in sorted(self.particular.items())},
            "nullspace": [{str(i): q.to_record() for i, q in sorted(v.items())} for v in self.nullspace],
            "rank": self.rank,
        }


def solve_columns(columns: Iterable[Vector], target: Vector | None = None, *,
                  nullspace: bool = True) -> Solution:
    """Solve sum_i x_i columns[i] = target exactly.

    Columns are consumed lazily, so a generator keeps peak memory down. With
    ``nullspace=False`` dependent columns are dropped without recording them.
    """
    el = Eliminator()
    kernel: list[dict[int, QExt]] = []
    count = 0
    for i, col in enumerate(columns):
        dep = el.add(col, i)
        count += 1
        if dep is not None and nullspace:
            kernel.append(dep)
    if target is None:
        target = {}
    resid, combo = el.reduce(target, {})
    if resid:
        resid, combo = el.reduce_full(resid, combo)
        return Solution(False, {}, kernel, resid, el.rank, count)
    # target = -sum combo * col
    return Solution(True, {j: -c for j, c in combo.items()}, kernel, {}, el.rank, count)


def rank(vectors: Iterable[Vector | State]) -> int:
    el = Eliminator()
    for i, v in enumerate(vectors):
        if isinstance(v, State):
            v = state_to_vector(v)
        el.add(v, i)
    return el.rank


def in_span(v: State, basis: Sequence[State]) -> bool:
    return solve_columns([state_to_vector(b) for b in basis], state_to_vector(v)).consistent


@dataclass
class LinearProblem:
    """Find x with constraint_map(sum x_i unknown_basis[i]) = target.

    ``constraint_map`` must be linear; it may return one state or a tuple of
    states (stacked constraints).
    """

    unknown_basis: list[State]
    constraint_map: Callable[[State], State | Sequence[State]]
    target: State | Sequence[State] | None = None


def solve(problem: LinearProblem) -> Solution:
    cols = [state_to_vector(problem.constraint_map(b)) for b in problem.unknown_basis]
    tgt = state_to_vector(problem.target) if problem.target is not None else {}
    return solve_columns(cols, tgt)


def combine(coeffs: dict[int, QExt] | Sequence[QExt], basis: Sequence[State], regime: Regime | None = None) -> State:
    regime = regime or (basis[0].regime if basis else EXACT)
    if not isinstance(coeffs, dict):
        coeffs = dict(enumerate(coeffs))
    acc: dict = {}
    for i in sorted(coeffs):
        c = coeffs[i]
        if c:
            for k, q in basis[i].items():
                _acc(acc, k, c * q)
    return State(acc, regime, _trusted=True)


@dataclass
class SubspaceBasis:
    grade: tuple[int, int]
    vectors: list[State]
    labels: list[str] | None = None

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def contains(self, v: State) -> bool:
        return in_span(v, self.vectors)

    def check_independent(self) -> bool:
        return rank(self.vectors) == len(self.vectors)


_INV_CACHE: dict[tuple, SubspaceBasis] = {}


def _zero_mode_images(v: State) -> tuple[State, State, State]:
    return tuple(diagonal_action(r, 0, v) for r in COLORS)


def invariant_subspace(n: int, p: int | None = None, points: Iterable[int] = (Z,)) -> SubspaceBasis:
    """Joint kernel of the three diagonal zero modes on V_{n,p} (p defaults to n)."""
    if n < 0:
        raise ValueError("depth must be >= 0")
    p = n if p is None else p
    pts = tuple(sorted(set(points)))
    key = (n, p, pts)
    hit = _INV_CACHE.get(key)
    if hit is not None:
        return hit
    # invariants are fixed by the rotations by pi, so only the Klein-even class matters
    monos = [m for m in enumerate_monomials(n, p, pts) if klein_class(m) == (0, 0)]
    basis = [State({(m, 0, 0): ONE}, EXACT, _trusted=True) for m in monos]
    sol = solve(LinearProblem(basis, _zero_mode_images))
    vecs = [combine(k, basis) for k in sol.nullspace]
    out = SubspaceBasis((n, p), vecs)
    _INV_CACHE[key] = out
    return out


def _distinct_perms(idx: tuple[int, ...]) -> int:
    out = factorial(len(idx))
    for c in COLORS:
        out //= factorial(idx.count(c))
    return out


def top_term(v: State, degree: int | None = None) -> dict[tuple[int, ...], QExt]:
    """Symmetric coefficient tensor of the part of v made of ``degree`` currents
    I^{a}_{-1}(z); every index tuple is listed, zero when v has no such part."""
    if degree is None:
        degree = v.depth() if v else 0
    coeff: dict[tuple[int, ...], QExt] = {}
    for (m, u, h), c in v.items():
        if u or h or len(m) != degree:
            continue
        if all(g.kind == CURRENT and g.mode == -1 and g.deriv == 0 and g.point == Z for g in m):
            coeff[tuple(g.color for g in m)] = c
    out: dict[tuple[int, ...], QExt] = {}
    for idx in itertools.product(COLORS, repeat=degree):
        key = tuple(sorted(idx))
        c = coeff.get(key)
        out[idx] = c * QExt(1) / _distinct_perms(key) if c else ZERO
    return out
