"""Executable checks of the main statements: singular vectors up to twisted
derivatives, zero-product decompositions and diagonal regularity."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .algebra import (
    EXACT,
    W,
    Z,
    State,
    _acc,
    _apply_terms,
    current,
    diagonal_action,
    enumerate_monomials,
    klein_class,
    clear_caches,
)
from .golden import golden_state
from .scalars import ONE
from .spaces import (
    Eliminator,
    Solution,
    _vkey,
    SubspaceBasis,
    combine,
    invariant_subspace,
    solve_columns,
    state_to_vector,
)
from .tensors import COLORS
from .vertex import clear_vertex_caches, expand_at_diagonal, mode_action, translate, twisted_derivative

__all__ = [
    "VerificationError",
    "SingularWitness",
    "Decomposition",
    "RegularityReport",
    "singular_subspace",
    "build_sigma",
    "move_to",
    "swap_points",
    "zero_product",
    "decompose_zero_product",
    "decompose_state_product",
    "verify_given_decomposition",
    "skew_partner",
    "regular_modulo_translates",
    "WEIGHTS",
    "weighted_derivative",
]


class VerificationError(AssertionError):
    """A claimed identity failed to hold exactly."""


WEIGHTS = {(1, 1): (1, -1), (1, 3): (3, -1), (3, 1): (1, -3), (3, 3): (3, -3)}


# ------------------------------------------------------------------ helpers

def _mono_state(m: tuple, u: int = 0) -> State:
    return State({(m, u, 0): ONE}, EXACT, _trusted=True)


def move_to(v: State, point: int) -> State:
    """Relabel every generator of a one-point state to ``point``."""
    if len(v.points()) > 1:
        raise ValueError("move_to expects a state supported at a single point")
    return State({(tuple(g._replace(point=point) for g in m), u, h): c for (m, u, h), c in v.items()},
                 v.regime, _trusted=True)


def swap_points(v: State) -> State:
    """Exchange z and w; u = z - w changes sign and words are reordered."""
    out: dict = {}
    for (m, u, h), c in v.items():
        word = tuple(g._replace(point=W if g.point == Z else Z) for g in m)
        c = -c if u % 2 else c
        for k, q in _apply_terms(word, {((), u, h): c}, v.regime).items():
            _acc(out, k, q)
    return State(out, v.regime, _trusted=True)


def _klein_of_color(r: int) -> tuple[int, int]:
    return klein_class((current(r, -1),))


# ---------------------------------------------------------------- singular

@dataclass
class SingularWitness:
    vector: State
    G: dict[int, State]

    def check(self, degree: int) -> bool:
        return all(
            diagonal_action(r, 1, self.vector) == twisted_derivative(degree - 1, Z, self.G[r])
            for r in COLORS
        )


_SING_CACHE: dict[int, tuple[SubspaceBasis, list[SingularWitness]]] = {}


def singular_subspace(n: int) -> tuple[SubspaceBasis, list[SingularWitness]]:
    """Invariant states of degree n that are singular up to D^{(n-1)}_z.

    Unknowns are the coordinates on the invariant basis together with the
    witnesses G^r; the mode-1 condition is imposed for r = 1, 2, 3 and mode 2
    is checked afterwards.
    """
    if n not in (2, 3, 4):
        raise ValueError("singular_subspace supports n = 2, 3, 4")
    hit = _SING_CACHE.get(n)
    if hit is not None:
        return hit
    inv = invariant_subspace(n)
    j = n - 1
    cols: list[dict] = []
    g_basis: list[tuple[int, State]] = []
    for r in COLORS:
        kc = _klein_of_color(r)
        for m in enumerate_monomials(n - 1, n - 1):
            if klein_class(m) != kc:
                continue
            g = _mono_state(m)
            g_basis.append((r, g))
            blocks = [State.zero()] * 3
            blocks[r - 1] = -twisted_derivative(j, Z, g)
            cols.append(state_to_vector(tuple(blocks)))
    ng = len(cols)
    for s in inv.vectors:
        cols.append(state_to_vector(tuple(diagonal_action(r, 1, s) for r in COLORS)))
    sol = solve_columns(cols)
    vectors: list[State] = []
    witnesses: list[SingularWitness] = []
    for ker in sol.nullspace:
        xi = {i - ng: c for i, c in ker.items() if i >= ng}
        if not xi:
            continue
        v = combine(xi, inv.vectors)
        G = {r: State.zero() for r in COLORS}
        for i, c in ker.items():
            if i < ng:
                r, g = g_basis[i]
                G[r] = G[r] + g.scale(c)
        w = SingularWitness(v, G)
        if not w.check(n):
            raise VerificationError("singular witness does not reproduce the mode-1 action")
        vectors.append(v)
        witnesses.append(w)
    _check_mode_two(n, vectors)
    out = (SubspaceBasis((n, n), vectors), witnesses)
    _SING_CACHE[n] = out
    return out


def _check_mode_two(n: int, vectors: Sequence[State]) -> None:
    if n < 2 or not vectors:
        return
    for r in COLORS:
        kc = _klein_of_color(r)
        images = [state_to_vector(twisted_derivative(n - 1, Z, _mono_state(m)))
                  for m in enumerate_monomials(n - 2, n - 1) if klein_class(m) == kc]
        for v in vectors:
            target = diagonal_action(r, 2, v)
            if target and not solve_columns(images, state_to_vector(target), nullspace=False).consistent:
                raise VerificationError(f"mode-2 action of color {r} leaves the twisted-derivative image")


def build_sigma(n: int, check: bool = True) -> State:
    """The quadratic (n=1) or quartic (n=3) singular density."""
    if n not in (1, 3):
        raise ValueError("build_sigma supports n = 1, 3")
    v = golden_state(f"sigma{n}")
    if check:
        space, _ = singular_subspace(n + 1)
        if not space.contains(v):
            raise VerificationError(f"sigma{n} is not singular up to twisted derivatives")
    return v


# ---------------------------------------------------------------- zero products

@dataclass
class Decomposition:
    """product = (alpha D^{(m)}_z + beta D^{(n)}_w) A + T B."""

    product: State
    A: State
    B: State
    weights: tuple[int, int]
    twists: tuple[int, int]
    pole_bound: int | None = None
    rank: int | None = None
    nullity: int | None = None
    columns: int | None = None
    wall_time: float = 0.0
    residual: State = field(default_factory=State.zero)

    @property
    def ok(self) -> bool:
        return not self.residual

    def report(self) -> dict:
        return {
            "twists": list(self.twists),
            "weights": list(self.weights),
            "pole_bound": self.pole_bound,
            "columns": self.columns,
            "rank": self.rank,
            "A_terms": len(self.A),
            "B_terms": len(self.B),
            "residual_terms": len(self.residual),
            "pass": self.ok,
            "wall_time": round(self.wall_time, 3),
        }


def weighted_derivative(A: State, weights: tuple, twists: tuple) -> State:
    a, b = weights
    jz, jw = twists
    return twisted_derivative(jz, Z, A).scale(a) + twisted_derivative(jw, W, A).scale(b)


def zero_product(m: int, n: int) -> State:
    """sigma_m(z)_(0) sigma_n(w)."""
    return mode_action(build_sigma(m), 0, move_to(build_sigma(n), W))


def verify_given_decomposition(m: int, n: int, A: State, B: State) -> State:
    """Residual of the zero-product identity for a given pair (A, B)."""
    P = zero_product(m, n)
    return P - weighted_derivative(A, WEIGHTS[(m, n)], (m, n)) - translate(B)


def _ansatz(n: int, p: int, klein: tuple, poles: Sequence[int], regime=EXACT, hs: Sequence[int] = (0,),
            points: Sequence[int] = (Z, W)) -> list[State]:
    out = []
    for k in poles:
        for mono in enumerate_monomials(n, p - k, points):
            if klein_class(mono) == klein:
                for h in hs:
                    out.append(State({(mono, -k, h): ONE}, regime, _trusted=True))
    return out


def _translate_pivots(n: int, p: int, klein: tuple, poles: Sequence[int]) -> set:
    """Leading keys of an echelon basis of T applied to the (n, p) ansatz."""
    el = Eliminator()
    for i, x in enumerate(_ansatz(n, p, klein, poles)):
        el.add(state_to_vector(translate(x)), i)
    return set(el.rows)


def _solve_decomposition(P: State, ops: Sequence[Callable[[State], State]], pole_bound: int,
                         klein: tuple, nullspace: bool, gauge_fix: bool) -> tuple[Solution, list[list[State]], list[State]]:
    n, p = P.bigrade()
    poles = range(pole_bound + 1)
    b_basis = _ansatz(n - 1, p, klein, poles)
    a_basis = _ansatz(n, p - 1, klein, range(pole_bound, -1, -1))
    if gauge_fix:
        # (A, B) ~ (A + T X, B - D X): any A can be reduced off the leading
        # keys of translates, so those monomials are dropped from the ansatz
        pivots = _translate_pivots(n - 1, p - 1, klein, poles)
        a_basis = [a for a in a_basis if _vkey(0, *next(iter(a.keys()))) not in pivots]
    clear_caches()
    clear_vertex_caches()

    def columns():
        # translates first: they are close to echelon form under the vector key order
        for b in b_basis:
            yield state_to_vector(translate(b))
        for op in ops:
            for a in a_basis:
                yield state_to_vector(op(a))

    sol = solve_columns(columns(), state_to_vector(P), nullspace=nullspace)
    return sol, [a_basis] * len(ops), b_basis


def decompose_state_product(P: State, ops: Sequence[Callable[[State], State]], *, pole_bound: int | None = None,
                            escalations: int = 2, nullspace: bool = False,
                            gauge_fix: bool = True) -> tuple[list[State], State, Solution, int]:
    """Write P = sum_i ops[i](A_i) + T B over a two-point monomial ansatz.

    The pole bound starts at the pole order of P plus one and grows at most
    ``escalations`` times.
    """
    klein = {klein_class(m) for (m, _, _) in P.keys()}
    if len(klein) > 1:
        raise ValueError("product mixes Klein classes")
    klein = klein.pop() if klein else (0, 0)
    K = P.max_pole() + 1 if pole_bound is None else pole_bound
    for attempt in range(escalations + 1):
        sol, a_bases, b_basis = _solve_decomposition(P, ops, K, klein, nullspace, gauge_fix)
        if sol.consistent:
            nb = len(b_basis)
            B = combine({i: c for i, c in sol.particular.items() if i < nb}, b_basis)
            As = []
            off = nb
            for basis in a_bases:
                As.append(combine({i - off: c for i, c in sol.particular.items() if off <= i < off + len(basis)}, basis))
                off += len(basis)
            return As, B, sol, K
        K += 1
    raise VerificationError(f"no decomposition with pole order up to {K - 1}")


def decompose_zero_product(m: int, n: int, *, pole_bound: int | None = None, escalations: int = 2,
                           nullspace: bool = False, gauge_fix: bool = True) -> Decomposition:
    t0 = time.perf_counter()
    weights = WEIGHTS[(m, n)]
    P = zero_product(m, n)
    op = lambda a: weighted_derivative(a, weights, (m, n))
    (A,), B, sol, K = decompose_state_product(P, [op], pole_bound=pole_bound, escalations=escalations,
                                              nullspace=nullspace, gauge_fix=gauge_fix)
    resid = P - op(A) - translate(B)
    dec = Decomposition(P, A, B, weights, (m, n), K, sol.rank,
                        len(sol.nullspace) if nullspace else None,
                        sol.columns, time.perf_counter() - t0, resid)
    if not dec.ok:
        raise VerificationError("solver returned a pair with nonzero residual")
    return dec


def skew_partner(dec: Decomposition, sign: int = 1) -> Decomposition:
    """Build the swapped decomposition from A'(z,w) = sign * A(w,z).

    Only B' is solved for (a preimage under T); failure raises.
    """
    t0 = time.perf_counter()
    m, n = dec.twists
    weights = WEIGHTS[(n, m)]
    P = zero_product(n, m)
    A = swap_points(dec.A).scale(sign)
    rest = P - weighted_derivative(A, weights, (n, m))
    klein = (0, 0)
    nb, pb = rest.bigrade() if rest else (1, 1)
    K = max(rest.max_pole(), 0) + 1 if rest else 0
    basis = _ansatz(nb - 1, pb, klein, range(K + 1))
    sol = solve_columns((state_to_vector(translate(b)) for b in basis), state_to_vector(rest), nullspace=False)
    if not sol.consistent:
        raise VerificationError("swapped A does not decompose the swapped product modulo translates")
    B = combine(sol.particular, basis)
    resid = rest - translate(B)
    return Decomposition(P, A, B, weights, (n, m), K, sol.rank, None, len(basis),
                         time.perf_counter() - t0, resid)


# ---------------------------------------------------------------- regularity

@dataclass
class RegularityReport:
    feasible: bool
    Z: State
    series: object
    obstruction: dict[int, State] = field(default_factory=dict)


def _negative_part(v: State, depth: int) -> tuple[State, ...]:
    """Coefficients of x^-1 .. x^-depth in the diagonal expansion."""
    zero = State.zero(v.regime)
    if not v or v.max_pole() <= 0:
        return (zero,) * depth
    ser = expand_at_diagonal(v, max(depth, v.max_pole()))
    return tuple(ser.coefficient(-i) for i in range(1, depth + 1))


def regular_modulo_translates(A: State, *, escalations: int = 2) -> tuple[State, RegularityReport]:
    """Find Z with A - T Z regular at z = w."""
    pole = A.max_pole() if A else 0
    if pole <= 0:
        zero = State.zero(A.regime)
        return zero, RegularityReport(True, zero, expand_at_diagonal(A, 0))
    n, p = A.bigrade()
    klein = {klein_class(m) for (m, _, _) in A.keys()}.pop()
    obstruction: dict[int, State] = {}
    hs = sorted({h for (_, _, h) in A.keys()})
    # z-only states first: T commutes with the diagonal expansion, so this
    # small ansatz usually suffices; the two-point ansatz is the fallback
    attempts = [(pole, (Z,))] + [(K, (Z, W)) for K in range(pole, pole + escalations + 1)]
    for K, points in attempts:
        basis = _ansatz(n - 1, p, klein, range(K + 1), A.regime, hs, points)
        target = state_to_vector(_negative_part(A, K))
        cols = (state_to_vector(_negative_part(translate(b), K)) for b in basis)
        sol = solve_columns(cols, target, nullspace=False)
        if sol.consistent:
            Zs = combine(sol.particular, basis)
            reg = A - translate(Zs)
            series = expand_at_diagonal(reg, max(reg.max_pole(), 0))
            if not series.is_regular():
                raise VerificationError("regularised state still has a pole at the diagonal")
            return Zs, RegularityReport(True, Zs, series)
        obstruction = {-(i + 1): sol.residual_state(block=i) for i in range(K)}
        obstruction = {k: v for k, v in obstruction.items() if v}
    zero = State.zero(A.regime)
    return zero, RegularityReport(False, zero, None, obstruction)
