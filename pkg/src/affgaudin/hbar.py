"""Next-to-leading order in hbar: rescaled currents, the densities
sigma~_{2n-1}, their singularity and their pairwise zero products."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

from gmpy2 import mpq

from .algebra import (
    W,
    Z,
    Regime,
    State,
    _acc,
    _apply_terms,
    current,
    diagonal_action,
    enumerate_monomials,
    filtration_degree,
    klein_class,
)
from .scalars import ConfigurationError, QExt, ZERO
from .spaces import Eliminator, combine, rank, solve_columns, state_to_vector
from .solvers import Decomposition, move_to, regular_modulo_translates
from .tensors import COLORS, f, sym_tensor_value
from .vertex import mode_action, translate, twisted_derivative

__all__ = [
    "HbarConfig",
    "hbar_regime",
    "rescale",
    "build_sigma_tilde",
    "correction_coefficient",
    "witness_coefficient",
    "zeta",
    "xi",
    "check_singular_mod_hbar3",
    "pairwise_closed_form",
    "check_pairwise",
    "check_proof_combinatorics",
    "uniqueness_dimension",
    "PairwiseReport",
    "pairwise_fit",
]


@dataclass(frozen=True)
class HbarConfig:
    cutoff: int = 3
    m: int = 1
    n: int = 1

    def __post_init__(self):
        if self.cutoff < 1:
            raise ConfigurationError("hbar cutoff must be >= 1")
        if self.m % 2 == 0 or self.n % 2 == 0 or self.m < 1 or self.n < 1:
            raise ConfigurationError("exponents must be odd and positive")

    @property
    def regime(self) -> Regime:
        return hbar_regime(self.cutoff)


def hbar_regime(cutoff: int | None = 3) -> Regime:
    return Regime(rescaled=True, cutoff=cutoff)


def rescale(v: State, grade: int | None = None, cutoff: int | None = 3) -> State:
    """Rewrite an exact state in rescaled currents, homogeneous of ``grade``.

    A term with F currents picks up hbar^(grade - F); this is hbar^grade * v,
    so exact and rescaled computations agree term by term.
    """
    if v.regime.rescaled:
        raise ConfigurationError("state is already rescaled")
    if grade is None:
        grade = v.filtration_degree()
    regime = hbar_regime(cutoff)
    out = {}
    for (m, u, h), c in v.items():
        e = grade - filtration_degree(m)
        if e < 0:
            raise ValueError(f"grade {grade} is below a term with {filtration_degree(m)} currents")
        if cutoff is None or e < cutoff:
            out[(m, u, e)] = c
    return State(out, regime, _trusted=True)


# ---------------------------------------------------------------- closed forms

def correction_coefficient(n: int) -> mpq:
    return mpq(n * (2 * n + 1) * (2 * n - 2), 2 * n - 1)


def witness_coefficient(n: int) -> mpq:
    return mpq(-4 * n, 2 * n - 1)


def zeta(m: int, n: int) -> mpq:
    return mpq(2 * (m + 1) * (n + 1), m * n)


def xi(m: int) -> mpq:
    return mpq((m + 2) * (m + 1) * (m - 1), 2 * m)


# ---------------------------------------------------------------- index sums

def _sym_with(extra, rank: int, idx: tuple) -> QExt:
    """Value at idx of the symmetrisation over all slots of extra(x) * t(rest),
    where x is the first slot and t the symmetric invariant tensor."""
    total = ZERO
    for p in range(len(idx)):
        e = extra(idx[p])
        if e:
            total = total + QExt.coerce(e) * QExt(sym_tensor_value(rank, idx[:p] + idx[p + 1:]))
    return total * QExt(mpq(1, len(idx)))


def _symmetric_word(coeff, length: int, point: int, regime: Regime, h: int = 0) -> State:
    """sum over all index tuples of coeff(idx) I^{idx_1}_{-1}...I^{idx_L}_{-1}|0>, normal ordered."""
    acc: dict = {}
    for idx in itertools.product(COLORS, repeat=length):
        c = coeff(idx)
        if not c:
            continue
        word = tuple(current(a, -1, 0, point) for a in idx)
        for k, q in _apply_terms(word, {((), 0, h): c}, regime).items():
            _acc(acc, k, q)
    return State(acc, regime, _trusted=True)


def top_term_state(rank: int, point: int = Z, regime: Regime | None = None, h: int = 0) -> State:
    regime = regime or hbar_regime()
    return _symmetric_word(lambda idx: QExt(sym_tensor_value(rank, idx)), rank, point, regime, h)


def dressed_top_term(a: int, length: int, point: int = Z, regime: Regime | None = None, h: int = 0) -> State:
    """t_{i_1..i_{L-1}} I^{(a}_{-1} I^{i_1}_{-1} ... I^{i_{L-1})}_{-1}|0>."""
    regime = regime or hbar_regime()
    return _symmetric_word(lambda idx: _sym_with(lambda x: 1 if x == a else 0, length - 1, idx),
                           length, point, regime, h)


# ---------------------------------------------------------------- densities

@lru_cache(maxsize=None)
def build_sigma_tilde(n: int, cutoff: int = 3) -> State:
    """sigma~_{2n-1}: the symmetric top term plus its order-hbar correction."""
    if n < 1:
        raise ValueError("n must be >= 1")
    regime = hbar_regime(cutoff)
    out = top_term_state(2 * n, Z, regime)
    c = correction_coefficient(n)
    if c and cutoff > 1:
        L = 2 * n - 3
        acc: dict = {}
        for a, b in itertools.product(COLORS, repeat=2):
            for ys in itertools.product(COLORS, repeat=L):
                val = _sym_with(lambda x: f(a, b, x), 2 * n - 4, ys)
                if not val:
                    continue
                word = (current(a, -2), current(b, -1, 1)) + tuple(current(y, -1) for y in ys)
                for k, q in _apply_terms(word, {((), 0, 1): val * QExt(c)}, regime).items():
                    _acc(acc, k, q)
        out = out + State(acc, regime, _trusted=True)
    return out


def witness(n: int, r: int, cutoff: int = 3) -> State:
    """G^r = -4n/(2n-1) hbar^2 t I^{(r} I ... I^{)}|0>."""
    regime = hbar_regime(cutoff)
    if cutoff <= 2:
        return State.zero(regime)
    return dressed_top_term(r, 2 * n - 1, Z, regime, h=2).scale(QExt(witness_coefficient(n)))


@dataclass
class SingularReport:
    n: int
    invariant: bool
    residual: dict[int, State]
    G: dict[int, State]
    wall_time: float

    @property
    def ok(self) -> bool:
        return self.invariant and not any(self.residual.values())


def check_singular_mod_hbar3(n: int, cutoff: int = 3) -> SingularReport:
    t0 = time.perf_counter()
    s = build_sigma_tilde(n, cutoff)
    invariant = all(not diagonal_action(r, 0, s) for r in COLORS)
    G = {r: witness(n, r, cutoff) for r in COLORS}
    resid = {r: diagonal_action(r, 1, s) - twisted_derivative(2 * n - 1, Z, G[r]) for r in COLORS}
    return SingularReport(n, invariant, resid, G, time.perf_counter() - t0)


# ---------------------------------------------------------------- pairwise

def _product(zs: State, ws: State) -> State:
    """The word of each z-term applied to the w-state."""
    acc: dict = {}
    for (m, u, h), c in zs.items():
        for k, q in _apply_terms(m, {(mm, uu + u, hh + h): cc * c for (mm, uu, hh), cc in ws.items()},
                                 zs.regime).items():
            _acc(acc, k, q)
    return State(acc, zs.regime, _trusted=True)


def pairwise_closed_form(m: int, n: int, cutoff: int = 3) -> tuple[State, State]:
    """The closed-form (A_{m,n}, B_{m,n}) at order hbar^2."""
    regime = hbar_regime(cutoff)
    A = State.zero(regime)
    B = State.zero(regime)
    if cutoff <= 2:
        return A, B
    z = zeta(m, n)
    for a in COLORS:
        zpart = dressed_top_term(a, m, Z, regime)
        wpart = dressed_top_term(a, n, W, regime)
        A = A + _product(translate(zpart), wpart)
        B = B + _product(zpart, wpart)
    A = A.scale(QExt(z), u=-1, h=2)
    B = B.scale(QExt(z), u=-2, h=2)
    return A, B


@dataclass
class PairwiseReport:
    m: int
    n: int
    hbar_cutoff: int
    term_count_peak: int
    residual: State
    regular: bool | None
    wall_time: float
    decomposition: Decomposition | None = None
    low_order: State = field(default_factory=State.zero)

    @property
    def residual_zero(self) -> bool:
        return not self.residual

    @property
    def ok(self) -> bool:
        return self.residual_zero and self.regular is not False

    def record(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "hbar_cutoff": self.hbar_cutoff,
            "term_count_peak": self.term_count_peak,
            "residual_zero": self.residual_zero,
            "regular": self.regular,
            "wall_time": round(self.wall_time, 3),
        }


def check_pairwise(m: int, n: int, cutoff: int = 3, regularity: bool = True) -> PairwiseReport:
    """sigma~_m(z)_(0) sigma~_n(w) against (n D^{(m)}_z - m D^{(n)}_w) A + T B mod hbar^cutoff."""
    HbarConfig(cutoff, m, n)
    t0 = time.perf_counter()
    sm = build_sigma_tilde((m + 1) // 2, cutoff)
    sn = move_to(build_sigma_tilde((n + 1) // 2, cutoff), W)
    P = mode_action(sm, 0, sn)
    A, B = pairwise_closed_form(m, n, cutoff)
    LA = twisted_derivative(m, Z, A).scale(n) - twisted_derivative(n, W, A).scale(m)
    TB = translate(B)
    resid = P - LA - TB
    peak = max(len(sm), len(sn), len(P), len(LA), len(TB))
    regular = None
    if regularity and A:
        _, rep = regular_modulo_translates(A)
        regular = rep.feasible
    dec = Decomposition(P, A, B, (n, -m), (m, n), residual=resid)
    return PairwiseReport(m, n, cutoff, peak, resid, regular, time.perf_counter() - t0, dec)


def pairwise_fit(m: int, n: int, cutoff: int = 3) -> tuple[QExt, QExt] | None:
    """Best (alpha, beta) with product = alpha L(A') + beta T(B'), where A', B'
    are the closed forms without zeta; None when no such pair exists."""
    regime = hbar_regime(cutoff)
    P = mode_action(build_sigma_tilde((m + 1) // 2, cutoff), 0, move_to(build_sigma_tilde((n + 1) // 2, cutoff), W))
    A = State.zero(regime)
    B = State.zero(regime)
    for a in COLORS:
        zpart = dressed_top_term(a, m, Z, regime)
        wpart = dressed_top_term(a, n, W, regime)
        A = A + _product(translate(zpart), wpart)
        B = B + _product(zpart, wpart)
    A = A.scale(1, u=-1, h=2)
    B = B.scale(1, u=-2, h=2)
    LA = twisted_derivative(m, Z, A).scale(n) - twisted_derivative(n, W, A).scale(m)
    sol = solve_columns([state_to_vector(LA), state_to_vector(translate(B))], state_to_vector(P), nullspace=False)
    if not sol.consistent:
        return None
    return sol.particular.get(0, ZERO), sol.particular.get(1, ZERO)


# ---------------------------------------------------------------- proof combinatorics

def combinatorial_prefactors(m: int) -> tuple[mpq, mpq, mpq]:
    return (mpq(factorial(m + 1), factorial(m - 1)), mpq(factorial(m + 1), factorial(m)),
            mpq(factorial(m + 1) * (m - 1), 2 * factorial(m - 1)))


def _mode_word_sum(m: int, regime: Regime) -> list[tuple[QExt, tuple]]:
    """The three mode patterns of the zero mode of the top term, as operator words."""
    c1, c2, c3 = combinatorial_prefactors(m)
    words: list[tuple[QExt, tuple]] = []
    for idx in itertools.product(COLORS, repeat=m + 1):
        t = sym_tensor_value(m + 1, idx)
        if not t:
            continue
        t = QExt(t)
        i = idx
        words.append((t * QExt(c1), (current(i[0], -2),) + tuple(current(a, -1) for a in i[1:m]) + (current(i[m], 1),)))
        words.append((t * QExt(c2), tuple(current(a, -1) for a in i[:m]) + (current(i[m], 0),)))
        if m >= 2:
            words.append((t * QExt(c3), (current(i[0], -2),) + tuple(current(a, -1) for a in i[1:m - 1])
                          + (current(i[m - 1], 0), current(i[m], 0))))
    return words


@dataclass
class CombinatoricsReport:
    m: int
    prefactors: tuple[mpq, mpq, mpq]
    residuals: list[State]
    xi: mpq

    @property
    def ok(self) -> bool:
        return not any(self.residuals)


def default_test_states(regime: Regime) -> list[State]:
    """Words in depth-one currents at both points, plus sigma~_1(w) and sigma~_3(w).

    Deeper test states would pick up the dropped (-3, +2) mode pattern at hbar^2.
    """
    out = []
    for pt in (Z, W):
        for colors in ((1, 1), (1, 2), (1, 2, 3), (2, 2, 3, 3)):
            word = tuple(current(a, -1, 0, pt) for a in colors)
            out.append(State(_apply_terms(word, {((), 0, 0): QExt(1)}, regime), regime, _trusted=True))
    if regime.cutoff is not None:
        for k in (1, 2):
            out.append(move_to(build_sigma_tilde(k, regime.cutoff), W))
    return out


def check_proof_combinatorics(m: int, cutoff: int = 3, test_states=None) -> CombinatoricsReport:
    """Compare the zero mode of the top term with its three displayed mode
    patterns on test states, modulo hbar^cutoff."""
    if m % 2 == 0 or m < 1:
        raise ValueError("m must be odd and positive")
    regime = hbar_regime(cutoff)
    tt = top_term_state(m + 1, Z, regime)
    words = _mode_word_sum(m, regime)
    states = test_states if test_states is not None else default_test_states(regime)
    residuals = []
    for X in states:
        lhs = mode_action(tt, 0, X)
        acc: dict = {}
        for c, word in words:
            for k, q in _apply_terms(word, {key: c * v for key, v in X.items()}, regime).items():
                _acc(acc, k, q)
        residuals.append(lhs - State(acc, regime, _trusted=True))
    return CombinatoricsReport(m, combinatorial_prefactors(m), residuals, xi(m))


# ---------------------------------------------------------------- uniqueness

def uniqueness_dimension(n: int, cutoff: int = 3) -> dict:
    """Solve invariance and the mod-hbar^3 singularity condition over the
    general grade-2n ansatz.

    Unknowns: all monomials with 2n currents at hbar^0, with 2n-1 currents at
    hbar^1, and witnesses G^r at hbar^2. Returns the dimension of the solution
    space projected to the hbar^0 and hbar^1 parts, and the solutions.
    """
    regime = hbar_regime(cutoff)
    d = 2 * n
    monos = [mo for mo in enumerate_monomials(d, d) if klein_class(mo) == (0, 0)]
    unknowns = [State({(mo, 0, 0): QExt(1)}, regime, _trusted=True) for mo in monos if filtration_degree(mo) == d]
    n0 = len(unknowns)
    unknowns += [State({(mo, 0, 1): QExt(1)}, regime, _trusted=True) for mo in monos if filtration_degree(mo) == d - 1]
    nu = len(unknowns)
    zero = State.zero(regime)
    cols = []
    for v in unknowns:
        blocks = [diagonal_action(r, 0, v) for r in COLORS] + [diagonal_action(r, 1, v) for r in COLORS]
        cols.append(state_to_vector(tuple(blocks)))
    for r in COLORS:
        kc = klein_class((current(r, -1),))
        for mo in enumerate_monomials(d - 1, d - 1):
            if klein_class(mo) != kc:
                continue
            g = State({(mo, 0, 2): QExt(1)}, regime, _trusted=True)
            blocks = [zero] * 6
            blocks[3 + r - 1] = -twisted_derivative(d - 1, Z, g)
            cols.append(state_to_vector(tuple(blocks)))
    sol = solve_columns(cols)
    proj = [{i: c for i, c in k.items() if i < nu} for k in sol.nullspace]
    sols = [combine(p, unknowns, regime) for p in proj if p]
    el = Eliminator()
    basis = []
    for s_ in sols:
        if el.add(state_to_vector(s_), len(basis)) is None:
            basis.append(s_)
    top = [b.hbar_part(0) for b in basis]
    return {
        "n": n,
        "unknowns": nu,
        "top_unknowns": n0,
        "solution_dimension": len(basis),
        "top_dimension": rank(top),
        "solutions": basis,
    }
