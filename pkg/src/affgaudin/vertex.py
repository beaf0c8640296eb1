"""Vertex-algebra structure on the vacuum module: translation, n-th products,
twisted derivatives and the Taylor expansion at z = w."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from gmpy2 import mpq

from .algebra import (
    CENTRAL,
    Z,
    Generator,
    Regime,
    State,
    _acc,
    _apply,
    _apply_terms,
    monomial_depth,
)
from .scalars import ConfigurationError, QExt

__all__ = [
    "translate",
    "mode_action",
    "twisted_derivative",
    "expand_at_diagonal",
    "LaurentStateSeries",
    "SkewReport",
    "skew_symmetry_check",
    "TruncationError",
    "clear_vertex_caches",
]


class TruncationError(ValueError):
    """The requested expansion order does not reach the pole of the state."""


def _state(terms: dict, regime: Regime) -> State:
    return State(terms, regime, _trusted=True)


# ---------------------------------------------------------------- translate

_T_CACHE: dict = {}


def _translate_mono(mono: tuple, regime: Regime) -> dict:
    ck = (mono, regime)
    hit = _T_CACHE.get(ck)
    if hit is not None:
        return hit
    out: dict = {}
    for i, g in enumerate(mono):
        if g.kind == CENTRAL:
            break
        # [T, I_n] = -n I_{n-1}
        new = g._replace(mode=g.mode - 1)
        part = _apply_terms(mono[:i] + (new,), {(mono[i + 1:], 0, 0): QExt(-g.mode)}, regime)
        for k, c in part.items():
            _acc(out, k, c)
    _T_CACHE[ck] = out
    return out


def translate(v: State, times: int = 1) -> State:
    """T^times v; T kills centrals, the vacuum and (z - w)-scalars."""
    for _ in range(times):
        v = v.map_monomials(lambda m, r=v.regime: _state(_translate_mono(m, r), r))
    return v


# ---------------------------------------------------------------- n-th products

_MODE_CACHE: dict = {}


def clear_vertex_caches() -> None:
    _MODE_CACHE.clear()
    _T_CACHE.clear()


def _ff(k: int, j: int) -> int:
    out = 1
    for t in range(j):
        out *= k - t
    return out


def _alpha(g: Generator, i: int) -> tuple[QExt, Generator] | None:
    """i-th mode of the field of I^{a[p]}_{-j-1}|0> = (1/j!) T^j I^{a[p]}_{-1}|0>."""
    j = -g.mode - 1
    c = _ff(i, j)
    if not c:
        return None
    if j % 2:
        c = -c
    return QExt(mpq(c, factorial(j))), g._replace(mode=i - j)


def _mode_mono(mA: tuple, n: int, mB: tuple, regime: Regime, budget: int | None) -> dict:
    ck = (mA, n, mB, regime, budget)
    hit = _MODE_CACHE.get(ck)
    if hit is not None:
        return hit
    if not mA or mA[0].kind == CENTRAL:
        # vacuum and central states: only the (-1) mode survives
        res = _apply_terms(mA, {(mB, 0, 0): QExt(1)}, regime) if n == -1 else {}
        _MODE_CACHE[ck] = res
        return res
    g, C = mA[0], mA[1:]
    dC, dB = monomial_depth(C), monomial_depth(mB)
    res: dict = {}
    # sum over negative modes: alpha_(i) (C_(n-i-1) B)
    for i in range(n - dC - dB, 0):
        al = _alpha(g, i)
        if al is None:
            continue
        c0, gen = al
        inner = _mode_mono(C, n - i - 1, mB, regime, budget)
        for (m1, u1, h1), c1 in inner.items():
            sub = None if budget is None else budget - h1
            for (m2, u2, h2), c2 in _apply(gen, m1, regime.rescaled, sub).items():
                _acc(res, (m2, u1 + u2, h1 + h2), c0 * c1 * c2)
    # sum over nonnegative modes: C_(n-i-1) (alpha_(i) B)
    j = -g.mode - 1
    for i in range(j, j + dB + 1):
        al = _alpha(g, i)
        if al is None:
            continue
        c0, gen = al
        for (m1, u1, h1), c1 in _apply(gen, mB, regime.rescaled, budget).items():
            sub = None if budget is None else budget - h1
            for (m2, u2, h2), c2 in _mode_mono(C, n - i - 1, m1, regime, sub).items():
                _acc(res, (m2, u1 + u2, h1 + h2), c0 * c1 * c2)
    _MODE_CACHE[ck] = res
    return res


def mode_action(A: State, n: int, B: State) -> State:
    """The n-th product A_(n) B."""
    if A.regime != B.regime:
        raise ConfigurationError(f"regimes differ: {A.regime} vs {B.regime}")
    regime = A.regime
    K = regime.cutoff
    out: dict = {}
    for (mA, uA, hA), cA in A.items():
        for (mB, uB, hB), cB in B.items():
            h0 = hA + hB
            if K is not None and h0 >= K:
                continue
            budget = None if K is None else K - 1 - h0
            c0 = cA * cB
            for (m, u, h), c in _mode_mono(mA, n, mB, regime, budget).items():
                _acc(out, (m, u + uA + uB, h + h0), c0 * c)
    return _state(out, regime)


# ---------------------------------------------------------------- derivatives

def derivative(point: int, v: State) -> State:
    """Plain spectral derivative at the given point."""
    return _state(_derivative_terms(v, point), v.regime)


def _derivative_terms(v: State, point: int) -> dict:
    out: dict = {}
    K = v.regime.cutoff
    for (m, u, h), c in v.items():
        if u:
            _acc(out, (m, u - 1, h), c * (u if point == Z else -u))
        for i, g in enumerate(m):
            if g.point != point:
                continue
            word = m[:i] + (g._replace(deriv=g.deriv + 1),) + m[i + 1:]
            for (m2, u2, h2), c2 in _apply_terms(word, {((), 0, 0): QExt(1)}, v.regime).items():
                if K is not None and h + h2 >= K:
                    continue
                _acc(out, (m2, u + u2, h + h2), c * c2)
    return out


def twisted_derivative(j, point: int, v: State) -> State:
    """D^{(j)}_X v = d_X v - (j/2) k^{[0]}(X) v."""
    d = _state(_derivative_terms(v, point), v.regime)
    j = mpq(j) if not isinstance(j, QExt) else j
    if not j:
        return d
    kv = _state(_apply_terms((Generator(CENTRAL, 0, 0, 0, point),), dict(v.items()), v.regime), v.regime)
    return d - kv.scale(QExt(j) * QExt(mpq(1, 2)))


# ---------------------------------------------------------------- expansion

@dataclass
class LaurentStateSeries:
    """Truncated Laurent series in x = w - z with coefficients over point z."""

    coefficients: dict[int, State] = field(default_factory=dict)
    truncation_order: int = 0

    def lowest_power(self) -> int | None:
        nz = [k for k, v in self.coefficients.items() if v]
        return min(nz) if nz else None

    def coefficient(self, power: int) -> State:
        if power > self.truncation_order:
            raise TruncationError(f"power {power} beyond truncation order {self.truncation_order}")
        st = self.coefficients.get(power)
        if st is None:
            regime = next(iter(self.coefficients.values())).regime if self.coefficients else Regime()
            return State.zero(regime)
        return st

    def is_regular(self) -> bool:
        lp = self.lowest_power()
        return lp is None or lp >= 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentStateSeries):
            return NotImplemented
        if self.truncation_order != other.truncation_order:
            return False
        keys = {k for k, v in self.coefficients.items() if v} | {k for k, v in other.coefficients.items() if v}
        return all(self.coefficient(k) == other.coefficient(k) for k in keys)

    def items(self):
        return sorted((k, v) for k, v in self.coefficients.items() if v)


def expand_at_diagonal(v: State, order: int) -> LaurentStateSeries:
    """Replace every w-generator by its Taylor series around z up to x^order.

    u = z - w is rewritten as -x; coefficients are normal ordered over z.
    """
    pole = v.max_pole()
    if order < pole:
        raise TruncationError(f"expansion order {order} is below the pole order {pole}")
    regime = v.regime
    acc: dict[int, dict] = {}
    for (mono, u, h), c in v.items():
        sign = -1 if u % 2 else 1
        # choose Taylor orders r_i for each w-generator
        words: list[tuple[int, mpq, list[Generator]]] = [(u, mpq(sign), [])]
        for g in mono:
            nxt = []
            for power, coef, word in words:
                if g.point == Z:
                    nxt.append((power, coef, word + [g]))
                    continue
                for r in range(0, order - power + 1):
                    nxt.append((power + r, coef / factorial(r), word + [g._replace(point=Z, deriv=g.deriv + r)]))
            words = nxt
        for power, coef, word in words:
            if power > order:
                continue
            part = _apply_terms(tuple(word), {((), 0, h): c * coef}, regime)
            bucket = acc.setdefault(power, {})
            for k, q in part.items():
                _acc(bucket, k, q)
    return LaurentStateSeries({p: _state(t, regime) for p, t in sorted(acc.items())}, order)


# ---------------------------------------------------------------- skew symmetry

@dataclass
class SkewReport:
    lhs: State
    rhs: State
    max_k: int

    @property
    def ok(self) -> bool:
        return (self.lhs - self.rhs) == 0


def skew_symmetry_check(A: State, B: State, depth: int | None = None) -> SkewReport:
    """Compare A_(0)B with -sum_k (-1)^k/k! T^k (B_(k)A)."""
    lhs = mode_action(A, 0, B)
    if depth is None:
        depth = max((monomial_depth(m) for m in (k[0] for k in A.keys())), default=0)
        depth += max((monomial_depth(m) for m in (k[0] for k in B.keys())), default=0)
    rhs = State.zero(A.regime)
    for k in range(0, depth + 1):
        term = mode_action(B, k, A)
        if not term:
            continue
        term = translate(term, k)
        coef = QExt(mpq(-1 if k % 2 == 0 else 1, factorial(k)))
        rhs = rhs + term.scale(coef)
    return SkewReport(lhs, rhs, depth)
