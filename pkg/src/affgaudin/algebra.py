"""Loop-type Lie algebra of meromorphic currents at one or two points, its
vacuum module and normal ordering.

Generators are ``I^{a[p]}_n(X)`` (color a, mode n, p-th derivative in the
spectral parameter, point X in {z, w}) and central ``k^{[p]}(X)``.
States are finite sums of canonical monomials acting on the vacuum; each
coefficient is an element of Q(s) times ``u**i * hbar**j`` with u = z - w.

In the *rescaled* regime every current stands for hbar*I, so a structure
term of a bracket carries one power of hbar and a central term two.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from gmpy2 import mpq

from .scalars import ConfigurationError, ONE, QExt, Scalar, ZERO
from .tensors import COLORS, ColorIndex, structure_constant

__all__ = [
    "Z",
    "W",
    "CURRENT",
    "CENTRAL",
    "Generator",
    "current",
    "central",
    "Regime",
    "EXACT",
    "State",
    "bracket",
    "normal_order",
    "apply_word",
    "enumerate_monomials",
    "diagonal_action",
    "monomial_bigrade",
    "monomial_depth",
    "klein_class",
    "clear_caches",
]

Z, W = 0, 1
POINT_NAMES = ("z", "w")
CURRENT, CENTRAL = 0, 1


class Generator(NamedTuple):
    kind: int
    color: int
    mode: int
    deriv: int
    point: int

    def __str__(self) -> str:
        pt = POINT_NAMES[self.point]
        if self.kind == CENTRAL:
            return f"k[p={self.deriv},pt={pt}]"
        return f"I[a={self.color},p={self.deriv},n={self.mode},pt={pt}]"


def current(a: int, n: int, p: int = 0, point: int = Z) -> Generator:
    ColorIndex(a)
    if p < 0:
        raise ValueError("derivative order must be >= 0")
    if point not in (Z, W):
        raise ValueError("point must be Z or W")
    return Generator(CURRENT, a, n, p, point)


def central(p: int = 0, point: int = Z) -> Generator:
    if p < 0:
        raise ValueError("derivative order must be >= 0")
    if point not in (Z, W):
        raise ValueError("point must be Z or W")
    return Generator(CENTRAL, 0, 0, p, point)


_KEYS: dict[Generator, tuple] = {}


def sort_key(g: Generator) -> tuple:
    """Canonical order: currents by mode ascending, derivative descending,
    point (z before w), color; centrals last, by point then derivative."""
    k = _KEYS.get(g)
    if k is None:
        if g.kind == CURRENT:
            k = (0, g.mode, -g.deriv, g.point, g.color)
        else:
            k = (1, g.point, g.deriv, 0, 0)
        _KEYS[g] = k
    return k


def monomial_key(mono: tuple[Generator, ...]) -> tuple:
    return tuple(sort_key(g) for g in mono)


def is_canonical(mono: Sequence[Generator]) -> bool:
    keys = [sort_key(g) for g in mono]
    if any(g.kind == CURRENT and g.mode >= 0 for g in mono):
        return False
    return all(keys[i] <= keys[i + 1] for i in range(len(keys) - 1))


def monomial_depth(mono: Iterable[Generator]) -> int:
    return -sum(g.mode for g in mono)


def monomial_bigrade(mono: Iterable[Generator], u: int = 0) -> tuple[int, int]:
    """(depth, weight); u**i contributes -i to the weight."""
    n = 0
    p = -u
    for g in mono:
        n -= g.mode
        p += g.deriv + 1
    return n, p


def filtration_degree(mono: Iterable[Generator]) -> int:
    return sum(1 for g in mono if g.kind == CURRENT)


def klein_class(mono: Iterable[Generator]) -> tuple[int, int]:
    """Eigenvalues (as parities) under the rotations by pi about axes 1 and 2.

    Color counts c1, c2, c3 give the pair ((c2+c3) % 2, (c1+c3) % 2); invariant
    states only involve class (0, 0).
    """
    c = [0, 0, 0, 0]
    for g in mono:
        c[g.color] += 1
    return (c[2] + c[3]) % 2, (c[1] + c[3]) % 2


@dataclass(frozen=True)
class Regime:
    """Bracket normalisation and hbar truncation shared by a family of states.

    ``rescaled`` switches to hbar-rescaled currents; ``cutoff`` K drops all
    terms with hbar power >= K.
    """

    rescaled: bool = False
    cutoff: int | None = None

    def __post_init__(self):
        if self.cutoff is not None and self.cutoff < 1:
            raise ConfigurationError("hbar cutoff must be >= 1")
        if self.cutoff is not None and not self.rescaled:
            raise ConfigurationError("an hbar cutoff needs the rescaled regime")

    @property
    def budget(self) -> int | None:
        return None if self.cutoff is None else self.cutoff - 1


EXACT = Regime()

Key = tuple  # (monomial, u power, hbar power)


def _acc(out: dict, key, q: QExt) -> None:
    v = out.get(key)
    if v is None:
        out[key] = q
    else:
        v = v + q
        if v:
            out[key] = v
        else:
            del out[key]


# ---------------------------------------------------------------- brackets

@lru_cache(maxsize=None)
def _cross_expansion(p: int, q: int) -> tuple[tuple[mpq, int, int, int], ...]:
    """Expand d_z^p d_w^q [(C(w) - C(z)) / (z - w)] as sum coef*u^e*C^{[j]}(X).

    Returns tuples (coef, e, X, j).
    """
    terms: dict[tuple[int, int, int], mpq] = {(-1, W, 0): mpq(1), (-1, Z, 0): mpq(-1)}

    def d(terms, wrt):
        out: dict[tuple[int, int, int], mpq] = {}
        sgn = 1 if wrt == Z else -1
        for (e, pt, j), c in terms.items():
            if e:
                k = (e - 1, pt, j)
                out[k] = out.get(k, 0) + sgn * e * c
            if pt == wrt:
                k = (e, pt, j + 1)
                out[k] = out.get(k, 0) + c
        return {k: v for k, v in out.items() if v}

    for _ in range(q):
        terms = d(terms, W)
    for _ in range(p):
        terms = d(terms, Z)
    return tuple((c, e, pt, j) for (e, pt, j), c in sorted(terms.items()))


@lru_cache(maxsize=None)
def _bracket(g1: Generator, g2: Generator, rescaled: bool) -> tuple[tuple[QExt, int, int, Generator], ...]:
    """[g1, g2] as a tuple of (coef, u power, hbar power, generator)."""
    if g1.kind == CENTRAL or g2.kind == CENTRAL:
        return ()
    if g1.point == W and g2.point == Z:
        return tuple((-c, du, dh, g) for c, du, dh, g in _bracket(g2, g1, rescaled))
    a, b, m, n, p, q = g1.color, g2.color, g1.mode, g2.mode, g1.deriv, g2.deriv
    fc = structure_constant(a, b)
    has_central = a == b and m + n == 0 and n != 0
    hf, hk = (1, 2) if rescaled else (0, 0)
    out: list[tuple[QExt, int, int, Generator]] = []
    if g1.point == g2.point:
        w = mpq(factorial(p) * factorial(q), factorial(p + q + 1))
        pt = g1.point
        if fc is not None:
            c, fv = fc
            out.append((fv * (-w), 0, hf, Generator(CURRENT, c, m + n, p + q + 1, pt)))
        if has_central:
            out.append((QExt(w * n), 0, hk, Generator(CENTRAL, 0, 0, p + q + 1, pt)))
        return tuple(out)
    for coef, e, pt, j in _cross_expansion(p, q):
        if fc is not None:
            c, fv = fc
            out.append((fv * coef, e, hf, Generator(CURRENT, c, m + n, j, pt)))
        if has_central:
            out.append((QExt(-n * coef), e, hk, Generator(CENTRAL, 0, 0, j, pt)))
    return tuple(out)


def bracket(g1: Generator, g2: Generator, regime: Regime = EXACT) -> "State":
    """The Lie bracket [g1, g2] returned as a State whose monomials are single
    generators (an element of the algebra, not of the module)."""
    terms: dict = {}
    for c, du, dh, g in _bracket(g1, g2, regime.rescaled):
        if regime.cutoff is not None and dh >= regime.cutoff:
            continue
        _acc(terms, ((g,), du, dh), c)
    return State(terms, regime, _trusted=True)


# ---------------------------------------------------------- normal ordering

_APPLY: dict = {}


def clear_caches() -> None:
    _APPLY.clear()
    _bracket.cache_clear()


def _insert_central(mono: tuple, g: Generator) -> tuple:
    kg = sort_key(g)
    i = len(mono)
    while i > 0 and mono[i - 1].kind == CENTRAL and sort_key(mono[i - 1]) > kg:
        i -= 1
    return mono[:i] + (g,) + mono[i:]


def _apply(g: Generator, mono: tuple, rescaled: bool, budget: int | None) -> dict:
    """g * mono|0> in canonical form; terms with hbar power > budget are dropped."""
    ck = (g, mono, rescaled, budget)
    hit = _APPLY.get(ck)
    if hit is not None:
        return hit
    if g.kind == CENTRAL:
        res = {(_insert_central(mono, g), 0, 0): ONE}
    elif not mono or mono[0].kind == CENTRAL:
        res = {} if g.mode >= 0 else {((g,) + mono, 0, 0): ONE}
    elif g.mode < 0 and sort_key(g) <= sort_key(mono[0]):
        res = {((g,) + mono, 0, 0): ONE}
    else:
        m0 = mono[0]
        rest = mono[1:]
        res = {}
        # swap: m0 (g rest)
        for (m1, u1, h1), c1 in _apply(g, rest, rescaled, budget).items():
            sub = None if budget is None else budget - h1
            for (m2, u2, h2), c2 in _apply(m0, m1, rescaled, sub).items():
                _acc(res, (m2, u1 + u2, h1 + h2), c1 * c2)
        # commutator: [g, m0] rest
        for c, du, dh, gen in _bracket(g, m0, rescaled):
            if budget is not None and dh > budget:
                continue
            sub = None if budget is None else budget - dh
            for (m1, u1, h1), c1 in _apply(gen, rest, rescaled, sub).items():
                _acc(res, (m1, u1 + du, h1 + dh), c * c1)
    _APPLY[ck] = res
    return res


def _apply_terms(word: Sequence[Generator], terms: Mapping, regime: Regime) -> dict:
    """Act with the operator word (leftmost acts last) on a term dict."""
    budget = regime.budget
    cur = dict(terms)
    for g in reversed(word):
        nxt: dict = {}
        for (m, u, h), c in cur.items():
            sub = None if budget is None else budget - h
            for (m2, u2, h2), c2 in _apply(g, m, regime.rescaled, sub).items():
                _acc(nxt, (m2, u + u2, h + h2), c * c2)
        cur = nxt
        if not cur:
            break
    return cur


# ------------------------------------------------------------------ states

def _coerce_coeff(x) -> QExt:
    return QExt.coerce(x)


class State:
    """A finite linear combination of canonical monomials on the vacuum.

    ``terms`` maps (monomial, u power, hbar power) to a nonzero Q(s) coefficient.
    Use :func:`normal_order` or the parser to build states from arbitrary words.
    """

    __slots__ = ("_terms", "regime")

    def __init__(self, terms: Mapping | None = None, regime: Regime = EXACT, *, _trusted: bool = False):
        self.regime = regime
        if _trusted:
            self._terms = dict(terms or {})
            return
        clean: dict = {}
        K = regime.cutoff
        for (mono, u, h), c in (terms or {}).items():
            mono = tuple(mono)
            if not is_canonical(mono):
                raise ValueError(f"non-canonical monomial {mono}; use normal_order")
            if K is not None and h >= K:
                continue
            if h and not regime.rescaled:
                raise ConfigurationError("hbar powers need the rescaled regime")
            c = _coerce_coeff(c)
            if c:
                _acc(clean, (mono, int(u), int(h)), c)
        self._terms = clean

    # construction helpers
    @classmethod
    def vacuum(cls, regime: Regime = EXACT) -> "State":
        return cls({((), 0, 0): ONE}, regime, _trusted=True)

    @classmethod
    def zero(cls, regime: Regime = EXACT) -> "State":
        return cls({}, regime, _trusted=True)

    @classmethod
    def from_monomial(cls, mono: Sequence[Generator], coeff=1, u: int = 0, h: int = 0,
                      regime: Regime = EXACT) -> "State":
        return cls({(tuple(mono), u, h): coeff}, regime)

    # views
    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coefficient(self, mono: Sequence[Generator], u: int = 0, h: int = 0) -> QExt:
        return self._terms.get((tuple(mono), u, h), ZERO)

    @property
    def terms(self) -> dict[tuple[Generator, ...], Scalar]:
        out: dict[tuple, dict] = {}
        for (m, u, h), c in self._terms.items():
            out.setdefault(m, {})[(u, h)] = c
        return {m: Scalar(t, self.regime.cutoff) for m, t in out.items()}

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator:
        return iter(self._terms.items())

    def _check(self, other: "State") -> None:
        if self.regime != other.regime:
            raise ConfigurationError(f"regimes differ: {self.regime} vs {other.regime}")

    def __add__(self, other: "State") -> "State":
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            _acc(out, k, c)
        return State(out, self.regime, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "State":
        return State({k: -c for k, c in self._terms.items()}, self.regime, _trusted=True)

    def __sub__(self, other: "State") -> "State":
        return self + (-other)

    def scale(self, c, u: int = 0, h: int = 0) -> "State":
        """Multiply by c * u**u * hbar**h."""
        c = _coerce_coeff(c)
        if not c:
            return State.zero(self.regime)
        K = self.regime.cutoff
        if h and not self.regime.rescaled:
            raise ConfigurationError("hbar powers need the rescaled regime")
        out = {}
        for (m, uu, hh), q in self._terms.items():
            if K is not None and hh + h >= K:
                continue
            out[(m, uu + u, hh + h)] = q * c
        return State(out, self.regime, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if other.cutoff != self.regime.cutoff:
                raise ConfigurationError("scalar cutoff differs from the state's regime")
            acc = State.zero(self.regime)
            for (u, h), q in other.terms.items():
                acc = acc + self.scale(q, u, h)
            return acc
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, State):
            return NotImplemented
        return self.regime == other.regime and self._terms == other._terms

    def __hash__(self):
        return hash((frozenset(self._terms.items()), self.regime))

    # gradings
    def bigrades(self) -> set[tuple[int, int]]:
        return {monomial_bigrade(m, u) for (m, u, h) in self._terms}

    def bigrade(self) -> tuple[int, int]:
        g = self.bigrades()
        if len(g) != 1:
            raise ValueError(f"state is not homogeneous: bigrades {sorted(g)}")
        return next(iter(g))

    def depth(self) -> int:
        ds = {monomial_depth(m) for (m, u, h) in self._terms}
        if len(ds) != 1:
            raise ValueError(f"state has mixed depths {sorted(ds)}")
        return ds.pop()

    def filtration_degree(self) -> int:
        return max((filtration_degree(m) for (m, u, h) in self._terms), default=0)

    def hbar_grades(self) -> set[int]:
        """Number of currents plus hbar power, per term."""
        return {filtration_degree(m) + h for (m, u, h) in self._terms}

    def max_pole(self) -> int:
        return max((-u for (m, u, h) in self._terms), default=0)

    def points(self) -> set[int]:
        return {g.point for (m, u, h) in self._terms for g in m}

    def hbar_part(self, h: int) -> "State":
        return State({k: c for k, c in self._terms.items() if k[2] == h}, self.regime, _trusted=True)

    def with_regime(self, regime: Regime) -> "State":
        """Reinterpret the same coefficients in another regime (truncating)."""
        if regime.rescaled != self.regime.rescaled and any(k[2] for k in self._terms):
            raise ConfigurationError("cannot move hbar-dependent terms to the exact regime")
        K = regime.cutoff
        return State({k: c for k, c in self._terms.items() if K is None or k[2] < K}, regime, _trusted=True)

    def map_monomials(self, fn) -> "State":
        """Apply a linear map given on monomials (fn(mono) -> State)."""
        acc: dict = {}
        for (m, u, h), c in self._terms.items():
            img = fn(m)
            K = self.regime.cutoff
            for (m2, u2, h2), c2 in img._terms.items():
                if K is not None and h + h2 >= K:
                    continue
                _acc(acc, (m2, u + u2, h + h2), c * c2)
        return State(acc, self.regime, _trusted=True)

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: (monomial_key(kv[0][0]), kv[0][1], kv[0][2]))

    def __repr__(self) -> str:
        from .textio import serialize
        return f"State({serialize(self)!r})"


# ------------------------------------------------------- public operations

def normal_order(word: Sequence[Generator], coeff=1, regime: Regime = EXACT, u: int = 0, h: int = 0) -> State:
    """Canonical form of coeff * u**u * hbar**h * word|0>."""
    c = _coerce_coeff(coeff)
    if not c or (regime.cutoff is not None and h >= regime.cutoff):
        return State.zero(regime)
    terms = _apply_terms(tuple(word), {((), u, h): c}, regime)
    return State(terms, regime, _trusted=True)


def apply_word(word: Sequence[Generator], v: State) -> State:
    """The operator word (product of generators) acting on the state v."""
    return State(_apply_terms(tuple(word), v._terms, v.regime), v.regime, _trusted=True)


def enumerate_monomials(n: int, p: int, points: Iterable[int] = (Z,), *, min_currents: int = 0) -> list[tuple[Generator, ...]]:
    """All canonical monomials of bigrade (n, p) built from the given points.

    A current I^{a[q]}_{-m} weighs (m, q+1), a central k^{[q]} weighs (0, q+1).
    """
    if n < 0 or p < 0:
        return []
    pts = sorted(set(points))
    gens = []
    for m in range(1, n + 1):
        for q in range(0, p):
            for pt in pts:
                for a in COLORS:
                    gens.append(Generator(CURRENT, a, -m, q, pt))
    for q in range(0, p):
        for pt in pts:
            gens.append(Generator(CENTRAL, 0, 0, q, pt))
    gens.sort(key=sort_key)
    weights = [(-g.mode, g.deriv + 1) for g in gens]
    out: list[tuple[Generator, ...]] = []

    def rec(start: int, rn: int, rp: int, acc: list):
        if rn == 0 and rp == 0:
            if sum(1 for g in acc if g.kind == CURRENT) >= min_currents:
                out.append(tuple(acc))
            return
        for i in range(start, len(gens)):
            dn, dp = weights[i]
            if dn <= rn and dp <= rp:
                acc.append(gens[i])
                rec(i, rn - dn, rp - dp, acc)
                acc.pop()

    rec(0, n, p, [])
    out.sort(key=monomial_key)
    return out


def _diag_bracket(r: int, m: int, g: Generator, rescaled: bool) -> tuple[tuple[QExt, int, Generator], ...]:
    if g.kind == CENTRAL:
        return ()
    out = []
    fc = structure_constant(r, g.color)
    if fc is not None:
        c, fv = fc
        out.append((fv, 1 if rescaled else 0, Generator(CURRENT, c, m + g.mode, g.deriv, g.point)))
    if r == g.color and m + g.mode == 0 and g.mode != 0:
        out.append((QExt(-g.mode), 2 if rescaled else 0, Generator(CENTRAL, 0, 0, g.deriv, g.point)))
    return tuple(out)


def diagonal_action(r: int, m: int, v: State) -> State:
    """Diagonal action of the affine generator I^r_m (m >= 0) on v.

    It acts as a derivation: [Delta I^r_m, I^{a[p]}_n(X)] = f^{rac} I^{c[p]}_{m+n}(X)
    - n delta^{ra} delta_{m+n,0} k^{[p]}(X); it kills centrals and the vacuum.
    """
    ColorIndex(r)
    if m < 0:
        raise ValueError("diagonal action is only defined here for modes m >= 0")
    regime = v.regime
    cache: dict = {}

    def on_mono(mono):
        hit = cache.get(mono)
        if hit is not None:
            return hit
        acc: dict = {}
        for i, g in enumerate(mono):
            for c, dh, gen in _diag_bracket(r, m, g, regime.rescaled):
                if regime.cutoff is not None and dh >= regime.cutoff:
                    continue
                part = _apply_terms(mono[:i] + (gen,), {(mono[i + 1:], 0, dh): c}, regime)
                for k, q in part.items():
                    _acc(acc, k, q)
        st = State(acc, regime, _trusted=True)
        cache[mono] = st
        return st

    return v.map_monomials(on_mono)
