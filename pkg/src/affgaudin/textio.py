"""Text grammar for states, canonical serialization and structured records.

Grammar (whitespace is ignored)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := INT ['/' INT] | 's' | 'u^' [-]INT | 'h^' INT
             | 'I[' a=C, n=INT [, p=INT] [, pt=z|w] ']' | 'k' ['[' [p=INT] [, pt=z|w] ']']
             | 'vac' | '(' expr ')' | 'T' ['^' INT] '(' expr ')'
             | 'D[' j=INT [, pt=z|w] ']' '(' expr ')'
             | 'f[' C,C,C ']' | 'd[' C,C ']' | 't[' C,... ']' | 'sym{' gen ('*' gen)* '}'

A color C is 1, 2, 3 or an index letter; letters repeated inside one term are
summed over 1..3.  ``t[...]`` is the symmetrized product of deltas and
``sym{...}`` averages the enclosed generators over permutations of their
color slots.  A state-valued factor (vac or a parenthesised expression) must
come last in its term.
"""
from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from math import factorial

from gmpy2 import mpq

from .algebra import (
    CENTRAL,
    CURRENT,
    EXACT,
    POINT_NAMES,
    W,
    Z,
    Generator,
    Regime,
    State,
    _acc,
    _apply_terms,
)
from .scalars import ConfigurationError, ONE, QExt, S
from .tensors import COLORS, delta, f, sym_tensor_value

__all__ = [
    "ParseError",
    "parse_state",
    "serialize",
    "format_paper",
    "state_to_records",
    "state_from_records",
]


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        self.pos = pos
        super().__init__(f"{msg} at position {pos}" + (f": ...{text[pos:pos + 20]!r}" if text else ""))


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            out.append(("sym", m.group(3), m.start(3)))
        pos = m.end()
    out.append(("end", "", n))
    return out


# ----------------------------------------------------------------- syntax tree

@dataclass
class _Gen:
    kind: int
    color: object  # int or index letter
    mode: int
    deriv: int
    point: int


@dataclass
class _Sym:
    gens: list[_Gen]


@dataclass
class _Tensor:
    name: str
    idx: list


@dataclass
class _Op:
    name: str  # 'T' or 'D'
    power: int
    j: int
    point: int
    body: "_Expr"


@dataclass
class _Term:
    sign: int = 1
    coeff: QExt = ONE
    u: int = 0
    h: int = 0
    tensors: list[_Tensor] = field(default_factory=list)
    ops: list = field(default_factory=list)  # _Gen | _Sym
    tail: object = None  # 'vac' | _Expr | _Op


@dataclass
class _Expr:
    terms: list[_Term]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def expect(self, val: str):
        t = self.next()
        if t[1] != val:
            self.i -= 1
            self.error(f"expected {val!r}")
        return t

    def accept(self, val: str) -> bool:
        if self.peek()[1] == val and self.peek()[0] != "end":
            self.i += 1
            return True
        return False

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        t = self.next()
        if t[0] != "int":
            self.i -= 1
            self.error("expected an integer")
        return sign * int(t[1])

    def parse(self) -> _Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            self.error("unexpected input")
        return e

    def expr(self) -> _Expr:
        terms = []
        sign = -1 if self.accept("-") else 1
        terms.append(self.term(sign))
        while True:
            if self.accept("+"):
                terms.append(self.term(1))
            elif self.accept("-"):
                terms.append(self.term(-1))
            else:
                break
        return _Expr(terms)

    def term(self, sign: int) -> _Term:
        t = _Term(sign=sign)
        self.factor(t)
        while self.accept("*"):
            if t.tail is not None:
                self.error("a state-valued factor must be the last factor of its term")
            self.factor(t)
        return t

    def color(self):
        tok = self.next()
        if tok[0] == "int":
            c = int(tok[1])
            if c not in COLORS:
                self.i -= 1
                self.error(f"color index {c} out of range 1..3")
            return c
        if tok[0] == "name" and re.fullmatch(r"[a-z][a-z0-9]*", tok[1]):
            return tok[1]
        self.i -= 1
        self.error("expected a color index")

    def point(self) -> int:
        tok = self.next()
        if tok[1] == "z":
            return Z
        if tok[1] == "w":
            return W
        self.i -= 1
        self.error("point must be z or w")

    def kv_list(self, allowed: dict) -> dict:
        out: dict = {}
        self.expect("[")
        if self.accept("]"):
            return out
        while True:
            key = self.next()
            if key[0] != "name" or key[1] not in allowed:
                self.i -= 1
                self.error(f"unknown key {key[1]!r}")
            if key[1] in out:
                self.i -= 1
                self.error(f"duplicate key {key[1]!r}")
            self.expect("=")
            out[key[1]] = allowed[key[1]]()
            if self.accept("]"):
                return out
            self.expect(",")

    def generator(self) -> _Gen:
        tok = self.next()
        if tok[1] == "I":
            kv = self.kv_list({"a": self.color, "p": self.integer, "n": self.integer, "pt": self.point})
            if "a" not in kv or "n" not in kv:
                self.error("a current needs a= and n=", tok)
            if kv.get("p", 0) < 0:
                self.error("derivative order must be >= 0", tok)
            return _Gen(CURRENT, kv["a"], kv["n"], kv.get("p", 0), kv.get("pt", Z))
        if tok[1] == "k":
            kv = self.kv_list({"p": self.integer, "pt": self.point}) if self.peek()[1] == "[" else {}
            if kv.get("p", 0) < 0:
                self.error("derivative order must be >= 0", tok)
            return _Gen(CENTRAL, 0, 0, kv.get("p", 0), kv.get("pt", Z))
        self.i -= 1
        self.error("expected a generator")

    def index_list(self) -> list:
        self.expect("[")
        out = []
        if self.accept("]"):
            return out
        while True:
            out.append(self.color())
            if self.accept("]"):
                return out
            self.expect(",")

    def factor(self, t: _Term) -> None:
        tok = self.peek()
        kind, val = tok[0], tok[1]
        if kind == "int":
            self.next()
            num = mpq(int(val))
            if self.accept("/"):
                den = self.next()
                if den[0] != "int" or int(den[1]) == 0:
                    self.i -= 1
                    self.error("expected a nonzero denominator")
                num = num / int(den[1])
            t.coeff = t.coeff * QExt(num)
            return
        if kind == "name":
            if val == "s":
                self.next()
                t.coeff = t.coeff * S
                return
            if val in ("u", "h"):
                self.next()
                self.expect("^")
                e = self.integer()
                if val == "u":
                    t.u += e
                else:
                    if e < 0:
                        self.error("negative hbar power")
                    t.h += e
                return
            if val in ("I", "k"):
                t.ops.append(self.generator())
                return
            if val == "vac":
                self.next()
                t.tail = "vac"
                return
            if val in ("f", "d", "t"):
                self.next()
                idx = self.index_list()
                need = {"f": 3, "d": 2}.get(val)
                if need is not None and len(idx) != need:
                    self.error(f"{val}[...] takes {need} indices", tok)
                if val == "t" and len(idx) % 2:
                    self.error("t[...] needs an even number of indices", tok)
                t.tensors.append(_Tensor(val, idx))
                return
            if val == "sym":
                self.next()
                self.expect("{")
                gens = [self.generator()]
                while self.accept("*"):
                    gens.append(self.generator())
                self.expect("}")
                t.ops.append(_Sym(gens))
                return
            if val == "T":
                self.next()
                power = 1
                if self.accept("^"):
                    power = self.integer()
                    if power < 0:
                        self.error("negative power of T", tok)
                self.expect("(")
                body = self.expr()
                self.expect(")")
                t.tail = _Op("T", power, 0, Z, body)
                return
            if val == "D":
                self.next()
                kv = self.kv_list({"j": self.integer, "pt": self.point})
                self.expect("(")
                body = self.expr()
                self.expect(")")
                t.tail = _Op("D", 1, kv.get("j", 0), kv.get("pt", Z), body)
                return
            self.error(f"unknown symbol {val!r}")
        if val == "(":
            self.next()
            body = self.expr()
            self.expect(")")
            t.tail = body
            return
        self.error("expected a factor")


# ----------------------------------------------------------------- evaluation

def _letters(t: _Term) -> list[str]:
    seen: list[str] = []

    def add(c):
        if isinstance(c, str) and c not in seen:
            seen.append(c)

    for ten in t.tensors:
        for c in ten.idx:
            add(c)
    for op in t.ops:
        for g in (op.gens if isinstance(op, _Sym) else [op]):
            add(g.color)
    return seen


def _tensor_value(ten: _Tensor, env: dict) -> QExt:
    idx = [env[c] if isinstance(c, str) else c for c in ten.idx]
    if ten.name == "f":
        return f(*idx)
    if ten.name == "d":
        return QExt(delta(*idx))
    return QExt(sym_tensor_value(len(idx), idx))


def _concrete(g: _Gen, env: dict) -> Generator:
    c = env[g.color] if isinstance(g.color, str) else g.color
    if g.kind == CENTRAL:
        return Generator(CENTRAL, 0, 0, g.deriv, g.point)
    return Generator(CURRENT, c, g.mode, g.deriv, g.point)


def _words(ops: list, env: dict) -> list[tuple[mpq, tuple[Generator, ...]]]:
    words: list[tuple[mpq, tuple[Generator, ...]]] = [(mpq(1), ())]
    for op in ops:
        if isinstance(op, _Gen):
            g = _concrete(op, env)
            words = [(c, w + (g,)) for c, w in words]
            continue
        base = [_concrete(g, env) for g in op.gens]
        colors = [g.color for g in base]
        k = len(base)
        variants = Counter()
        for perm in itertools.permutations(range(k)):
            variants[tuple(g._replace(color=colors[perm[i]]) if g.kind == CURRENT else g
                           for i, g in enumerate(base))] += 1
        words = [(c * mpq(cnt, factorial(k)), w + v) for c, w in words for v, cnt in variants.items()]
    return words


def _eval_expr(e: _Expr, regime: Regime) -> State:
    acc = State.zero(regime)
    for t in e.terms:
        acc = acc + _eval_term(t, regime)
    return acc


def _eval_tail(tail, regime: Regime) -> State:
    from .vertex import translate, twisted_derivative

    if tail == "vac":
        return State.vacuum(regime)
    if isinstance(tail, _Expr):
        return _eval_expr(tail, regime)
    body = _eval_expr(tail.body, regime)
    if tail.name == "T":
        return translate(body, tail.power)
    return twisted_derivative(tail.j, tail.point, body)


def _eval_term(t: _Term, regime: Regime) -> State:
    if t.h and not regime.rescaled:
        raise ConfigurationError("hbar powers need the rescaled regime")
    if t.tail is None:
        if not t.ops and not t.tensors and t.coeff == 0:
            return State.zero(regime)
        raise ValueError("every term must end with vac or a state-valued factor")
    if regime.cutoff is not None and t.h >= regime.cutoff:
        return State.zero(regime)
    base = _eval_tail(t.tail, regime)
    letters = _letters(t)
    coeff = t.coeff if t.sign > 0 else -t.coeff
    out: dict = {}
    for values in itertools.product(COLORS, repeat=len(letters)):
        env = dict(zip(letters, values))
        c = coeff
        for ten in t.tensors:
            c = c * _tensor_value(ten, env)
            if not c:
                break
        if not c:
            continue
        for w, word in _words(t.ops, env):
            start = {(m, u + t.u, h + t.h): q * c * QExt(w) for (m, u, h), q in base.items()
                     if regime.cutoff is None or h + t.h < regime.cutoff}
            for k, q in _apply_terms(word, start, regime).items():
                _acc(out, k, q)
    return State(out, regime, _trusted=True)


def parse_state(text: str, regime: Regime = EXACT) -> State:
    """Parse and normal-order a state written in the text grammar."""
    if text.strip() == "0":
        return State.zero(regime)
    return _eval_expr(_Parser(text).parse(), regime)


# ----------------------------------------------------------------- output

def _fmt_q(q: mpq) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _term_factors(m, u, h) -> list[str]:
    parts = []
    if u:
        parts.append(f"u^{u}")
    if h:
        parts.append(f"h^{h}")
    parts.extend(str(g) for g in m)
    parts.append("vac")
    return parts


def serialize(v: State) -> str:
    """Canonical text form; parse_state(serialize(v)) == v."""
    pieces: list[tuple[mpq, list[str]]] = []
    for (m, u, h), c in v.sorted_items():
        rest = _term_factors(m, u, h)
        if c.rat:
            pieces.append((c.rat, rest))
        if c.srat:
            pieces.append((c.srat, ["s"] + rest))
    if not pieces:
        return "0"
    out = []
    for i, (q, rest) in enumerate(pieces):
        body = " * ".join([_fmt_q(abs(q))] + rest)
        if i == 0:
            out.append(("-" if q < 0 else "") + body)
        else:
            out.append((" - " if q < 0 else " + ") + body)
    return "".join(out)


def _display_gen(g: Generator) -> str:
    pt = POINT_NAMES[g.point]
    d = "'" * g.deriv if g.deriv <= 3 else f"[{g.deriv}]"
    if g.kind == CENTRAL:
        return f"k{d}({pt})"
    return f"I^{{{g.color}{d}}}_{{{g.mode}}}({pt})"


def format_paper(v: State) -> str:
    """Human display close to the usual notation, one term per line."""
    if not v:
        return "0"
    lines = []
    for (m, u, h), c in v.sorted_items():
        parts = [f"{c}"]
        if u:
            parts.append(f"(z-w)^{u}")
        if h:
            parts.append(f"hbar^{h}")
        parts.extend(_display_gen(g) for g in m)
        lines.append(" ".join(parts) + "|0>")
    return "\n".join(lines)


def _gen_record(g: Generator) -> dict:
    if g.kind == CENTRAL:
        return {"kind": "central", "p": g.deriv, "pt": POINT_NAMES[g.point]}
    return {"kind": "current", "a": g.color, "n": g.mode, "p": g.deriv, "pt": POINT_NAMES[g.point]}


def state_to_records(v: State) -> list[dict]:
    recs = []
    for (m, u, h), c in v.sorted_items():
        rec = {"monomial": [_gen_record(g) for g in m], "u": u, "h": h}
        rec.update(c.to_record())
        recs.append(rec)
    return recs


def state_from_records(records, regime: Regime = EXACT) -> State:
    terms: dict = {}
    for r in records:
        mono = []
        for g in r["monomial"]:
            pt = Z if g["pt"] == "z" else W
            if g["kind"] == "central":
                mono.append(Generator(CENTRAL, 0, 0, g["p"], pt))
            else:
                mono.append(Generator(CURRENT, g["a"], g["n"], g["p"], pt))
        q = QExt(mpq(*r["rat"]), mpq(*r["srat"]))
        _acc(terms, (tuple(mono), r["u"], r["h"]), q)
    return State(terms, regime)
