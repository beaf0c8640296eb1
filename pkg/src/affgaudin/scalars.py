"""Exact coefficients: the field Q(s) with s^2 = -2, Laurent powers of
u = z - w and a (possibly truncated) power series in hbar.

``s`` stands for i*sqrt(2), the normalisation of the sl2 structure constants.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

__all__ = [
    "ConfigurationError",
    "QExt",
    "Scalar",
    "ZERO",
    "ONE",
    "S",
    "as_mpq",
    "scalar_mul",
    "scalar_inverse",
]


class ConfigurationError(ValueError):
    """Raised when objects with incompatible hbar settings are combined."""


def as_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x).numerator, Fraction(x).denominator)
    return mpq(x)


class QExt:
    """An element ``rat + srat*s`` of Q(s), s^2 = -2. Immutable."""

    __slots__ = ("rat", "srat")

    def __init__(self, rat=0, srat=0):
        self.rat = rat if type(rat) is type(_MPQ0) else as_mpq(rat)
        self.srat = srat if type(srat) is type(_MPQ0) else as_mpq(srat)

    @classmethod
    def coerce(cls, x) -> "QExt":
        if isinstance(x, QExt):
            return x
        return cls(x)

    def __add__(self, other):
        if not isinstance(other, QExt):
            other = QExt.coerce(other)
        return QExt(self.rat + other.rat, self.srat + other.srat)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, QExt):
            other = QExt.coerce(other)
        return QExt(self.rat - other.rat, self.srat - other.srat)

    def __rsub__(self, other):
        return QExt.coerce(other) - self

    def __neg__(self):
        return QExt(-self.rat, -self.srat)

    def __mul__(self, other):
        if not isinstance(other, QExt):
            if isinstance(other, Scalar):
                return NotImplemented
            other = QExt.coerce(other)
        a, b, c, d = self.rat, self.srat, other.rat, other.srat
        if not b and not d:
            return QExt(a * c, _MPQ0)
        return QExt(a * c - 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def norm(self) -> mpq:
        """Field norm rat^2 + 2 srat^2 (nonzero for nonzero elements)."""
        return self.rat * self.rat + 2 * self.srat * self.srat

    def inverse(self) -> "QExt":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero in Q(s)")
        return QExt(self.rat / n, -self.srat / n)

    def __truediv__(self, other):
        return self * QExt.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QExt.coerce(other) * self.inverse()

    def __bool__(self) -> bool:
        return bool(self.rat) or bool(self.srat)

    def __eq__(self, other) -> bool:
        if isinstance(other, QExt):
            return self.rat == other.rat and self.srat == other.srat
        if isinstance(other, (int, Fraction)) or type(other) is type(_MPQ0):
            return self.srat == 0 and self.rat == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.rat, self.srat))

    def is_rational(self) -> bool:
        return not self.srat

    def to_record(self) -> dict:
        return {
            "rat": [int(self.rat.numerator), int(self.rat.denominator)],
            "srat": [int(self.srat.numerator), int(self.srat.denominator)],
        }

    def __repr__(self) -> str:
        return f"QExt({self.rat}, {self.srat})"

    def __str__(self) -> str:
        if not self.srat:
            return str(self.rat)
        if not self.rat:
            return f"{self.srat}*s"
        sign = "+" if self.srat > 0 else "-"
        return f"({self.rat}{sign}{abs(self.srat)}*s)"


_MPQ0 = mpq(0)
ZERO = QExt(0)
ONE = QExt(1)
S = QExt(0, 1)


class Scalar:
    """Finite sum of ``q * u**i * hbar**j`` with q in Q(s).

    ``cutoff`` K, when set, drops every term with hbar power >= K.
    """

    __slots__ = ("terms", "cutoff")

    def __init__(self, terms: Mapping[tuple[int, int], QExt] | None = None, cutoff: int | None = None):
        if cutoff is not None and cutoff < 1:
            raise ConfigurationError("hbar cutoff must be >= 1")
        clean: dict[tuple[int, int], QExt] = {}
        for (u, h), q in (terms or {}).items():
            if h < 0:
                raise ValueError("negative hbar power")
            if cutoff is not None and h >= cutoff:
                continue
            q = QExt.coerce(q)
            if q:
                clean[(int(u), int(h))] = q
        self.terms = clean
        self.cutoff = cutoff

    @classmethod
    def const(cls, q, cutoff: int | None = None) -> "Scalar":
        return cls({(0, 0): QExt.coerce(q)}, cutoff)

    @classmethod
    def monomial(cls, q=1, u: int = 0, h: int = 0, cutoff: int | None = None) -> "Scalar":
        return cls({(u, h): QExt.coerce(q)}, cutoff)

    def _check(self, other: "Scalar") -> None:
        if self.cutoff != other.cutoff:
            raise ConfigurationError(
                f"hbar cutoffs differ: {self.cutoff} vs {other.cutoff}"
            )

    def _lift(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            self._check(other)
            return other
        return Scalar.const(other, self.cutoff)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, q in other.terms.items():
            v = out.get(k)
            v = q if v is None else v + q
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Scalar(out, self.cutoff)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -q for k, q in self.terms.items()}, self.cutoff)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        K = self.cutoff
        out: dict[tuple[int, int], QExt] = {}
        for (u1, h1), q1 in self.terms.items():
            for (u2, h2), q2 in other.terms.items():
                h = h1 + h2
                if K is not None and h >= K:
                    continue
                k = (u1 + u2, h)
                v = out.get(k)
                out[k] = q1 * q2 if v is None else v + q1 * q2
        return Scalar(out, K)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.cutoff == other.cutoff and self.terms == other.terms
        if not self.terms:
            return other == 0
        return self.terms == {(0, 0): QExt.coerce(other)}

    def __hash__(self) -> int:
        return hash((frozenset(self.terms.items()), self.cutoff))

    def truncate(self, cutoff: int | None) -> "Scalar":
        return Scalar(self.terms, cutoff)

    def to_records(self) -> list[dict]:
        recs = []
        for (u, h) in sorted(self.terms):
            rec = {"u": u, "h": h}
            rec.update(self.terms[(u, h)].to_record())
            recs.append(rec)
        return recs

    @classmethod
    def from_records(cls, records: Iterable[Mapping], cutoff: int | None = None) -> "Scalar":
        terms = {}
        for r in records:
            q = QExt(mpq(*r["rat"]), mpq(*r["srat"]))
            terms[(int(r["u"]), int(r["h"]))] = q
        return cls(terms, cutoff)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (u, h) in sorted(self.terms):
            s = str(self.terms[(u, h)])
            if u:
                s += f"*u^{u}"
            if h:
                s += f"*h^{h}"
            parts.append(s)
        return " + ".join(parts)


def scalar_mul(a: Scalar, b: Scalar) -> Scalar:
    """Exact product; raises ConfigurationError on mismatched cutoffs."""
    if a.cutoff != b.cutoff:
        raise ConfigurationError(f"hbar cutoffs differ: {a.cutoff} vs {b.cutoff}")
    return a * b


def scalar_inverse(a) -> QExt:
    return QExt.coerce(a).inverse()
