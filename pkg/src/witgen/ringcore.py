"""Exact arithmetic substrate.

Three value types, all immutable:

* :class:`QSeries`  -- power series in the nome ``q`` truncated at ``q**N``
  with :class:`fractions.Fraction` coefficients.
* :class:`MPoly`    -- polynomial in ``h_1..h_k`` truncated at a total degree
  cap, with coefficients in any ring supporting ``+ - *`` and ``== 0``
  (``Fraction`` or ``QSeries``).
* :class:`UniSeries` -- one-variable power series in a Chern root ``x``,
  used for characteristic series.

No floating point is used anywhere in this module.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Callable, Iterable, Mapping

Rational = Fraction


class OrderMismatchError(ValueError):
    """Two q-series with different truncation orders were combined."""


class NotAUnitError(ZeroDivisionError):
    """Inversion of an element whose constant term is not invertible."""


class ShapeMismatchError(ValueError):
    """Polynomials over different variable counts or degree caps."""


class CompositionDomainError(ValueError):
    """Substitution of a polynomial with a nonzero constant term."""


def _invert_scalar(c):
    if isinstance(c, QSeries):
        return c.invert()
    if c == 0:
        raise NotAUnitError("constant term is zero")
    return Fraction(1) / c


class QSeries:
    """Truncated power series ``sum_{j<=N} c_j q**j``."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Any], order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is not None:
            if order < 0:
                raise ValueError("truncation order must be >= 0")
            cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        if not cs:
            raise ValueError("a q-series needs at least one coefficient")
        self._coeffs = tuple(cs)

    @classmethod
    def constant(cls, c, order: int) -> QSeries:
        return cls([c], order)

    @classmethod
    def zero(cls, order: int) -> QSeries:
        return cls([], order) if order >= 0 else cls([0])

    @classmethod
    def one(cls, order: int) -> QSeries:
        return cls([1], order)

    @classmethod
    def monomial(cls, c, power: int, order: int) -> QSeries:
        """``c * q**power`` (dropped entirely if ``power > order``)."""
        cs = [0] * (order + 1)
        if power <= order:
            cs[power] = c
        return cls(cs)

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def __getitem__(self, j: int) -> Fraction:
        return self._coeffs[j]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def _coerce(self, other) -> QSeries | None:
        if isinstance(other, QSeries):
            if other.order != self.order:
                raise OrderMismatchError(
                    f"truncation orders differ: {self.order} vs {other.order}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries.constant(other, self.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSeries([a + b for a, b in zip(self._coeffs, o._coeffs)])

    __radd__ = __add__

    def __neg__(self) -> QSeries:
        return QSeries([-a for a in self._coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSeries([a - b for a, b in zip(self._coeffs, o._coeffs)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries([a * other for a in self._coeffs])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._coeffs, o._coeffs
        n = len(a)
        out = []
        for j in range(n):
            acc = Fraction(0)
            for i in range(j + 1):
                ai = a[i]
                if ai:
                    bj = b[j - i]
                    if bj:
                        acc += ai * bj
            out.append(acc)
        return QSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries([a / other for a in self._coeffs])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.invert()

    def __pow__(self, e: int) -> QSeries:
        if e < 0:
            return self.invert() ** (-e)
        result = QSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def invert(self) -> QSeries:
        a = self._coeffs
        if a[0] == 0:
            raise NotAUnitError("q-series with zero constant term is not a unit")
        inv0 = 1 / a[0]
        out = [inv0]
        for j in range(1, len(a)):
            acc = Fraction(0)
            for i in range(1, j + 1):
                if a[i]:
                    acc += a[i] * out[j - i]
            out.append(-acc * inv0)
        return QSeries(out)

    def truncate(self, order: int) -> QSeries:
        return QSeries(self._coeffs, order)

    def __eq__(self, other) -> bool:
        if isinstance(other, QSeries):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs[0] == other and not any(self._coeffs[1:])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("QSeries", self._coeffs))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        terms = [f"{c}*q^{j}" for j, c in enumerate(self._coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.order + 1}))"


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    if not isinstance(b, QSeries):
        raise TypeError("series_mul expects two QSeries")
    return a * b


def series_invert(s: QSeries) -> QSeries:
    return s.invert()


Exponent = tuple[int, ...]


class MPoly:
    """Sparse polynomial in ``h_1..h_k`` truncated at total degree ``cap``.

    ``terms`` maps exponent tuples to coefficients; zero coefficients and
    terms above the cap are never stored.
    """

    __slots__ = ("nvars", "cap", "_terms")

    def __init__(self, nvars: int, cap: int, terms: Mapping[Exponent, Any] | None = None):
        self.nvars = nvars
        self.cap = cap
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != nvars:
                raise ShapeMismatchError(f"exponent {exp} has wrong length for {nvars} variables")
            if sum(exp) > cap or c == 0:
                continue
            clean[exp] = c
        self._terms = clean

    @classmethod
    def _raw(cls, nvars: int, cap: int, terms: dict) -> MPoly:
        p = cls.__new__(cls)
        p.nvars, p.cap, p._terms = nvars, cap, terms
        return p

    @classmethod
    def zero(cls, nvars: int, cap: int) -> MPoly:
        return cls._raw(nvars, cap, {})

    @classmethod
    def constant(cls, c, nvars: int, cap: int) -> MPoly:
        return cls(nvars, cap, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int, cap: int, coeff=1) -> MPoly:
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, cap, {tuple(exp): coeff})

    @classmethod
    def linear(cls, coeffs: Iterable, cap: int) -> MPoly:
        """``sum_i coeffs[i] * h_i``."""
        coeffs = list(coeffs)
        k = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exp = [0] * k
            exp[i] = 1
            terms[tuple(exp)] = c
        return cls(k, cap, terms)

    @property
    def terms(self) -> dict[Exponent, Any]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exp: Exponent, default=0):
        return self._terms.get(tuple(exp), default)

    def constant_term(self, default=0):
        return self._terms.get((0,) * self.nvars, default)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def homogeneous_part(self, d: int) -> MPoly:
        return MPoly._raw(self.nvars, self.cap, {e: c for e, c in self._terms.items() if sum(e) == d})

    def map_coeffs(self, fn: Callable[[Any], Any]) -> MPoly:
        return MPoly(self.nvars, self.cap, {e: fn(c) for e, c in self._terms.items()})

    def _check(self, other: MPoly) -> None:
        if self.nvars != other.nvars or self.cap != other.cap:
            raise ShapeMismatchError(
                f"shape (k={self.nvars}, cap={self.cap}) vs (k={other.nvars}, cap={other.cap})"
            )

    def _lift(self, other) -> MPoly | None:
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, QSeries)):
            return MPoly.constant(other, self.nvars, self.cap)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            if e in out:
                v = out[e] + c
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
            else:
                out[e] = c
        return MPoly._raw(self.nvars, self.cap, out)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly._raw(self.nvars, self.cap, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QSeries)):
            return MPoly(self.nvars, self.cap, {e: c * other for e, c in self._terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        cap = self.cap
        a = [(e, sum(e), c) for e, c in self._terms.items()]
        b = [(e, sum(e), c) for e, c in other._terms.items()]
        out: dict = {}
        for ea, da, ca in a:
            room = cap - da
            for eb, db, cb in b:
                if db > room:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                if e in out:
                    out[e] = out[e] + v
                else:
                    out[e] = v
        return MPoly._raw(self.nvars, cap, {e: c for e, c in out.items() if c != 0})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, QSeries)):
            return self * other
        return NotImplemented

    def __pow__(self, e: int) -> MPoly:
        if e < 0:
            return self.invert() ** (-e)
        result = MPoly.constant(1, self.nvars, self.cap)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def invert(self) -> MPoly:
        """Inverse of a polynomial with a unit constant term.

        Uses ``1/(c0 (1 + u)) = c0^-1 sum_j (-u)^j``; ``u`` is nilpotent
        below the cap so the sum is finite.
        """
        c0 = self.constant_term(None)
        if c0 is None:
            raise NotAUnitError("polynomial with zero constant term is not a unit")
        inv0 = _invert_scalar(c0)
        u = (self * inv0) - 1
        result = MPoly.constant(1, self.nvars, self.cap)
        power = MPoly.constant(1, self.nvars, self.cap)
        for _ in range(self.cap):
            power = power * (-u)
            if power.is_zero():
                break
            result = result + power
        return result * inv0

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return (self.nvars, self.cap, self._terms) == (other.nvars, other.cap, other._terms)
        if isinstance(other, (int, Fraction, QSeries)):
            return self == MPoly.constant(other, self.nvars, self.cap)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, self.cap, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return f"MPoly(0; k={self.nvars}, cap={self.cap})"
        parts = []
        for e in sorted(self._terms, key=lambda e: (sum(e), tuple(-x for x in e))):
            mono = "*".join(
                f"h{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p
            )
            parts.append(f"({self._terms[e]})" + (f"*{mono}" if mono else ""))
        return f"MPoly({' + '.join(parts)}; cap={self.cap})"


def mpoly_mul(a: MPoly, b: MPoly) -> MPoly:
    if not isinstance(b, MPoly):
        raise TypeError("mpoly_mul expects two MPoly")
    return a * b


def monomials(nvars: int, degree: int) -> list[Exponent]:
    """All exponent vectors of the given total degree, in a fixed order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    return out


class UniSeries:
    """Power series ``sum_{i<=cap} c_i x**i`` in one formal Chern root."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Any], cap: int | None = None, zero=Fraction(0)):
        cs = list(coeffs)
        if cap is not None:
            cs = (cs + [zero] * (cap + 1))[: cap + 1]
        if not cs:
            raise ValueError("a series needs at least one coefficient")
        self._coeffs = tuple(cs)

    @property
    def cap(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    def __getitem__(self, i: int):
        return self._coeffs[i]

    @property
    def is_even(self) -> bool:
        return all(c == 0 for c in self._coeffs[1::2])

    def _check(self, other: UniSeries) -> None:
        if other.cap != self.cap:
            raise ShapeMismatchError(f"series caps differ: {self.cap} vs {other.cap}")

    def __add__(self, other: UniSeries) -> UniSeries:
        self._check(other)
        return UniSeries([a + b for a, b in zip(self._coeffs, other._coeffs)])

    def __sub__(self, other: UniSeries) -> UniSeries:
        self._check(other)
        return UniSeries([a - b for a, b in zip(self._coeffs, other._coeffs)])

    def __neg__(self) -> UniSeries:
        return UniSeries([-a for a in self._coeffs])

    def __mul__(self, other):
        if not isinstance(other, UniSeries):
            return UniSeries([a * other for a in self._coeffs])
        self._check(other)
        a, b = self._coeffs, other._coeffs
        out = []
        for j in range(len(a)):
            acc = a[0] * b[j]
            for i in range(1, j + 1):
                if a[i] != 0 and b[j - i] != 0:
                    acc = acc + a[i] * b[j - i]
            out.append(acc)
        return UniSeries(out)

    def invert(self) -> UniSeries:
        a = self._coeffs
        inv0 = _invert_scalar(a[0])
        out = [inv0]
        for j in range(1, len(a)):
            acc = None
            for i in range(1, j + 1):
                if a[i] != 0:
                    t = a[i] * out[j - i]
                    acc = t if acc is None else acc + t
            out.append(a[0] * 0 if acc is None else -(acc * inv0))
        return UniSeries(out)

    def map_coeffs(self, fn: Callable[[Any], Any]) -> UniSeries:
        return UniSeries([fn(c) for c in self._coeffs])

    def __eq__(self, other) -> bool:
        if isinstance(other, UniSeries):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("UniSeries", self._coeffs))

    def __repr__(self) -> str:
        return f"UniSeries({list(self._coeffs)!r})"


def compose_series(f: UniSeries, p: MPoly) -> MPoly:
    """Substitute ``p`` for ``x`` in ``f``, truncated at ``p.cap``.

    ``p`` must have zero constant term so that ``p**j`` vanishes for
    ``j > p.cap``.
    """
    if p.constant_term() != 0:
        raise CompositionDomainError("substituted polynomial must have zero constant term")
    low = min((sum(e) for e, _ in p.items()), default=p.cap + 1)
    needed = p.cap // low if low else 0
    if f.cap < needed:
        raise CompositionDomainError(
            f"series known only to x^{f.cap}; substitution needs x^{needed}"
        )
    top = min(f.cap, needed)
    # Horner: f_top, then result*p + f_j down to j = 0
    result = MPoly.constant(f[top], p.nvars, p.cap)
    for j in range(top - 1, -1, -1):
        result = result * p
        if f[j] != 0:
            result = result + f[j]
    return result
