"""Jacobi theta functions and the Witten / A-hat characteristic series.

The exact series live in the Chern-root normalization: with the root
``x = 2*pi*i*v`` the quotient ``v * theta'(0, tau) / theta(v, tau)`` becomes

    W(x) = (x/2)/sinh(x/2) * prod_{j>=1} (1-q^j)^2 / ((1-q^j e^x)(1-q^j e^-x))

so every coefficient is rational and the ``q^(1/8)`` prefactors cancel.
The numeric functions evaluate the four truncated product formulas and are
used as independent oracles for the exact series.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .ringcore import QSeries, UniSeries

DEFAULT_TERMS = 60


class DomainError(ValueError):
    """Nome outside the open upper half plane."""


class ThetaKind(enum.Enum):
    THETA = "theta"
    THETA1 = "theta1"
    THETA2 = "theta2"
    THETA3 = "theta3"


@dataclass(frozen=True)
class CharSeries:
    """Even characteristic series in one Chern root with q-series coefficients."""

    kind: Literal["witten", "ahat"]
    series: UniSeries

    @property
    def q_order(self) -> int:
        return self.series[0].order

    @property
    def x_cap(self) -> int:
        return self.series.cap

    def coefficient(self, x_power: int, q_power: int) -> Fraction:
        return self.series[x_power][q_power]

    def q0_slice(self) -> list[Fraction]:
        return [c[0] for c in self.series.coeffs]

    def evaluate(self, x: complex, q: complex) -> complex:
        """Float evaluation of the truncated double series."""
        total = 0j
        for i, c in enumerate(self.series.coeffs):
            qs = sum(float(a) * q**j for j, a in enumerate(c) if a)
            total += qs * x**i
        return total


def _exp_like(cap: int, parity: int, scale: Fraction) -> list[Fraction]:
    """Coefficients of sum_{i = parity mod 2} (scale*x)^i / i! up to x^cap."""
    out = [Fraction(0)] * (cap + 1)
    for i in range(parity, cap + 1, 2):
        out[i] = scale**i / math.factorial(i)
    return out


def _ahat_rational(cap: int) -> list[Fraction]:
    # sinh(x/2)/(x/2) = sum (x/2)^(2i) / (2i+1)!
    shx = [Fraction(0)] * (cap + 1)
    for i in range(0, cap + 1, 2):
        shx[i] = Fraction(1, 2**i * math.factorial(i + 1))
    return list(UniSeries(shx).invert().coeffs)


def ahat_char_series(D: int) -> CharSeries:
    if D < 0:
        raise ValueError("x-degree cap must be >= 0")
    coeffs = [QSeries.constant(c, 0) for c in _ahat_rational(D)]
    return CharSeries("ahat", UniSeries(coeffs))


def witten_char_series(N: int, D: int) -> CharSeries:
    if N < 0 or D < 0:
        raise ValueError("q-order and x-degree cap must be >= 0")
    zero = QSeries.zero(N)
    series = UniSeries([QSeries.constant(c, N) for c in _ahat_rational(D)])
    # c(x) = e^x + e^-x - 2
    cosh2 = [2 * c for c in _exp_like(D, 0, Fraction(1))]
    cosh2[0] = Fraction(0)
    for j in range(1, N + 1):
        one_minus_sq = (QSeries.one(N) - QSeries.monomial(1, j, N)) ** 2
        qj = QSeries.monomial(1, j, N)
        # denominator (1-q^j)^2 - q^j c(x)
        den = [one_minus_sq] + [qj * (-c) if c else zero for c in cosh2[1:]]
        factor = UniSeries(den).invert() * one_minus_sq
        series = series * factor
    return CharSeries("witten", series)


def _check_tau(tau: complex) -> None:
    if complex(tau).imag <= 0:
        raise DomainError(f"need Im(tau) > 0, got tau={tau}")


def _q_eighth(tau: complex) -> complex:
    return cmath.exp(1j * math.pi * tau / 4)


def theta_eval_numeric(kind: ThetaKind, v: complex, tau: complex, terms: int = DEFAULT_TERMS) -> complex:
    """Truncated product formula for one of the four theta functions."""
    _check_tau(tau)
    if terms < 1:
        raise ValueError("need at least one product term")
    kind = ThetaKind(kind)
    q = cmath.exp(2j * math.pi * tau)
    z = cmath.exp(2j * math.pi * v)
    zi = 1 / z
    prod = 1 + 0j
    if kind in (ThetaKind.THETA, ThetaKind.THETA1):
        sign = -1 if kind is ThetaKind.THETA else 1
        for j in range(1, terms + 1):
            qj = q**j
            prod *= (1 - qj) * (1 + sign * z * qj) * (1 + sign * zi * qj)
        trig = cmath.sin(math.pi * v) if kind is ThetaKind.THETA else cmath.cos(math.pi * v)
        return 2 * _q_eighth(tau) * trig * prod
    sign = -1 if kind is ThetaKind.THETA2 else 1
    qhalf = cmath.exp(1j * math.pi * tau)
    for j in range(1, terms + 1):
        qj = q**j
        qh = qhalf ** (2 * j - 1)
        prod *= (1 - qj) * (1 + sign * z * qh) * (1 + sign * zi * qh)
    return prod


def theta_prime_zero(tau: complex, terms: int = DEFAULT_TERMS) -> complex:
    """d/dv theta(v, tau) at v = 0, i.e. 2 pi q^(1/8) prod (1-q^j)^3."""
    _check_tau(tau)
    q = cmath.exp(2j * math.pi * tau)
    prod = 1 + 0j
    for j in range(1, terms + 1):
        prod *= (1 - q**j) ** 3
    return 2 * math.pi * _q_eighth(tau) * prod


def theta_prime_zero_fd(tau: complex, h: float = 1e-5, terms: int = DEFAULT_TERMS) -> complex:
    """Central-difference derivative of theta at 0; cross-check only."""
    f = lambda v: theta_eval_numeric(ThetaKind.THETA, v, tau, terms)  # noqa: E731
    return (8 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12 * h)


def translation_factor(kind: ThetaKind, v: complex, tau: complex, m: int, n: int) -> complex:
    """Multiplier taking theta_kind(v) to theta_kind(v + m + n tau)."""
    kind = ThetaKind(kind)
    m_sign = (-1) ** (m % 2) if kind in (ThetaKind.THETA, ThetaKind.THETA1) else 1
    n_sign = (-1) ** (n % 2) if kind in (ThetaKind.THETA, ThetaKind.THETA2) else 1
    return m_sign * n_sign * cmath.exp(-2j * math.pi * n * v - 1j * math.pi * n * n * tau)


def translation_law_residual(
    kind: ThetaKind, v: complex, tau: complex, m: int, n: int, terms: int = DEFAULT_TERMS
) -> float:
    _check_tau(tau)
    lhs = theta_eval_numeric(kind, v + m + n * tau, tau, terms)
    rhs = translation_factor(kind, v, tau, m, n) * theta_eval_numeric(kind, v, tau, terms)
    return abs(lhs - rhs)


def jacobi_identity_residual(tau: complex, terms: int = DEFAULT_TERMS) -> float:
    """|theta'(0) - pi theta1(0) theta2(0) theta3(0)|."""
    _check_tau(tau)
    rhs = math.pi
    for kind in (ThetaKind.THETA1, ThetaKind.THETA2, ThetaKind.THETA3):
        rhs *= theta_eval_numeric(kind, 0, tau, terms)
    return abs(theta_prime_zero(tau, terms) - rhs)


def witten_quotient_numeric(x: complex, tau: complex, terms: int = DEFAULT_TERMS) -> complex:
    """v theta'(0) / theta(v) at v = x / (2 pi i), from the product formulas."""
    v = x / (2j * math.pi)
    return v * theta_prime_zero(tau, terms) / theta_eval_numeric(ThetaKind.THETA, v, tau, terms)
