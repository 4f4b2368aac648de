"""Characteristic classes of toric complete intersections and the Witten genus.

Everything is pushed forward to the ambient toric variety ``X``: a class
``a`` on ``Y`` is integrated as ``a * e(N)`` on ``X`` where ``e(N)`` is the
product of the hypersurface classes ``E_l``.  The cohomology ring of ``Y``
itself is never built.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import theta
from .ringcore import MPoly, QSeries, UniSeries, compose_series
from .theta import CharSeries, ahat_char_series, witten_char_series
from .toric import Fan, PicardData, integrate

DEFAULT_Q_ORDER_RANK1 = 8
DEFAULT_Q_ORDER = 4
ORACLE_MAX_ORDER = 2


class ModelError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class ConditioningError(RuntimeError):
    """Residue contour came too close to a singular point."""


@dataclass(frozen=True)
class CIModel:
    """Complete intersection of hypersurfaces with classes ``E_l = sum_i d[l][i] h_i``."""

    fan: Fan
    pd: PicardData
    degrees: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        degrees = tuple(tuple(int(x) for x in row) for row in self.degrees)
        object.__setattr__(self, "degrees", degrees)
        for l, row in enumerate(degrees):
            if len(row) != self.pd.k:
                raise ModelError("bad_degrees", f"degree row {l} has {len(row)} entries, expected {self.pd.k}")
            if not any(row):
                raise ModelError("zero_degree_row", f"degree row {l} is zero (empty hypersurface class)")
        if len(degrees) > self.fan.dim:
            raise ModelError(
                "too_many_hypersurfaces",
                f"{len(degrees)} hypersurfaces in a {self.fan.dim}-dimensional variety",
            )

    @property
    def n(self) -> int:
        return self.fan.dim

    @property
    def k(self) -> int:
        return self.pd.k

    @property
    def s(self) -> int:
        return len(self.degrees)

    @property
    def dim_y(self) -> int:
        return self.n - self.s

    def divisor_classes(self) -> list[MPoly]:
        return [MPoly.linear(row, self.n) for row in self.pd.m_matrix]

    def hypersurface_classes(self) -> list[MPoly]:
        return [MPoly.linear(row, self.n) for row in self.degrees]

    def nonbasis_rows(self) -> list[tuple[int, ...]]:
        basis = set(self.pd.basis_rays)
        return [row for j, row in enumerate(self.pd.m_matrix) if j not in basis]


@dataclass(frozen=True)
class ObstructionReport:
    offdiag: tuple[tuple[int, ...], ...]
    diag: tuple[int, ...]
    parity: tuple[int, ...]

    @property
    def string_certified(self) -> bool:
        k = len(self.diag)
        return not any(self.diag) and not any(
            self.offdiag[i][l] for i in range(k) for l in range(k) if i != l
        )

    @property
    def verdict(self) -> str:
        return "string_certified" if self.string_certified else "not_certified"


@dataclass
class GenusReport:
    obstructions: ObstructionReport
    w2_poly: MPoly
    p1_poly: MPoly
    witten_genus: QSeries
    ahat: Fraction
    metadata: dict = field(default_factory=dict)

    @property
    def string_verdict(self) -> bool:
        return self.obstructions.string_certified


# -- characteristic classes -------------------------------------------------


def chern_total_X(fan: Fan, pd: PicardData) -> MPoly:
    n = fan.dim
    total = MPoly.constant(Fraction(1), pd.k, n)
    for row in pd.m_matrix:
        total = total * (MPoly.linear(row, n) + 1)
    return total


def c1_Y(ci: CIModel) -> MPoly:
    coeffs = [sum(col) for col in zip(*ci.pd.m_matrix)]
    for row in ci.degrees:
        coeffs = [c - d for c, d in zip(coeffs, row)]
    return MPoly.linear(coeffs, ci.n)


def w2_Y(ci: CIModel) -> MPoly:
    """Mod-2 reduction of ``c1_Y`` (coefficients in {0, 1})."""
    return c1_Y(ci).map_coeffs(lambda c: c % 2)


def p1_Y(ci: CIModel) -> MPoly:
    """``sum_j C_j^2 - sum_l E_l^2`` before any ring relations."""
    cap = max(ci.n, 2)
    p = MPoly.zero(ci.k, cap)
    for row in ci.pd.m_matrix:
        c = MPoly.linear(row, cap)
        p = p + c * c
    for row in ci.degrees:
        e = MPoly.linear(row, cap)
        p = p - e * e
    return p


def string_check(ci: CIModel) -> ObstructionReport:
    k = ci.k
    rest = ci.nonbasis_rows()
    d = ci.degrees
    offdiag = tuple(
        tuple(
            0 if i == l else sum(r[i] * r[l] for r in d) - sum(r[i] * r[l] for r in rest)
            for l in range(k)
        )
        for i in range(k)
    )
    diag = tuple(sum(r[i] ** 2 for r in d) - sum(r[i] ** 2 for r in rest) - 1 for i in range(k))
    parity = tuple((sum(r[i] for r in d) - sum(r[i] for r in rest) - 1) % 2 for i in range(k))
    return ObstructionReport(offdiag, diag, parity)


# -- genus pipeline ---------------------------------------------------------


def _compose_many(char: CharSeries, classes: Sequence[MPoly]) -> MPoly:
    """Product of ``char(c)`` over the classes, reusing repeated factors."""
    counts: dict[MPoly, int] = {}
    for c in classes:
        counts[c] = counts.get(c, 0) + 1
    order = char.q_order
    result = None
    for c, mult in counts.items():
        lifted = c.map_coeffs(lambda a: QSeries.constant(a, order))
        factor = compose_series(char.series, lifted) ** mult
        result = factor if result is None else result * factor
    return result


def genus_integrand(ci: CIModel, char: CharSeries) -> MPoly:
    """``prod_j char(C_j) * prod_l E_l / char(E_l)`` over QSeries coefficients."""
    order = char.q_order
    integrand = _compose_many(char, ci.divisor_classes())
    for e in ci.hypersurface_classes():
        lifted = e.map_coeffs(lambda a: QSeries.constant(a, order))
        integrand = integrand * compose_series(char.series, lifted).invert() * lifted
    return integrand


def witten_genus(ci: CIModel, N: int, seed: int = 0) -> QSeries:
    if N < 0:
        raise ValueError("q-order must be >= 0")
    integrand = genus_integrand(ci, witten_char_series(N, ci.n))
    return integrate(ci.fan, ci.pd, integrand, seed)


def ahat_genus(ci: CIModel, seed: int = 0) -> Fraction:
    integrand = genus_integrand(ci, ahat_char_series(ci.n))
    return integrate(ci.fan, ci.pd, integrand, seed)[0]


# -- definition-level oracle ------------------------------------------------


def _sinhc_half(cap: int) -> UniSeries:
    # sinh(x/2)/(x/2)
    return UniSeries(
        [Fraction(1, 2**i * math.factorial(i + 1)) if i % 2 == 0 else Fraction(0) for i in range(cap + 1)]
    )


def _cosh_scaled(a: int, cap: int) -> UniSeries:
    return UniSeries(
        [Fraction(a**i, math.factorial(i)) if i % 2 == 0 else Fraction(0) for i in range(cap + 1)]
    )


def witten_bundle_oracle(ci: CIModel, N: int, seed: int = 0) -> QSeries:
    """A-hat(TY) * Ch(Theta(T_C Y)) integrated over Y, straight from the definition.

    The virtual bundle ``T_C Y - C^{2 dim Y}`` has roots ``+-C_j`` minus
    ``+-E_l`` minus ``2r - 2s`` trivial lines, so its Adams operations have
    Chern character ``sum 2cosh(aC_j) - sum 2cosh(aE_l) - (2r - 2s)``.
    Symmetric powers come from Newton's identity ``i H_i = sum_a P_a H_{i-a}``.
    """
    if N < 0 or N > ORACLE_MAX_ORDER:
        raise ValueError(f"oracle supports q-order 0..{ORACLE_MAX_ORDER}, got {N}")
    n, k = ci.n, ci.k
    cs, es = ci.divisor_classes(), ci.hypersurface_classes()
    one = MPoly.constant(Fraction(1), k, n)
    rank_shift = 2 * len(cs) - 2 * len(es)

    power_sums = [None]
    for a in range(1, N + 1):
        p = MPoly.constant(Fraction(-rank_shift), k, n)
        ch = _cosh_scaled(a, n)
        for c in cs:
            p = p + compose_series(ch, c) * 2
        for e in es:
            p = p - compose_series(ch, e) * 2
        power_sums.append(p)
    sym = [one]
    for i in range(1, N + 1):
        acc = MPoly.zero(k, n)
        for a in range(1, i + 1):
            acc = acc + power_sums[a] * sym[i - a]
        sym.append(acc * Fraction(1, i))

    # Ch(Theta) as a list indexed by q-power
    theta_ch = [one] + [MPoly.zero(k, n) for _ in range(N)]
    for m in range(1, N + 1):
        factor = [one] + [MPoly.zero(k, n) for _ in range(N)]
        for i in range(1, N // m + 1):
            factor[m * i] = sym[i]
        theta_ch = [
            sum((theta_ch[a] * factor[b - a] for a in range(b + 1)), MPoly.zero(k, n))
            for b in range(N + 1)
        ]

    sinhc = _sinhc_half(n)
    ahat = one
    for c in cs:
        ahat = ahat * compose_series(sinhc, c).invert()
    for e in es:
        ahat = ahat * compose_series(sinhc, e) * e
    return QSeries([integrate(ci.fan, ci.pd, ahat * t, seed) for t in theta_ch])


# -- global residue demonstration -------------------------------------------


@dataclass
class ResidueReport:
    is_elliptic: bool
    ellipticity_deviation: float
    residue_sum: complex | None
    origin_residue: complex
    poles: list[complex]


def _integrand(ci: CIModel, tau: complex, numerator: Callable[[complex], complex] | None, terms: int):
    ms = [row[0] for row in ci.pd.m_matrix]
    ds = [row[0] for row in ci.degrees]
    tp = theta.theta_prime_zero(tau, terms)
    th = lambda v: theta.theta_eval_numeric(theta.ThetaKind.THETA, v, tau, terms)  # noqa: E731

    def f(h: complex) -> complex:
        if numerator is not None:
            g = numerator(h)
        else:
            g = 1 + 0j
            for d in ds:
                g *= th(d * h) / tp
        den = 1 + 0j
        for m in ms:
            den *= th(m * h) / tp
        return g / den

    return f, ms


def _circle_residue(f, center: complex, radius: float, points: int) -> complex:
    total = 0j
    for j in range(points):
        w = radius * cmath.exp(2j * math.pi * j / points)
        val = f(center + w)
        if not cmath.isfinite(val):
            raise ConditioningError(f"integrand not finite on contour around {center}")
        total += val * w
    return total / points


def residue_sum_demo(
    ci: CIModel,
    tau: complex,
    eps: float = 0.1,
    points: int = 256,
    numerator: Callable[[complex], complex] | None = None,
    terms: int = theta.DEFAULT_TERMS,
) -> ResidueReport:
    """Numerical double-periodicity check and residue sum over one period cell.

    Only Picard rank one is supported.  ``numerator`` replaces the
    hypersurface factor ``prod_l theta(d_l h)/theta'(0)`` when given.
    """
    if ci.k != 1:
        raise ModelError("rank_not_one", "residue demo needs Picard rank 1")
    tau = complex(tau)
    if tau.imag < 1:
        raise theta.DomainError(f"residue demo needs Im(tau) >= 1, got {tau}")
    f, ms = _integrand(ci, tau, numerator, terms)
    if any(m == 0 for m in ms):
        raise ModelError("degenerate_divisor", "a divisor class is zero; integrand undefined")

    base = -(1 + tau) / 2 + 0.0123 + 0.0071 * tau
    samples = [(0.137, 0.291), (0.613, 0.457), (0.389, 0.823), (0.851, 0.164)]
    deviation = 0.0
    for s, t in samples:
        h = base + s + t * tau
        fh = f(h)
        for omega in (1, tau):
            diff = abs(f(h + omega) - fh)
            scale = abs(fh)
            if scale == 0:
                dev = 0.0 if diff == 0 else math.inf
            else:
                dev = diff / scale
            deviation = max(deviation, dev)
    is_elliptic = deviation < 1e-6

    # candidate poles: h with m h in Z + Z tau, inside the shifted cell
    cells = set()
    for m in set(abs(m) for m in ms):
        for p in range(-m, m + 1):
            for q in range(-m, m + 1):
                sa, ta = Fraction(p, m), Fraction(q, m)
                if -0.5 + 0.0123 <= sa < 0.5 + 0.0123 and -0.5 + 0.0071 <= ta < 0.5 + 0.0071:
                    cells.add((sa, ta))
    poles = sorted(cells)
    pts = [float(a) + float(b) * tau for a, b in poles]
    spacing = min(
        (abs(x - y - o1 - o2 * tau) for x in pts for y in pts for o1 in (-1, 0, 1) for o2 in (-1, 0, 1)
         if not (x == y and o1 == 0 and o2 == 0)),
        default=1.0,
    )
    radius = min(eps, 0.45 * spacing)
    if radius < 1e-3:
        raise ConditioningError(f"poles too close together (spacing {spacing:.3g})")
    origin = _circle_residue(f, 0j, radius, points)
    total = None
    if is_elliptic:
        total = 0j
        for p in pts:
            total += origin if p == 0 else _circle_residue(f, p, radius, points)
    return ResidueReport(is_elliptic, deviation, total, origin, pts)


# -- full report ------------------------------------------------------------


def default_q_order(ci: CIModel) -> int:
    return DEFAULT_Q_ORDER_RANK1 if ci.k == 1 else DEFAULT_Q_ORDER


def genus_report(ci: CIModel, N: int | None = None, seed: int = 0, timings: bool = False) -> GenusReport:
    N = default_q_order(ci) if N is None else N
    t0 = time.perf_counter()
    wg = witten_genus(ci, N, seed)
    t1 = time.perf_counter()
    meta = {"q_order": N, "complex_dim_Y": ci.dim_y, "real_dim_divisible_by_4": ci.dim_y % 2 == 0}
    if timings:
        meta["seconds"] = round(t1 - t0, 6)
    return GenusReport(
        obstructions=string_check(ci),
        w2_poly=w2_Y(ci),
        p1_poly=p1_Y(ci),
        witten_genus=wg,
        ahat=wg[0],
        metadata=meta,
    )
