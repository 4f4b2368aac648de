"""Smooth complete toric fans: validation, Picard data, and integration.

Integration is done by torus localization.  For a maximal cone ``sigma`` the
fixed point is where the equivariant divisors of the rays *outside* sigma
vanish; solving those ``k`` linear equations gives the restriction of the
basis classes ``h``, and the rays inside sigma contribute the tangent
weights.  Monomials of total degree ``n`` integrate to a number independent
of the equivariant parameters, so no limit has to be taken.
"""

from __future__ import annotations

import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Sequence

from .ringcore import MPoly, QSeries, monomials

log = logging.getLogger(__name__)

LAMBDA_RANGE = 10_000


class FanValidationError(ValueError):
    """Fan fails a structural, smoothness or completeness check.

    ``code`` is a stable machine-readable tag.
    """

    def __init__(self, code: str, message: str, **detail):
        super().__init__(message)
        self.code = code
        self.detail = detail


class NonGenericError(ValueError):
    """Equivariant parameters hit a singular fixed-point system or zero weight."""


class InconsistencyError(RuntimeError):
    """Two computations that must agree did not."""


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in u) for u in self.rays))
        object.__setattr__(
            self, "max_cones", tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones)
        )

    @property
    def r(self) -> int:
        return len(self.rays)


@dataclass(frozen=True)
class PicardData:
    """Basis of Pic and the expansion ``D_j = sum_i m[j][i] h_i``.

    ``m_matrix`` is indexed by the original ray order.  ``reorder_map[p]`` is
    the original index of the ray placed at position ``p`` when the basis rays
    are moved to the front.
    """

    k: int
    basis_rays: tuple[int, ...]
    m_matrix: tuple[tuple[int, ...], ...]
    reorder_map: tuple[int, ...]

    def reordered_m(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.m_matrix[j] for j in self.reorder_map)


@dataclass(frozen=True)
class IntersectionTable:
    n: int
    k: int
    values: dict = field(hash=False, compare=True)

    def __getitem__(self, alpha) -> Fraction:
        return self.values[tuple(alpha)]


# -- exact linear algebra ---------------------------------------------------


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for c in range(n - 1):
        if a[c][c] == 0:
            for r in range(c + 1, n):
                if a[r][c] != 0:
                    a[c], a[r] = a[r], a[c]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                a[r][j] = (a[r][j] * a[c][c] - a[r][c] * a[c][j]) // prev
        prev = a[c][c]
    return sign * a[-1][-1]


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Gaussian elimination over Q; ``None`` if singular."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[i][n] / a[i][i] for i in range(n)]


def _inverse_int(matrix: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    n = len(matrix)
    cols = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        col = solve(matrix, e)
        if col is None:
            raise InconsistencyError("matrix expected invertible")
        cols.append(col)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# -- validation -------------------------------------------------------------


def validate_fan(fan: Fan, seed: int = 0, n_directions: int = 200) -> Fan:
    n, r = fan.dim, fan.r
    if n < 1:
        raise FanValidationError("bad_dim", "fan dimension must be >= 1")
    seen = {}
    for j, u in enumerate(fan.rays):
        if len(u) != n:
            raise FanValidationError("bad_ray", f"ray {j} has length {len(u)}, expected {n}", ray=j)
        g = 0
        for x in u:
            g = gcd(g, x)
        if g != 1:
            raise FanValidationError("non_primitive_ray", f"ray {j}={u} is not primitive", ray=j)
        if u in seen:
            raise FanValidationError("duplicate_ray", f"rays {seen[u]} and {j} coincide", ray=j)
        seen[u] = j
    if not fan.max_cones:
        raise FanValidationError("bad_cone", "fan has no maximal cones")
    cone_set = set()
    for c_idx, cone in enumerate(fan.max_cones):
        if len(cone) != n or len(set(cone)) != n:
            raise FanValidationError(
                "bad_cone", f"cone {c_idx} must list {n} distinct rays", cone=c_idx
            )
        if any(i < 0 or i >= r for i in cone):
            raise FanValidationError("bad_cone", f"cone {c_idx} references a missing ray", cone=c_idx)
        if cone in cone_set:
            raise FanValidationError("bad_cone", f"cone {c_idx} is listed twice", cone=c_idx)
        cone_set.add(cone)
        d = det_int([fan.rays[i] for i in cone])
        if abs(d) != 1:
            raise FanValidationError(
                "non_unimodular", f"cone {c_idx} has determinant {d}", cone=c_idx, det=d
            )
    used = set(i for c in fan.max_cones for i in c)
    if len(used) != r:
        missing = sorted(set(range(r)) - used)
        raise FanValidationError("unused_ray", f"rays {missing} lie in no maximal cone", rays=missing)

    facets: dict[tuple[int, ...], int] = {}
    for cone in fan.max_cones:
        for facet in combinations(cone, n - 1):
            facets[facet] = facets.get(facet, 0) + 1
    for facet, count in facets.items():
        if count != 2:
            raise FanValidationError(
                "facet_pairing",
                f"facet {list(facet)} lies in {count} maximal cone(s), expected 2",
                facet=list(facet),
                count=count,
            )

    rng = random.Random(seed)
    inverses = [_inverse_int([fan.rays[i] for i in cone]) for cone in fan.max_cones]
    checked = 0
    while checked < n_directions:
        x = [rng.randint(-10**6, 10**6) for _ in range(n)]
        coords = []
        for inv in inverses:
            # x = sum_i c_i u_i  <=>  c = x * U^{-1} with rays as rows of U
            coords.append([sum(x[a] * inv[a][b] for a in range(n)) for b in range(n)])
        if any(c == 0 for cs in coords for c in cs):
            continue
        hits = sum(all(c > 0 for c in cs) for cs in coords)
        if hits != 1:
            raise FanValidationError(
                "coverage", f"direction {x} lies in {hits} maximal cones", direction=x, hits=hits
            )
        checked += 1
    return fan


# -- Picard data ------------------------------------------------------------


def picard_data(fan: Fan) -> PicardData:
    """Express every invariant divisor in a basis of Pic.

    The basis is the complement of a maximal cone (those rays' classes form a
    Z-basis on a smooth fan); among all maximal cones the lexicographically
    smallest complement is used.
    """
    n, r = fan.dim, fan.r
    k = r - n
    complements = sorted(tuple(j for j in range(r) if j not in cone) for cone in fan.max_cones)
    basis = complements[0]
    sigma = [j for j in range(r) if j not in basis]
    # relations: for each lattice direction t, sum_j u_j[t] D_j = 0.
    # D_sigma = -(U_sigma^T)^{-1} U_basis^T D_basis
    ut_sigma = [[fan.rays[j][t] for j in sigma] for t in range(n)]
    inv = _inverse_int(ut_sigma)
    m = [[0] * k for _ in range(r)]
    for i, b in enumerate(basis):
        m[b][i] = 1
    for a, j in enumerate(sigma):
        for i, b in enumerate(basis):
            val = -sum(inv[a][t] * fan.rays[b][t] for t in range(n))
            if val.denominator != 1:
                raise InconsistencyError(f"non-integral divisor class for ray {j}")
            m[j][i] = int(val)
    pd = PicardData(
        k=k,
        basis_rays=tuple(basis),
        m_matrix=tuple(tuple(row) for row in m),
        reorder_map=tuple(list(basis) + sigma),
    )
    for t in range(n):
        for i in range(k):
            if sum(fan.rays[j][t] * m[j][i] for j in range(r)) != 0:
                raise InconsistencyError("linear relations do not annihilate divisor classes")
    return pd


# -- localization -----------------------------------------------------------


def sample_lambda(r: int, rng: random.Random) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(-LAMBDA_RANGE, LAMBDA_RANGE)) for _ in range(r))


def _complement_system(pd: PicardData, cone: Sequence[int]) -> list[int]:
    return [j for j in range(len(pd.m_matrix)) if j not in cone]


def fixed_point_restriction(
    fan: Fan, pd: PicardData, cone: Sequence[int], lam: Sequence
) -> tuple[Fraction, ...]:
    """Values of ``h_1..h_k`` at the fixed point of ``cone``.

    Solves ``sum_i m[j][i] h_i = lambda_j`` for the rays ``j`` not in the cone.
    """
    rows = _complement_system(pd, cone)
    sol = solve([pd.m_matrix[j] for j in rows], [lam[j] for j in rows])
    if sol is None:
        raise NonGenericError(f"singular fixed-point system for cone {tuple(cone)}")
    return tuple(sol)


def tangent_weights(pd: PicardData, cone: Sequence[int], h: Sequence, lam: Sequence) -> list[Fraction]:
    return [sum(c * x for c, x in zip(pd.m_matrix[j], h)) - lam[j] for j in cone]


def complement_determinant(pd: PicardData, cone: Sequence[int]) -> int:
    return det_int([pd.m_matrix[j] for j in _complement_system(pd, cone)])


def fixed_point_data(fan: Fan, pd: PicardData, lam: Sequence) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """Per max cone: the restriction ``h(sigma)`` and ``1/(|det| * prod weights)``."""
    out = []
    for cone in fan.max_cones:
        h = fixed_point_restriction(fan, pd, cone, lam)
        ws = tangent_weights(pd, cone, h, lam)
        denom = Fraction(abs(complement_determinant(pd, cone)))
        for w in ws:
            if w == 0:
                raise NonGenericError(f"zero tangent weight at cone {cone}")
            denom *= w
        out.append((h, 1 / denom))
    return out


def _monomial_sum(data, alpha) -> Fraction:
    total = Fraction(0)
    for h, weight in data:
        val = weight
        for x, a in zip(h, alpha):
            if a:
                val *= x**a
        total += val
    return total


def integrate_monomial(fan: Fan, pd: PicardData, alpha: Sequence[int], lam: Sequence) -> Fraction:
    if sum(alpha) != fan.dim:
        raise ValueError(f"monomial degree {sum(alpha)} != dimension {fan.dim}")
    return _monomial_sum(fixed_point_data(fan, pd, lam), tuple(alpha))


def _generic_data(fan: Fan, pd: PicardData, rng: random.Random):
    for _ in range(100):
        lam = sample_lambda(fan.r, rng)
        try:
            return lam, fixed_point_data(fan, pd, lam)
        except NonGenericError:
            continue
    raise InconsistencyError("could not find generic equivariant parameters")


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WITGEN_THREADS", "1")))
    except ValueError:
        return 1


def _table_from_data(data, alphas, workers: int) -> list[Fraction]:
    if workers > 1 and len(alphas) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_monomial_sum, [data] * len(alphas), alphas))
    return [_monomial_sum(data, a) for a in alphas]


@lru_cache(maxsize=64)
def intersection_table(fan: Fan, pd: PicardData, seed: int = 0) -> IntersectionTable:
    """All top-degree intersection numbers, cross-checked at two parameter choices."""
    rng = random.Random(seed)
    alphas = monomials(pd.k, fan.dim)
    workers = worker_count()
    _, data_a = _generic_data(fan, pd, rng)
    _, data_b = _generic_data(fan, pd, rng)
    first = _table_from_data(data_a, alphas, workers)
    second = _table_from_data(data_b, alphas, workers)
    for alpha, x, y in zip(alphas, first, second):
        if x != y:
            raise InconsistencyError(f"localization disagrees at {alpha}: {x} vs {y}")
    log.debug("intersection table: %d monomials, %d fixed points", len(alphas), len(data_a))
    return IntersectionTable(n=fan.dim, k=pd.k, values=dict(zip(alphas, first)))


def integrate(fan: Fan, pd: PicardData, p: MPoly, seed: int = 0):
    """Pair a class with the fundamental class; only degree-``n`` terms count."""
    table = intersection_table(fan, pd, seed)
    n = fan.dim
    total = None
    for exp, c in p.items():
        if sum(exp) != n:
            continue
        v = table[exp]
        if v == 0:
            continue
        t = c * v
        total = t if total is None else total + t
    if total is None:
        sample = next(iter(p.terms.values()), None)
        return QSeries.zero(sample.order) if isinstance(sample, QSeries) else Fraction(0)
    return total


# -- builtin spaces ---------------------------------------------------------


def projective_space(n: int) -> Fan:
    if n < 1:
        raise ValueError("projective space needs n >= 1")
    rays = [tuple(int(i == t) for t in range(n)) for i in range(n)]
    rays.append(tuple([-1] * n))
    cones = [tuple(j for j in range(n + 1) if j != omit) for omit in range(n + 1)]
    return Fan(n, tuple(rays), tuple(cones))


def product_fan(a: Fan, b: Fan) -> Fan:
    rays = [u + (0,) * b.dim for u in a.rays] + [(0,) * a.dim + v for v in b.rays]
    cones = [ca + tuple(a.r + i for i in cb) for ca in a.max_cones for cb in b.max_cones]
    return Fan(a.dim + b.dim, tuple(rays), tuple(cones))


def product_projective(dims: Sequence[int]) -> tuple[Fan, PicardData]:
    """``P^{n_1} x ... x P^{n_t}`` with its block m-matrix built directly."""
    if not dims:
        raise ValueError("need at least one factor")
    fan = projective_space(dims[0])
    for d in dims[1:]:
        fan = product_fan(fan, projective_space(d))
    t = len(dims)
    m, basis, offset = [], [], 0
    for i, d in enumerate(dims):
        basis.append(offset)
        m.extend(tuple(int(c == i) for c in range(t)) for _ in range(d + 1))
        offset += d + 1
    others = [j for j in range(fan.r) if j not in basis]
    return fan, PicardData(t, tuple(basis), tuple(m), tuple(basis + others))


def hirzebruch(a: int) -> Fan:
    rays = ((1, 0), (0, 1), (-1, a), (0, -1))
    cones = ((0, 1), (1, 2), (2, 3), (3, 0))
    return Fan(2, rays, cones)
