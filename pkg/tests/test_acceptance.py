"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (lines are printed even without ``-s``)
or ``python tests/test_acceptance.py`` for the summary alone.
"""

import cmath
import math
import random
import sys
import time
from fractions import Fraction

import pytest

from oracles import multinomial_table, snf_m_matrix
from witgen.genus import CIModel, residue_sum_demo, string_check, witten_bundle_oracle, witten_genus
from witgen.ringcore import QSeries
from witgen.theta import (
    ThetaKind,
    jacobi_identity_residual,
    theta_eval_numeric,
    theta_prime_zero,
    translation_law_residual,
    witten_char_series,
)
from witgen.toric import (
    hirzebruch,
    integrate_monomial,
    intersection_table,
    picard_data,
    product_fan,
    product_projective,
    projective_space,
    sample_lambda,
)


def proj(n, degrees=()):
    fan = projective_space(n)
    return CIModel(fan, picard_data(fan), degrees)


def prod(dims, degrees=()):
    fan, pd = product_projective(dims)
    return CIModel(fan, pd, degrees)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def _is_exact_zero(series):
    return all(isinstance(c, Fraction) and c == 0 for c in series)


# 1 -------------------------------------------------------------------------


def test_criterion_01_quadric_vanishes(report):
    intersection_table.cache_clear()
    start = time.perf_counter()
    ci = proj(3, [[2]])
    certified = string_check(ci).string_certified
    w = witten_genus(ci, 8)
    elapsed = time.perf_counter() - start
    ok = certified and len(w) == 9 and _is_exact_zero(w) and elapsed < 60
    report(1, ok, f"quadric in P3: certified={certified}, coeffs q^0..q^8={list(map(str, w))}, {elapsed:.2f}s < 60s")


# 2 -------------------------------------------------------------------------


def test_criterion_02_p3xp3_vanishes(report):
    ci = prod([3, 3], [[2, 0], [0, 2]])
    certified = string_check(ci).string_certified
    w = witten_genus(ci, 4)
    ok = certified and len(w) == 5 and _is_exact_zero(w)
    report(2, ok, f"P3xP3 rows (2,0),(0,2): certified={certified}, exact zero through q^4={_is_exact_zero(w)}")


# 3 -------------------------------------------------------------------------


def test_criterion_03_two_quadrics_in_p7(report):
    ci = proj(7, [[2], [2]])
    obs = string_check(ci)
    w = witten_genus(ci, 4)
    ok = obs.diag == (0,) and obs.string_certified and len(w) == 5 and _is_exact_zero(w)
    report(3, ok, f"two quadrics in P7: delta={obs.diag[0]}, exact zero through q^4={_is_exact_zero(w)}")


# 4 -------------------------------------------------------------------------


def test_criterion_04_quartic_control(report):
    ci = proj(3, [[4]])
    obs = string_check(ci)
    w = witten_genus(ci, 4)
    ok = (not obs.string_certified) and obs.diag == (12,) and w[0] == 2 and not w.is_zero()
    report(4, ok, f"quartic: verdict={obs.verdict}, delta={obs.diag[0]}, q^0={w[0]}, series={list(map(str, w))}")


# 5 -------------------------------------------------------------------------


def test_criterion_05_localization(report):
    cases = {
        "P3": ([3], projective_space(3)),
        "P2xP1": ([2, 1], product_fan(projective_space(2), projective_space(1))),
        "P1xP1xP1": ([1, 1, 1], product_fan(product_fan(projective_space(1), projective_space(1)), projective_space(1))),
    }
    failures = []
    for name, (dims, fan) in cases.items():
        pd = picard_data(fan)
        expected = multinomial_table(dims)
        tables = [intersection_table.__wrapped__(fan, pd, seed) for seed in range(5)]
        if any(t.values != expected for t in tables):
            failures.append(f"{name}: table mismatch")
        if any(v.denominator != 1 for t in tables for v in t.values.values()):
            failures.append(f"{name}: non-integral entry")
        rng = random.Random(2024)
        for _ in range(5):
            lam = sample_lambda(fan.r, rng)
            if any(integrate_monomial(fan, pd, a, lam) != v for a, v in expected.items()):
                failures.append(f"{name}: lambda dependence")
                break
    report(5, not failures, "P3, P2xP1, P1xP1xP1 vs multinomial oracle, 5 seeds + 5 raw lambdas" + (
        f" -- {failures}" if failures else ""))


# 6 -------------------------------------------------------------------------


def test_criterion_06_theta_identities(report):
    worst = 0.0
    samples = (0.3 + 0.1j, 0.2, -0.17 + 0.05j, 0.41 - 0.07j)
    for tau in (1j, 2j, 0.5 + 1j):
        worst = max(worst, jacobi_identity_residual(tau))
        for kind in ThetaKind:
            for m in (-1, 0, 1):
                for n in (-1, 0, 1):
                    for v in samples:
                        worst = max(worst, translation_law_residual(kind, v, tau, m, n))
    report(6, worst < 1e-9, f"Jacobi + translation laws, 4 kinds, (m,n) in {{-1,0,1}}^2: max residual {worst:.2e} < 1e-9")


# 7 -------------------------------------------------------------------------


def test_criterion_07_normalization(report):
    x0, tau = 0.1, 2j
    q = cmath.exp(2j * math.pi * tau)
    w = witten_char_series(12, 24)
    exact = w.evaluate(x0, q)
    v = x0 / (2j * math.pi)
    oracle = v * theta_prime_zero(tau) / theta_eval_numeric(ThetaKind.THETA, v, tau)
    # the criterion's literal form x0*theta'(0)/theta(v) equals 2*pi*i times this
    literal = x0 * theta_prime_zero(tau) / theta_eval_numeric(ThetaKind.THETA, v, tau)
    literal_ratio_ok = abs(literal / oracle - 2j * math.pi) < 1e-8
    slice_ = w.q0_slice()
    slice_ok = slice_[2] == Fraction(-1, 24) and slice_[4] == Fraction(7, 5760)
    err = abs(exact - oracle)
    ok = err < 1e-8 and slice_ok and literal_ratio_ok
    report(7, ok, f"|series - v*theta'(0)/theta(v)| = {err:.2e} < 1e-8 at x0=0.1, tau=2i; "
                  f"q^0 slice x^2={slice_[2]}, x^4={slice_[4]}")


# 8 -------------------------------------------------------------------------


def test_criterion_08_bundle_oracle(report):
    rows = []
    ok = True
    for name, ci in (("P2", proj(2)), ("quartic", proj(3, [[4]])), ("quadric", proj(3, [[2]]))):
        w = witten_genus(ci, 1)
        o = witten_bundle_oracle(ci, 1)
        same = list(w) == list(o)
        ok = ok and same
        rows.append(f"{name} {list(map(str, w))}=={list(map(str, o))}:{same}")
    report(8, ok, "; ".join(rows))


# 9 -------------------------------------------------------------------------


def test_criterion_09_picard_extraction(report):
    failures = []
    for a in (1, 2):
        fan = hirzebruch(a)
        pd = picard_data(fan)
        if pd.m_matrix != snf_m_matrix(fan.rays, pd.basis_rays):
            failures.append(f"F{a}")
    for n in (1, 2, 3, 4, 7):
        pd = picard_data(projective_space(n))
        if pd.m_matrix != ((1,),) * (n + 1):
            failures.append(f"P{n}")
    for dims in ([3, 3], [2, 1], [1, 1, 1], [1, 2, 3]):
        fan, pd = product_projective(dims)
        block = [tuple(int(t == i) for t in range(len(dims))) for i, d in enumerate(dims) for _ in range(d + 1)]
        if sorted(pd.m_matrix) != sorted(block) or picard_data(fan) != pd:
            failures.append(f"product {dims}")
        if pd.m_matrix != snf_m_matrix(fan.rays, pd.basis_rays):
            failures.append(f"product {dims} snf")
    report(9, not failures, "F1, F2 vs SNF; P^n and product block matrices" + (f" -- {failures}" if failures else ""))


# 10 ------------------------------------------------------------------------


def test_criterion_10_residue_demo(report):
    quad = residue_sum_demo(proj(3, [[2]]), 2j)
    quart = residue_sum_demo(proj(3, [[4]]), 2j)
    quad_ok = quad.ellipticity_deviation < 1e-6 and quad.residue_sum is not None and abs(quad.residue_sum) < 1e-6
    quart_ok = quart.ellipticity_deviation > 1e-2
    quad_sum = abs(quad.residue_sum) if quad.residue_sum is not None else float("nan")
    report(10, quad_ok and quart_ok,
           f"quadric deviation {quad.ellipticity_deviation:.2e}, |sum| {quad_sum:.2e}; "
           f"quartic deviation {quart.ellipticity_deviation:.2e} > 1e-2")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
