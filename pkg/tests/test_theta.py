import cmath
import math
from fractions import Fraction

import pytest

from oracles import sympy_char_coeffs
from witgen.theta import (
    DomainError,
    ThetaKind,
    ahat_char_series,
    jacobi_identity_residual,
    theta_eval_numeric,
    theta_prime_zero,
    theta_prime_zero_fd,
    translation_law_residual,
    witten_char_series,
    witten_quotient_numeric,
)

TAUS = [1j, 2j, 0.5 + 1j]


def nome(tau):
    return cmath.exp(2j * math.pi * tau)


def test_witten_series_leading_coefficients():
    w = witten_char_series(4, 6)
    assert w.coefficient(0, 0) == 1
    assert w.coefficient(2, 0) == Fraction(-1, 24)
    assert w.coefficient(2, 1) == 1
    assert all(w.coefficient(0, j) == 0 for j in range(1, 5))


def test_witten_series_matches_symbolic_expansion():
    w = witten_char_series(2, 4)
    expected = sympy_char_coeffs(2, 4)
    for (i, j), c in expected.items():
        assert w.coefficient(i, j) == c, (i, j)


@pytest.mark.parametrize("N,D", [(0, 6), (3, 8), (8, 12)])
def test_witten_series_is_even(N, D):
    w = witten_char_series(N, D)
    for i in range(1, D + 1, 2):
        assert w.series[i].is_zero()
    assert w.series.is_even


def test_ahat_coefficients():
    a = ahat_char_series(6)
    assert a.q0_slice()[:5] == [1, 0, Fraction(-1, 24), 0, Fraction(7, 5760)]


@pytest.mark.parametrize("D", [0, 4, 10])
def test_witten_q0_slice_is_ahat(D):
    assert witten_char_series(5, D).q0_slice() == ahat_char_series(D).q0_slice()


@pytest.mark.parametrize("x0", [0.1, 0.35 - 0.2j, -0.8])
@pytest.mark.parametrize("tau", [1j, 2j, 0.5 + 1j])
def test_exact_series_matches_theta_quotient(x0, tau):
    w = witten_char_series(12, 24)
    exact = w.evaluate(x0, nome(tau))
    assert abs(exact - witten_quotient_numeric(x0, tau)) < 1e-8


def test_theta_vanishes_at_origin():
    for tau in TAUS:
        assert theta_eval_numeric(ThetaKind.THETA, 0, tau) == 0


def test_theta_odd_period():
    v, tau = 0.3 + 0.1j, 2j
    total = theta_eval_numeric(ThetaKind.THETA, v + 1, tau, 40) + theta_eval_numeric(ThetaKind.THETA, v, tau, 40)
    assert abs(total) < 1e-9


@pytest.mark.parametrize("tau", TAUS)
def test_jacobi_identity(tau):
    assert jacobi_identity_residual(tau) < 1e-9


@pytest.mark.parametrize("tau", TAUS)
def test_theta_prime_product_matches_finite_difference(tau):
    assert abs(theta_prime_zero(tau) - theta_prime_zero_fd(tau)) < 1e-7


@pytest.mark.parametrize("kind", list(ThetaKind))
@pytest.mark.parametrize("tau", TAUS)
@pytest.mark.parametrize("m,n", [(m, n) for m in (-1, 0, 1) for n in (-1, 0, 1)])
def test_translation_laws(kind, tau, m, n):
    for v in (0.3 + 0.1j, 0.2, -0.17 + 0.05j):
        assert translation_law_residual(kind, v, tau, m, n) < 1e-9


def test_translation_examples():
    assert translation_law_residual(ThetaKind.THETA, 0.41 - 0.07j, 1j, 1, 0) < 1e-9
    assert translation_law_residual(ThetaKind.THETA2, 0.41 - 0.07j, 1j, 1, 0) < 1e-9
    assert translation_law_residual(ThetaKind.THETA, 0.2, 1.5j, 0, 1) < 1e-9


def test_wrong_factor_is_detected():
    # theta2 is even under v -> v + 1 but theta is odd; swapping must fail
    v, tau = 0.3 + 0.1j, 1j
    a = theta_eval_numeric(ThetaKind.THETA2, v + 1, tau)
    b = theta_eval_numeric(ThetaKind.THETA2, v, tau)
    assert abs(a + b) > 1e-3


def test_domain_error():
    with pytest.raises(DomainError):
        theta_eval_numeric(ThetaKind.THETA, 0.1, -1j)
    with pytest.raises(DomainError):
        translation_law_residual(ThetaKind.THETA1, 0.1, 0.3, 1, 0)
