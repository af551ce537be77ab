import math
import random

import numpy as np
import pytest
from scipy import integrate

from hsos import audit, forms

from conftest import random_hermitian_form


# ---------------------------------------------------------------------------
# Laplacian power regularity
# ---------------------------------------------------------------------------

def test_laplacian_powers_inner_square():
    reports = audit.check_laplacian_powers(forms.inner_power(2, 2), samples=4000)
    by_name = {r.check_name: r for r in reports}
    # (Δ/4) <z,z>^2 = 6 <z,z>: the sampled max at j=1 is 6
    assert by_name["laplacian-power-j1"].lhs == pytest.approx(6.0, rel=1e-9)
    assert all(r.passed for r in reports)


def test_laplacian_power_j0_is_sup_bound():
    f = forms.fc_form(1)
    rep = audit.check_laplacian_powers(f, samples=4000)[0]
    assert rep.lhs <= forms.big_lambda(f) * (1 + 1e-12)


def test_laplacian_powers_zero_form():
    reports = audit.check_laplacian_powers(forms.HermitianForm.zero(2, 2), samples=64)
    assert all(r.passed for r in reports)
    assert all(r.lhs == 0.0 for r in reports)


def test_laplacian_powers_random_forms():
    rng = random.Random(40)
    for _ in range(10):
        f = random_hermitian_form(rng, rng.choice([2, 3]), rng.choice([1, 2, 3]))
        assert all(r.passed for r in audit.check_laplacian_powers(f, samples=2000))


# ---------------------------------------------------------------------------
# radial identity
# ---------------------------------------------------------------------------

def test_radial_I1_trivial_cases():
    assert audit.radial_I1(0.1, 0, 3).rhs == 1.0
    for M in (0, 3, 17):
        rep = audit.radial_I1(0.5, M, 1)
        assert rep.rhs == 1.0 and rep.passed


def test_radial_I1_example():
    rep = audit.radial_I1(0.01, 10, 3)
    assert rep.rhs == 66.0
    assert rep.passed


def test_radial_I1_h_independent():
    a = audit.radial_I1(0.001, 7, 4)
    b = audit.radial_I1(1.7, 7, 4)
    assert a.lhs == b.lhs


# ---------------------------------------------------------------------------
# tail bounds
# ---------------------------------------------------------------------------

def test_tail_J_grid_point():
    rep = audit.tail_J(50, 0.2)
    assert rep.passed
    assert 0 < rep.ratio  # calibration ratio reported


def test_tail_J_delta_near_one():
    rep = audit.tail_J(10, 0.999)
    assert rep.passed
    assert rep.lhs >= 0.0


def test_tail_delta_grid():
    rep = audit.tail_delta_inequality(99)
    assert rep.passed and rep.lhs <= 0.0


def test_tail_J_rejects_bad_inputs():
    with pytest.raises(ValueError):
        audit.tail_J(-1, 0.5)
    with pytest.raises(ValueError):
        audit.tail_J(5, 1.5)


# ---------------------------------------------------------------------------
# localization quantity
# ---------------------------------------------------------------------------

def test_exact_E_k0_is_subunit():
    for h, M, n in [(0.01, 100, 2), (0.005, 205, 3), (1 / 640, 642, 2)]:
        eps = audit.default_epsilon(h)
        val = audit.exact_localization_E(h, M, 0, eps, n)
        assert 0.0 <= val <= 1.0


def test_exact_E_against_direct_quadrature():
    # independent route: numerically integrate the exterior radial integral
    h, M, k, eps, n = 0.05, 21, 2, 0.4, 2
    a = M + k + n

    def integrand(t):
        return t ** (a - 1) * math.exp(-t)

    lo, hi = (1 - eps) / h, (1 + eps) / h
    left, _ = integrate.quad(integrand, 0, lo, limit=300)
    right, _ = integrate.quad(integrand, hi, a + 60 * math.sqrt(a), limit=300)
    expected_sq = h**k * (left + right) / math.gamma(M + n)
    got = audit.exact_localization_E(h, M, k, eps, n) ** 2
    assert got == pytest.approx(expected_sq, rel=1e-9)


def test_exact_E_decays_with_shrinking_h():
    n, m = 2, 2
    values = []
    for N in (160, 640, 2560, 40960):
        h = 1.0 / N
        values.append(audit.exact_localization_E(h, N + m, m, audit.default_epsilon(h), n))
    assert values == sorted(values, reverse=True)
    assert values[-1] < 1e-3


def test_localization_report_in_window():
    h = 1 / 320
    params = audit.RegimeParams(h=h, N=320, m=2, n=2, epsilon=audit.default_epsilon(h))
    for k in range(3):
        rep = audit.localization_report(params, k)
        assert rep.passed
        assert rep.ratio < 1.0  # far below the packaged bound at these scales


def test_localization_report_window_violation():
    params = audit.RegimeParams(h=0.2, N=5, m=2, n=2, epsilon=0.5)
    with pytest.raises(audit.WindowViolated):
        audit.localization_report(params, 2)


def test_mc_localization_small():
    rep = audit.mc_localization_check(2, 6, 2, h=1 / 6, epsilon=0.3, samples=200_000, seed=11)
    assert rep.passed


def test_mc_localization_n1():
    rep = audit.mc_localization_check(1, 5, 1, h=0.2, epsilon=0.4, samples=200_000, seed=12)
    assert rep.passed


# ---------------------------------------------------------------------------
# sigma window
# ---------------------------------------------------------------------------

def _params_for_sigma(sigma: float, eps: float, m: int = 2, n: int = 2, N: int = 1000):
    M = N + m
    return audit.RegimeParams(h=sigma / (M + m + n - 1), N=N, m=m, n=n, epsilon=eps)


def test_sigma_window_verdicts():
    assert audit.check_sigma_window(_params_for_sigma(1.0 + 1e-9, 0.5)).passed
    assert audit.check_sigma_window(_params_for_sigma(1.2, 0.9)).passed
    assert not audit.check_sigma_window(_params_for_sigma(1.5 - 1e-9, 1.0)).passed
    assert not audit.check_sigma_window(_params_for_sigma(1.6, 1.0)).passed


def test_sigma_window_epsilon_floor():
    # epsilon below 4(sigma - 1) is inadmissible
    assert not audit.check_sigma_window(_params_for_sigma(1.2, 0.5)).passed


# ---------------------------------------------------------------------------
# basic inequality and threshold scan
# ---------------------------------------------------------------------------

def test_basic_rhs_positive_at_small_h():
    f = forms.fc_form(1)
    h = 1 / 1024
    params = audit.RegimeParams(h=h, N=1024, m=2, n=2, epsilon=audit.default_epsilon(h))
    value, rep = audit.basic_rhs(f, params, lambda_value=0.25, big_lambda_value=1.5)
    assert value > 0
    assert rep.passed  # sampled annulus min dominates the explicit floor
    assert value < 0.25  # RHS can never exceed lambda


def test_basic_rhs_approaches_lambda():
    f = forms.fc_form(1)
    vals = []
    for N in (1024, 8192, 65536):
        h = 1.0 / N
        params = audit.RegimeParams(h=h, N=N, m=2, n=2, epsilon=audit.default_epsilon(h))
        value, _ = audit.basic_rhs(f, params, lambda_value=0.25, big_lambda_value=1.5)
        vals.append(value)
    assert vals == sorted(vals)
    assert vals[-1] > 0.2


def test_basic_rhs_zero_form():
    z = forms.HermitianForm.zero(2, 2)
    h = 1 / 1024
    params = audit.RegimeParams(h=h, N=1024, m=2, n=2, epsilon=audit.default_epsilon(h))
    value, rep = audit.basic_rhs(z, params, lambda_value=0.0, big_lambda_value=0.0)
    assert value == 0.0 and rep.passed


def test_basic_rhs_two_eps_factor():
    # with Λ = 0 the RHS reduces to (1 - E0) λ (1-2ε)^m; at ε = 1/4 the factor is 2^-m
    f = forms.inner_power(2, 2)
    h, N = 1 / 4096, 4096
    params = audit.RegimeParams(h=h, N=N, m=2, n=2, epsilon=0.25)
    value, _ = audit.basic_rhs(f, params, lambda_value=1.0, big_lambda_value=0.0)
    e0 = audit.exact_localization_E(h, N + 2, 0, 0.25, 2)
    assert value == pytest.approx((1 - e0) * 0.25, rel=1e-12)


def test_basic_rhs_window_enforced():
    f = forms.fc_form(1)
    params = audit.RegimeParams(h=0.2, N=5, m=2, n=2, epsilon=0.58)
    with pytest.raises(audit.WindowViolated):
        audit.basic_rhs(f, params, lambda_value=0.25, big_lambda_value=1.5)


def test_empirical_h0_fc1():
    scan = audit.empirical_h0(forms.fc_form(1), lambda_value=0.25, big_lambda_value=1.5)
    assert scan.found
    assert scan.implied_N >= 1  # dominates the empirical minimal shift (= 1)
    assert scan.h0 == pytest.approx(1 / 640)


def test_empirical_h0_easier_for_constant_form():
    f = forms.inner_power(2, 2)
    scan_ip = audit.empirical_h0(
        f, lambda_value=1.0, big_lambda_value=forms.big_lambda(f)
    )
    scan_fc = audit.empirical_h0(forms.fc_form(1), lambda_value=0.25, big_lambda_value=1.5)
    assert scan_ip.found and scan_fc.found
    # lambda comparable to Lambda admits a larger threshold
    assert scan_ip.h0 >= scan_fc.h0


def test_empirical_h0_nonpositive_lambda():
    scan = audit.empirical_h0(forms.fc_form(2), lambda_value=0.0, big_lambda_value=1.5)
    assert not scan.found
    assert scan.h0 is None and scan.implied_N is None
    assert "lambda" in scan.note


def test_unit_sphere_samples_deterministic():
    a = audit.unit_sphere_samples(2, 100)
    b = audit.unit_sphere_samples(2, 100)
    assert np.array_equal(a, b)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
