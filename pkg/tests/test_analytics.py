import math

import numpy as np
import pytest

from ssopt.analytics import (Analytics, AnalyticsContext, PiecewiseLinearKernel, QuadratureConfig, QuadratureKernel,
                             QuadraticKernel, RelativeValue)
from ssopt.errors import KinkError

from conftest import ABS, LN2, SQUARE, constant, make_instance


def g0_abs(z):
    return z + 1.0 if z >= 0 else -z - 1.0 + 2.0 * math.exp(z)


def g0_square(z):
    return z * z + 2.0 * z + 2.0


@pytest.fixture
def simpson_a(instance_a):
    return Analytics(AnalyticsContext(instance_a, QuadratureConfig('simpson')))


@pytest.fixture
def simpson_b(instance_b):
    return Analytics(AnalyticsContext(instance_b, QuadratureConfig('simpson')))


def test_kernel_selection(analytics_a, analytics_b, simpson_a):
    assert isinstance(analytics_a.kernel, PiecewiseLinearKernel)
    assert isinstance(analytics_b.kernel, QuadraticKernel)
    assert isinstance(simpson_a.kernel, QuadratureKernel)


@pytest.mark.parametrize('z', [-3.0, -1.0, -0.5, 0.0, 0.7, 2.0])
def test_g0_closed_forms(analytics_a, analytics_b, z):
    assert analytics_a.g0(z) == pytest.approx(g0_abs(z), abs=1e-12)
    assert analytics_b.g0(z) == pytest.approx(g0_square(z), abs=1e-12)


def test_g0_values(analytics_a, analytics_b):
    assert analytics_a.g0(0.0) == pytest.approx(1.0)
    assert analytics_b.g0(-4.0) == pytest.approx(10.0)
    np.testing.assert_allclose(analytics_b.g0(np.array([-1.0, 2.0])), [1.0, 10.0])


def test_g0_prime(analytics_a, analytics_b):
    assert analytics_b.g0_prime(-1.0) == pytest.approx(0.0, abs=1e-12)
    assert analytics_a.g0_prime(1.0) == pytest.approx(1.0)
    assert analytics_a.g0_prime(-3.0) == pytest.approx(2.0 * math.exp(-3.0) - 1.0)


def test_g0_prime_rejects_kink(analytics_a, analytics_b):
    with pytest.raises(KinkError):
        analytics_a.g0_prime(0.0)
    # quadratic h has no kink
    assert analytics_b.g0_prime(0.0) == pytest.approx(2.0)


def test_z_star(analytics_a, analytics_b):
    assert analytics_a.z_star() == pytest.approx(-LN2, abs=1e-8)
    assert analytics_b.z_star() == pytest.approx(-1.0, abs=1e-8)
    assert analytics_a.g0_star == pytest.approx(LN2, abs=1e-12)
    assert analytics_a.z_star() == pytest.approx(analytics_a.kernel.z_star(), abs=1e-12)


def test_z_star_scales_with_lambda():
    an = Analytics(make_instance(SQUARE, constant(1.0), mu=2.0, sigma2=1.0))
    assert an.lam == pytest.approx(4.0)
    assert an.z_star() == pytest.approx(-0.25, abs=1e-10)


def test_quadrature_kernel_matches_closed_form(analytics_a, simpson_a):
    for z in (-2.5, -LN2, 0.3, 1.7):
        assert simpson_a.g0(z) == pytest.approx(analytics_a.g0(z), abs=1e-8)
    assert simpson_a.z_star() == pytest.approx(-LN2, abs=1e-7)
    assert simpson_a.integrate_g0(-1.0, 1.0) == pytest.approx(analytics_a.integrate_g0(-1.0, 1.0), abs=1e-8)


def _quadrature_agrees(closed, simpson, n_points, seed):
    z = np.random.default_rng(seed).uniform(-6.0, 6.0, size=n_points)
    np.testing.assert_allclose(simpson.g0(z), closed.g0(z), rtol=1e-9, atol=0.0)


def test_quadrature_agrees_with_closed_forms(analytics_a, simpson_a, analytics_b, simpson_b):
    _quadrature_agrees(analytics_a, simpson_a, 50, seed=2)
    _quadrature_agrees(analytics_b, simpson_b, 50, seed=3)


@pytest.mark.slow
def test_quadrature_agrees_with_closed_forms_dense(analytics_a, simpson_a, analytics_b, simpson_b):
    _quadrature_agrees(analytics_a, simpson_a, 10 ** 3, seed=4)
    _quadrature_agrees(analytics_b, simpson_b, 10 ** 3, seed=5)


def test_convex_poly_square_agrees_with_quadratic(analytics_b):
    holding = {'kind': 'convex_poly', 'positive': [0.0, 0.0, 1.0], 'negative': [0.0, 0.0, 1.0]}
    an = Analytics(make_instance(holding, constant(36.0)))
    assert isinstance(an.kernel, QuadratureKernel)
    assert an.z_star() == pytest.approx(-1.0, abs=1e-7)
    assert an.gamma(-4.0, 2.0) == pytest.approx(10.0, abs=1e-6)


def test_matched_levels(analytics_b):
    ml = analytics_b.matched_levels(6.0)
    assert (ml.s_tilde, ml.S_tilde) == pytest.approx((-4.0, 2.0), abs=1e-10)
    ml = analytics_b.matched_levels(4.0)
    assert (ml.s_tilde, ml.S_tilde) == pytest.approx((-3.0, 1.0), abs=1e-10)
    ml = analytics_b.matched_levels(0.0)
    assert ml.s_tilde == ml.S_tilde == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        analytics_b.matched_levels(-1.0)


def test_matched_levels_equalize_g0(analytics_a):
    for xi in (0.1, 1.0, 3.0, 25.0):
        ml = analytics_a.matched_levels(xi)
        assert ml.S_tilde - ml.s_tilde == pytest.approx(xi)
        assert analytics_a.g0(ml.s_tilde) == pytest.approx(analytics_a.g0(ml.S_tilde), abs=1e-9)
        assert ml.s_tilde <= analytics_a.z_star() <= ml.S_tilde


def test_matched_levels_array_matches_scalar(analytics_a):
    xi = np.array([0.0, 0.5, 2.0, 7.0])
    s, S = analytics_a.matched_levels_array(xi)
    for i, x in enumerate(xi):
        ml = analytics_a.matched_levels(float(x))
        assert s[i] == pytest.approx(ml.s_tilde, abs=1e-12)
        assert S[i] == pytest.approx(ml.S_tilde, abs=1e-12)


def test_gamma(analytics_a, analytics_b, instance_b_free):
    assert analytics_b.gamma(-4.0, 2.0) == pytest.approx(10.0)
    assert analytics_a.gamma(0.0, 1.0) == pytest.approx(2.5)
    assert Analytics(instance_b_free).gamma(-1.0, -1.0) == pytest.approx(1.0)
    assert analytics_b.gamma(-1.0, -1.0) == math.inf
    with pytest.raises(ValueError):
        analytics_b.gamma(2.0, -4.0)


def test_gamma_with_proportional_cost():
    an = Analytics(make_instance(SQUARE, constant(36.0), k=0.5))
    assert an.gamma(-4.0, 2.0) == pytest.approx(10.5)
    assert an.base_stock_cost(-1.0, setup_value=0.0) == pytest.approx(1.5)


def test_theta(analytics_b, instance_b_free):
    assert analytics_b.theta(6.0) == pytest.approx(10.0)
    assert analytics_b.theta(0.0) == math.inf
    assert Analytics(instance_b_free).theta(0.0) == pytest.approx(1.0)
    theta, s, S = analytics_b.theta_array(np.array([2.0, 6.0, 9.0]))
    assert theta[1] == pytest.approx(10.0)
    for i, xi in enumerate((2.0, 6.0, 9.0)):
        assert theta[i] == pytest.approx(analytics_b.theta(xi), rel=1e-12)
        assert S[i] - s[i] == pytest.approx(xi)


def test_theta_shape_around_optimum(analytics_b):
    """theta decreases then increases around the constant-K order quantity xi_hat = 6."""
    xi = np.linspace(1.0, 11.0, 200)
    theta, _, _ = analytics_b.theta_array(xi)
    slope = np.diff(theta)
    mid = 0.5 * (xi[1:] + xi[:-1])
    assert np.all(slope[mid < 5.9] < 0)
    assert np.all(slope[mid > 6.1] > 0)
    assert xi[np.argmin(theta)] == pytest.approx(6.0, abs=0.06)


def test_theta_jumps_at_breakpoint(step_b):
    an = Analytics(step_b)
    eps = 1e-9
    below, above = an.theta(4.0 - eps), an.theta(4.0 + eps)
    assert above - below == pytest.approx((48.0 - 6.0) / 4.0, rel=1e-6)


def test_base_stock_cost_and_cycle_length(analytics_b, instance_b_free):
    assert Analytics(instance_b_free).base_stock_cost(-1.0) == pytest.approx(1.0)
    assert analytics_b.base_stock_cost(-1.0) == math.inf
    assert analytics_b.expected_cycle_length(-4.0, 2.0) == pytest.approx(6.0)


def test_level_set_and_lambda(analytics_a, analytics_b):
    assert analytics_b.lambda_measure(10.0) == pytest.approx(6.0, abs=1e-9)
    assert analytics_b.level_set(1.0) == pytest.approx((-1.0, -1.0))
    assert analytics_a.lambda_measure(1.0) == pytest.approx(1.59362, abs=1e-5)
    with pytest.raises(ValueError):
        analytics_b.level_set(0.5)


def test_big_I(analytics_b):
    assert analytics_b.big_I(10.0) == pytest.approx(36.0, abs=1e-7)
    assert analytics_b.big_I(3.7257) == pytest.approx(4.0 / 3.0 * 2.7257 ** 1.5, abs=1e-7)
    assert analytics_b.big_I(1.0) == 0.0


def test_big_L(analytics_b):
    assert analytics_b.big_L(6.0) == pytest.approx(36.0, abs=1e-9)
    assert analytics_b.big_L(2.0) == pytest.approx(4.0 / 3.0, abs=1e-9)
    with pytest.raises(ValueError):
        analytics_b.big_L(0.0)


def _big_L_equals_big_I(analytics, n_xi, seed):
    for xi in np.random.default_rng(seed).uniform(0.2, 6.0, size=n_xi):
        ml = analytics.matched_levels(xi)
        expected = analytics.big_I(analytics.g0(ml.s_tilde))
        assert analytics.big_L(xi) == pytest.approx(expected, rel=1e-7, abs=1e-7)


def test_big_L_equals_big_I_at_matched_level(analytics_a, analytics_b):
    xi = 2.0
    ml = analytics_a.matched_levels(xi)
    assert analytics_a.big_L(xi) == pytest.approx(analytics_a.big_I(analytics_a.g0(ml.s_tilde)), abs=1e-7)
    _big_L_equals_big_I(analytics_a, 10, seed=6)
    _big_L_equals_big_I(analytics_b, 10, seed=7)


@pytest.mark.slow
def test_big_L_equals_big_I_on_random_quantities(analytics_a, analytics_b):
    _big_L_equals_big_I(analytics_a, 100, seed=8)
    _big_L_equals_big_I(analytics_b, 100, seed=9)


def test_relative_value(analytics_b):
    assert analytics_b.relative_value(2.0, -4.0, 10.0) == pytest.approx(-36.0)
    assert analytics_b.relative_value(-4.0, -4.0, 10.0) == 0.0
    V = RelativeValue(analytics_b, 10.0, -4.0)
    np.testing.assert_allclose(V(np.array([-4.0, 2.0])), [0.0, -36.0], atol=1e-12)
    assert V.derivative(2.0) == pytest.approx(0.0)


@pytest.mark.parametrize('z', [-3.0, -0.4, 0.5, 2.0])
def test_generator_residual_vanishes(analytics_a, analytics_b, z):
    assert analytics_b.generator_residual(z, -4.0, 10.0) == pytest.approx(0.0, abs=1e-5)
    assert analytics_a.generator_residual(z, 0.0, 2.5) == pytest.approx(0.0, abs=1e-5)


def test_integrate_g0_from_matches_pairwise(simpson_a):
    points = np.array([-2.0, -0.5, 0.25, 1.5])
    cum = simpson_a.integrate_g0_from(-0.5, points)
    for z, value in zip(points, cum):
        assert value == pytest.approx(simpson_a.integrate_g0(-0.5, float(z)), abs=1e-8)


def test_describe(analytics_a):
    d = analytics_a.describe()
    assert d['z_star'] == pytest.approx(-LN2)
    assert d['ell'] == 'inf'
