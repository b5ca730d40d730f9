import math

import numpy as np
import pytest

from ssopt.analytics import Analytics
from ssopt.solver import (N_EQUAL, N_GREATER, N_LESS, GridConfig, classify, solve, solve_constant, solve_grid,
                          solve_step)

from conftest import ABS, LN2, SQUARE, constant, make_instance, step

XI_6 = 36.0 ** (1.0 / 3.0)
NU_6 = 1.0 + XI_6 ** 2 / 4.0


def test_constant_k_instance_b(analytics_b):
    sol = solve_constant(analytics_b, 36.0)
    assert sol.xi_hat == pytest.approx(6.0, abs=1e-7)
    assert (sol.s_hat, sol.S_hat) == pytest.approx((-4.0, 2.0), abs=1e-7)
    assert sol.nu_hat == pytest.approx(10.0, abs=1e-7)
    assert sol.residuals['L'] <= 1e-8 * 37.0
    assert sol.residuals['I'] <= 1e-8 * 37.0
    assert sol.residuals['matched'] <= 1e-8 * 11.0


def test_constant_k_zero_is_base_stock(analytics_b):
    sol = solve_constant(analytics_b, 0.0)
    assert (sol.xi_hat, sol.s_hat, sol.S_hat, sol.nu_hat) == pytest.approx((0.0, -1.0, -1.0, 1.0))


def test_constant_k_small_kappa(analytics_b):
    sol = solve_constant(analytics_b, 6.0)
    assert sol.xi_hat == pytest.approx(XI_6, abs=1e-8)
    assert sol.nu_hat == pytest.approx(3.72568, abs=1e-5)


def test_constant_k_rejects_negative(analytics_b):
    with pytest.raises(ValueError):
        solve_constant(analytics_b, -1.0)


@pytest.mark.parametrize('holding', [ABS, SQUARE])
def test_constant_k_monotone_in_kappa(holding):
    an = Analytics(make_instance(holding, constant(1.0)))
    sols = [solve_constant(an, kappa, with_residuals=False) for kappa in range(1, 129)]
    for a, b in zip(sols[:-1], sols[1:]):
        assert b.xi_hat > a.xi_hat
        assert b.S_hat > a.S_hat
        assert b.nu_hat > a.nu_hat
        assert b.s_hat < a.s_hat


def test_constant_k_nu_matches_theta(analytics_a):
    sol = solve_constant(analytics_a, 1.0)
    assert analytics_a.theta(sol.xi_hat) == pytest.approx(sol.nu_hat, abs=1e-9)
    assert analytics_a.gamma(sol.s_hat, sol.S_hat) == pytest.approx(sol.nu_hat, abs=1e-9)


def test_classify():
    assert classify(1.0, 2.0, 5.0) == (N_LESS, 2.0)
    assert classify(3.0, 2.0, 5.0) == (N_EQUAL, 3.0)
    assert classify(7.0, 2.0, 5.0) == (N_GREATER, 5.0)
    assert classify(7.0, 2.0, math.inf) == (N_EQUAL, 7.0)


def test_step_both_interior(step_b):
    res = solve_step(Analytics(step_b))
    assert res.method == 'step_algorithm'
    assert res.nu_star == pytest.approx(3.725685, abs=1e-5)
    assert (res.s_star, res.S_star) == pytest.approx((-2.650965, 0.650965), abs=1e-5)
    table = res.candidate_table
    assert [r.membership for r in table] == [N_EQUAL, N_EQUAL]
    assert table[2].nu_n == pytest.approx(1.0 + 288.0 ** (2.0 / 3.0) / 4.0, abs=1e-6)
    assert res.diagnostics['n_star'] == 1


def test_step_clamped_large_order(step_b_cheap_large):
    res = solve_step(Analytics(step_b_cheap_large))
    assert (res.s_star, res.S_star) == pytest.approx((-3.0, 1.0), abs=1e-5)
    assert res.nu_star == pytest.approx(0.15 + 28.0 / 12.0, abs=1e-5)
    row = res.candidate_table[2]
    assert row.membership == N_LESS
    assert row.xi_star == 4.0
    assert row.in_candidate_set
    assert res.diagnostics['n_star'] == 2


def test_step_free_first_piece_is_base_stock():
    res = solve_step(Analytics(make_instance(SQUARE, step([4.0], [0.0, 10.0]))))
    assert res.method == 'base_stock'
    assert (res.s_star, res.S_star, res.nu_star) == pytest.approx((-1.0, -1.0, 1.0))


def test_step_pruned_pieces_have_cheaper_neighbour():
    inst = make_instance(SQUARE, step([1.0, 3.0, 20.0], [2.0, 30.0, 5.0, 60.0]))
    res = solve_step(Analytics(inst))
    for row in res.candidate_table:
        if not row.in_candidate_set:
            assert row.pruned_ok
    frame = res.candidate_table.to_frame()
    assert list(frame['n']) == [1, 2, 3, 4]


def test_grid_agrees_with_constant(analytics_b):
    res = solve_grid(analytics_b)
    assert res.method == 'grid'
    assert res.nu_star == pytest.approx(10.0, rel=1e-6)
    assert res.S_star - res.s_star == pytest.approx(6.0, abs=1e-3)


def test_grid_agrees_with_step(step_b):
    an = Analytics(step_b)
    assert solve_grid(an).nu_star == pytest.approx(solve_step(an).nu_star, rel=1e-6)


def test_grid_free_base_stock(instance_b_free):
    res = solve_grid(Analytics(instance_b_free), GridConfig(log_points=64, uniform_points=64))
    assert res.nu_star == pytest.approx(1.0, abs=1e-9)
    assert res.S_star == pytest.approx(res.s_star)


def _random_step(rng, holding):
    q = np.cumsum(rng.uniform(0.3, 4.0, size=4))
    values = rng.uniform(0.1, 40.0, size=5)
    return make_instance(holding, step(q.tolist(), values.tolist()), k=float(rng.uniform(0.0, 1.0)),
                         mu=float(rng.uniform(0.5, 2.0)), sigma2=float(rng.uniform(0.5, 3.0)))


@pytest.mark.parametrize('holding', [ABS, SQUARE])
def test_step_matches_grid_on_random_instances(holding):
    rng = np.random.default_rng(20 if holding is ABS else 21)
    grid = GridConfig(log_points=256, uniform_points=256)
    for _ in range(25):
        an = Analytics(_random_step(rng, holding))
        exact = solve_step(an, workers=2)
        approx = solve_grid(an, grid, workers=2)
        assert approx.nu_star == pytest.approx(exact.nu_star, rel=1e-5)
        assert approx.nu_star >= exact.nu_star - 1e-9 * (1.0 + exact.nu_star)


@pytest.mark.parametrize('holding', [ABS, SQUARE])
def test_dropped_pieces_are_strictly_beaten(holding):
    rng = np.random.default_rng(30 if holding is ABS else 31)
    dropped = 0
    for _ in range(25):
        table = solve_step(Analytics(_random_step(rng, holding)), workers=2).candidate_table
        for row in table:
            if row.in_candidate_set:
                continue
            dropped += 1
            ref = row.chi_lower if row.membership == N_LESS else row.chi_upper
            assert ref is not None
            assert table[ref].nu_n < row.nu_tilde
            assert row.pruned_ok
    assert dropped > 0


def test_solve_dispatch(instance_b, step_b):
    res = solve(instance_b)
    assert res.method == 'constant_k'
    assert res.nu_star == pytest.approx(10.0, abs=1e-7)
    assert res.certificate.passed
    res = solve(step_b)
    assert res.method == 'step_algorithm'
    assert res.nu_star == pytest.approx(NU_6, abs=1e-6)
    assert res.certificate.passed


def test_solve_step_on_constant_model(instance_b):
    res = solve(instance_b, method='step', certify=False)
    assert res.method == 'step_algorithm'
    assert res.nu_star == pytest.approx(10.0, abs=1e-7)
    assert len(res.candidate_table) == 1


def test_solve_base_stock_instance_a():
    res = solve(make_instance(ABS, constant(0.0)))
    assert (res.s_star, res.S_star, res.nu_star) == pytest.approx((-LN2, -LN2, LN2), abs=1e-8)
    assert res.certificate.passed


def test_solve_cross_check(instance_b):
    res = solve(instance_b, cross_check=True, certify=False,
                grid_config=GridConfig(log_points=128, uniform_points=128))
    assert res.grid_check['gap'] <= 1e-6
    assert res.grid_check['nu_grid'] == pytest.approx(10.0, rel=1e-6)
    d = res.to_dict()
    assert d['grid_check']['gap'] == res.grid_check['gap']
    assert 'quadrature' in d['tolerances']


def test_solve_rejects_unknown_method(instance_b):
    with pytest.raises(ValueError):
        solve(instance_b, method='newton')


def test_result_to_dict(step_b):
    d = solve(step_b, certify=False).to_dict()
    assert d['xi_star'] == pytest.approx(XI_6, abs=1e-6)
    assert len(d['candidate_table']) == 2
    assert d['diagnostics']['index_sets'][N_EQUAL] == [1, 2]
