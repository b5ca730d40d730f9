import math

import numpy as np
import pytest
from scipy import stats

from ssopt.errors import PolicyError
from ssopt.simulator import (BaseStockPolicy, BoundedModificationPolicy, PathConfig, SSPolicy, Trajectory,
                             comparison_bound, comparison_experiment, create_policy, estimate_ac, generate_path,
                             jackknife_se, run_policy)

FAST = PathConfig(horizon=2000.0, dt=0.02, seed=7, replications=4)


def test_path_config_validation():
    with pytest.raises(ValueError):
        PathConfig(horizon=10.0, dt=0.01)
    with pytest.raises(ValueError):
        PathConfig(horizon=1e4, dt=1e-3, replications=0)
    with pytest.raises(ValueError):
        PathConfig(horizon=1e4, dt=1e-3, burn_in=0.5)
    cfg = PathConfig(horizon=1e4, dt=1e-3, burn_in=0.1)
    assert cfg.n_steps == 10 ** 7
    assert cfg.n_burn == 10 ** 6
    assert cfg.measured_time == pytest.approx(9000.0)


def test_paths_are_reproducible_per_replication(instance_b):
    cfg = PathConfig(horizon=100.0, dt=0.01, seed=3, replications=2, block_size=1000)
    a = generate_path(cfg, instance_b, replication=1)
    more = PathConfig(horizon=100.0, dt=0.01, seed=3, replications=5, block_size=333)
    b = generate_path(more, instance_b, replication=1)
    np.testing.assert_array_equal(a, b)
    assert a.size == cfg.n_steps
    assert not np.array_equal(a, generate_path(cfg, instance_b, replication=0))


def test_increment_moments(instance_b):
    cfg = PathConfig(horizon=1000.0, dt=0.01, seed=11)
    dx = generate_path(cfg, instance_b)
    assert dx.mean() == pytest.approx(-0.01, abs=5 * math.sqrt(0.02 / dx.size))
    assert dx.var() == pytest.approx(0.02, rel=0.02)


def test_create_policy():
    assert isinstance(create_policy({'kind': 'ss', 's': -4, 'S': 2}), SSPolicy)
    assert isinstance(create_policy({'s': -1}), BaseStockPolicy)
    # s == S is the base stock policy
    assert isinstance(create_policy({'kind': 'ss', 's': -1, 'S': -1}), BaseStockPolicy)
    bm = create_policy({'kind': 'bounded_modification', 'm': 2, 'base': {'kind': 'ss', 's': -4, 'S': 2}})
    assert isinstance(bm, BoundedModificationPolicy) and bm.m == 2
    assert bm.to_dict() == {'kind': 'bounded_modification', 'm': 2, 'base': {'kind': 'ss', 's': -4.0, 'S': 2.0}}


@pytest.mark.parametrize('spec', [
    {'kind': 'ss', 's': 2, 'S': -4},
    {'kind': 'ss', 's': -4},
    {'kind': 'bounded_modification', 'm': 0, 'base': {'kind': 'ss', 's': -4, 'S': 2}},
    {'kind': 'bounded_modification', 'm': 1.5, 'base': {'kind': 'ss', 's': -4, 'S': 2}},
    {'kind': 'periodic', 's': 1},
])
def test_create_policy_rejects(spec):
    with pytest.raises(PolicyError):
        create_policy(spec)


def test_base_stock_needs_finite_ell(instance_b):
    with pytest.raises(PolicyError):
        estimate_ac({'kind': 'base_stock', 's': -1.0}, FAST, instance_b)


def test_ss_policy_levels(instance_b):
    cfg = PathConfig(horizon=500.0, dt=0.01, seed=1)
    traj = Trajectory(record_every=1)
    ledger = run_policy(SSPolicy(-4.0, 2.0), cfg, instance_b, trajectory=traj)
    z = traj.levels
    assert z.max() <= 2.0 + 1e-12
    assert z.min() > -4.0
    assert ledger.orders > 0
    assert np.all(ledger.cycle_lengths > 0)
    assert ledger.setup == pytest.approx(36.0 * ledger.orders)


def test_base_stock_policy_reflects(instance_b_free):
    cfg = PathConfig(horizon=500.0, dt=0.01, seed=2)
    traj = Trajectory(record_every=1)
    ledger = run_policy(BaseStockPolicy(-1.0), cfg, instance_b_free, trajectory=traj)
    assert traj.levels.min() >= -1.0 - 1e-12
    assert ledger.proportional == 0.0
    assert ledger.orders == 0
    # cumulative orders never decrease
    assert np.all(np.diff(traj.to_frame()['Y']) >= -1e-12)


def test_estimate_is_deterministic(instance_b):
    a = estimate_ac({'kind': 'ss', 's': -4.0, 'S': 2.0}, FAST, instance_b, workers=1)
    b = estimate_ac({'kind': 'ss', 's': -4.0, 'S': 2.0}, FAST, instance_b, workers=3)
    assert a.avg_cost == b.avg_cost
    assert a.per_replication == b.per_replication
    c = estimate_ac({'kind': 'ss', 's': -4.0, 'S': 2.0}, PathConfig(2000.0, 0.02, seed=8, replications=4),
                    instance_b)
    assert c.avg_cost != a.avg_cost


def test_estimate_close_to_analytics_fast(instance_b):
    est = estimate_ac({'kind': 'ss', 's': -4.0, 'S': 2.0}, FAST, instance_b)
    assert est.avg_cost == pytest.approx(10.0, rel=0.1)
    assert est.components['setup'] + est.components['holding'] == pytest.approx(est.avg_cost)
    assert est.mean_cycle_length == pytest.approx(6.0, rel=0.15)
    assert est.std_error > 0
    d = est.to_dict()
    assert d['replications'] == 4 and len(d['seeds']) == 4


def test_trajectory_csv(tmp_path, instance_b):
    cfg = PathConfig(horizon=100.0, dt=0.01, seed=4)
    traj = Trajectory(record_every=100)
    estimate_ac({'kind': 'ss', 's': -4.0, 'S': 2.0}, cfg, instance_b, trajectory=traj)
    path = tmp_path / 'out' / 'trajectory.csv'
    traj.to_csv(str(path))
    header = path.read_text().splitlines()[0]
    assert header == 't,Z,Y,cumulative_cost'
    frame = traj.to_frame()
    assert len(frame) == 100
    assert frame['t'].iloc[-1] == pytest.approx(100.0)
    assert np.all(np.diff(frame['cumulative_cost']) >= 0)


def test_jackknife_of_mean_is_standard_error():
    v = np.array([1.0, 3.0, 2.5, 7.0, 4.0])
    assert jackknife_se(v) == pytest.approx(v.std(ddof=1) / math.sqrt(v.size))
    assert math.isnan(jackknife_se([1.0]))


@pytest.mark.parametrize('base, instance_fixture', [
    ({'kind': 'ss', 's': -4.0, 'S': 2.0}, 'instance_b'),
    ({'kind': 'base_stock', 's': -1.0}, 'instance_b_free'),
])
@pytest.mark.parametrize('m', [1, 2, 4])
def test_bounded_modification_coupling(request, base, instance_fixture, m):
    instance = request.getfixturevalue(instance_fixture)
    cfg = PathConfig(horizon=300.0, dt=0.01, seed=5, replications=2)
    est = estimate_ac(BoundedModificationPolicy(create_policy(base), m), cfg, instance)
    assert est.coupling_violations == 0
    assert est.coupled is not None


def test_bounded_modification_orders_stay_below_bound(instance_b):
    cfg = PathConfig(horizon=300.0, dt=0.01, seed=6)
    policy = BoundedModificationPolicy(SSPolicy(-4.0, 2.0), 1)
    state = policy.new_state(instance_b.x0)
    block = policy.advance(generate_path(cfg, instance_b), state)
    assert block.order_idx.size > 0
    assert block.post[block.order_idx].max() <= 1.0 + 1e-12
    assert block.coupled.order_idx.size > 0
    assert np.all(block.post <= block.coupled.post + 1e-9)
    assert state.gap >= 0


def test_comparison_bound(instance_b):
    assert comparison_bound(instance_b, 4) == pytest.approx(36.0)


def test_comparison_table(instance_b):
    cfg = PathConfig(horizon=300.0, dt=0.01, seed=9, replications=2)
    table = comparison_experiment({'kind': 'ss', 's': -4.0, 'S': 2.0}, [1, 2], cfg, instance_b)
    assert list(table.columns) == ['m', 'ac_m', 'ac', 'bound', 'std_error_m', 'std_error', 'holds',
                                   'coupling_violations']
    assert list(table['m']) == [1, 2]
    assert list(table['bound']) == pytest.approx([144.0, 72.0])
    # both rows share the base policy's paths
    assert table['ac'].iloc[0] == table['ac'].iloc[1]


@pytest.mark.slow
def test_ss_policy_matches_analytics(instance_b):
    cfg = PathConfig(horizon=1e4, dt=1e-3, seed=0, replications=8)
    est = estimate_ac({'kind': 'ss', 's': -4.0, 'S': 2.0}, cfg, instance_b)
    assert est.avg_cost == pytest.approx(10.0, rel=0.02)


@pytest.mark.slow
def test_base_stock_matches_analytics(instance_b_free):
    cfg = PathConfig(horizon=1e4, dt=1e-3, seed=0, replications=8)
    est = estimate_ac({'kind': 'base_stock', 's': -1.0}, cfg, instance_b_free)
    assert est.avg_cost == pytest.approx(1.0, rel=0.02)


@pytest.mark.slow
def test_instance_a_ss_matches_analytics(instance_a):
    cfg = PathConfig(horizon=1e4, dt=1e-3, seed=0, replications=8)
    est = estimate_ac({'kind': 'ss', 's': 0.0, 'S': 1.0}, cfg, instance_a)
    assert est.avg_cost == pytest.approx(2.5, rel=0.02)


@pytest.mark.slow
def test_base_stock_overshoot_is_exponential(instance_b_free):
    cfg = PathConfig(horizon=1e4, dt=1e-4, seed=1, replications=1)
    traj = Trajectory(record_every=100000)
    run_policy(BaseStockPolicy(-1.0), cfg, instance_b_free, trajectory=traj)
    frame = traj.to_frame()
    sample = frame['Z'][frame['t'] > cfg.burn_in * cfg.horizon].to_numpy() + 1.0
    assert stats.kstest(sample, 'expon', args=(0.0, 1.0)).pvalue > 0.01


@pytest.mark.slow
def test_comparison_theorem(instance_b):
    cfg = PathConfig(horizon=1e4, dt=1e-3, seed=0, replications=8)
    table = comparison_experiment({'kind': 'ss', 's': -4.0, 'S': 2.0}, [1, 2, 4], cfg, instance_b)
    assert table['holds'].all()
    assert table['coupling_violations'].sum() == 0
