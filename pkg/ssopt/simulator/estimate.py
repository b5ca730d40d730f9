""" Long-run average cost by simulation

Cost per replication over the measured window (after burn-in) is the holding
integral (trapezoid between the post-order level of one grid point and the
pre-order level of the next) plus setup fees plus proportional ordering cost,
divided by the measured time. Replications are independent; the reported
standard error is the jackknife over replications.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..utils import AverageMeter, num_threads, write_csv
from .paths import iter_increments, replication_streams, stream_info
from .policy import create_policy

logger = logging.getLogger(__name__)


class Trajectory:
    """Thinned record of one replication: t, Z, Y (cumulative orders), cumulative_cost."""

    columns = ('t', 'Z', 'Y', 'cumulative_cost')

    def __init__(self, record_every=1) -> None:
        if record_every < 1:
            raise ValueError('record_every must be >= 1, got {}'.format(record_every))
        self.record_every = int(record_every)
        self._parts = []

    def add(self, t, z, y, cost):
        self._parts.append((t, z, y, cost))

    def _column(self, i):
        if not self._parts:
            return np.zeros(0)
        return np.concatenate([p[i] for p in self._parts])

    @property
    def t(self):
        return self._column(0)

    @property
    def levels(self):
        return self._column(1)

    def to_frame(self):
        return pd.DataFrame({name: self._column(i) for i, name in enumerate(self.columns)})

    def to_csv(self, filename, header=None):
        """header (the resolved run configuration) goes on a leading '# {json}' line."""
        write_csv(self.to_frame(), filename, header)


@dataclass
class RunLedger:
    holding: float = 0.0
    setup: float = 0.0
    proportional: float = 0.0
    measured_time: float = 0.0
    orders: int = 0
    order_times: List[float] = field(default_factory=list)
    min_level: float = math.inf
    max_level: float = -math.inf
    coupled: Optional['RunLedger'] = None
    coupling_violations: int = 0

    @property
    def total(self):
        return self.holding + self.setup + self.proportional

    @property
    def avg_cost(self):
        return self.total / self.measured_time

    @property
    def cycle_lengths(self):
        return np.diff(np.asarray(self.order_times, dtype=float))

    def components(self):
        T = self.measured_time
        return {'holding': self.holding / T, 'setup': self.setup / T, 'proportional': self.proportional / T}


class _Accountant:
    """Turns block results into costs for one policy trajectory."""

    def __init__(self, instance, config, level) -> None:
        self.h = instance.holding
        self.setup = instance.setup
        self.k = instance.k
        self.ell = instance.setup.ell()
        self.dt = config.dt
        self.n_burn = config.n_burn
        self.level = level
        self.cum_orders = 0.0
        self.cum_cost = 0.0
        self.ledger = RunLedger(measured_time=config.measured_time)

    def add(self, block, offset, trajectory=None):
        n = block.pre.size
        steps = offset + np.arange(1, n + 1)
        measured = steps > self.n_burn
        left = np.empty(n)
        left[0] = self.level
        left[1:] = block.post[:-1]
        cost = 0.5 * self.dt * (self.h(left) + self.h(block.pre))
        ordered = np.zeros(n)

        ledger = self.ledger
        ledger.holding += float(cost[measured].sum())
        if block.order_idx.size:
            fees = np.asarray(self.setup(block.setup_size), dtype=float)
            prop = self.k * block.order_size
            keep = measured[block.order_idx]
            ledger.setup += float(fees[keep].sum())
            ledger.proportional += float(prop[keep].sum())
            ledger.orders += int(keep.sum())
            ledger.order_times.extend(((block.order_idx[keep] + offset + 1) * self.dt).tolist())
            np.add.at(cost, block.order_idx, fees + prop)
            np.add.at(ordered, block.order_idx, block.order_size)
        if block.dYc is not None and block.dYc.any():
            # policies with continuous ordering are rejected up front when ell is infinite
            cont = (self.k + self.ell.value) * block.dYc
            ledger.proportional += float(cont[measured].sum())
            cost += cont
            ordered += block.dYc
        ledger.min_level = min(ledger.min_level, float(block.post.min()))
        ledger.max_level = max(ledger.max_level, float(block.post.max()))

        if trajectory is not None:
            running_cost = self.cum_cost + np.cumsum(cost)
            running_y = self.cum_orders + np.cumsum(ordered)
            pick = (steps % trajectory.record_every) == 0
            trajectory.add(steps[pick] * self.dt, block.post[pick], running_y[pick], running_cost[pick])
        self.cum_cost += float(cost.sum())
        self.cum_orders += float(ordered.sum())
        self.level = float(block.post[-1])


def run_policy(policy, config, instance, replication=0, stream=None, trajectory: Trajectory = None) -> RunLedger:
    """Simulate one replication; a bounded modification also carries the ledger of its base policy."""
    policy = create_policy(policy)
    policy.check(instance)
    if stream is None:
        stream = replication_streams(config.seed, max(config.replications, replication + 1))[replication]
    state = policy.new_state(instance.x0)
    acct = _Accountant(instance, config, state.level)
    base_acct = _Accountant(instance, config, state.level) if state.base is not None else None
    offset = 0
    violations = 0
    for dx in iter_increments(config, instance.demand, stream):
        block = policy.advance(dx, state)
        acct.add(block, offset, trajectory)
        if base_acct is not None:
            base_acct.add(block.coupled, offset)
            z, zm = block.coupled.post, block.post
            violations += int(np.count_nonzero(zm > z + 1e-9))
            violations += int(np.count_nonzero((zm < 0) & (np.abs(zm - z) > 1e-9)))
        offset += dx.size
    ledger = acct.ledger
    if base_acct is not None:
        ledger.coupled = base_acct.ledger
        ledger.coupling_violations = violations
        if violations:
            logger.warning('replication {}: {} coupling violations'.format(replication, violations))
    return ledger


def jackknife_se(values):
    """Jackknife standard error of the mean; nan for fewer than two values."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return math.nan
    loo = (v.sum() - v) / (v.size - 1)
    return float(math.sqrt((v.size - 1) / v.size * np.sum((loo - loo.mean()) ** 2)))


@dataclass
class SimulationEstimate:
    avg_cost: float
    components: dict
    std_error: float
    component_std_errors: dict
    cycles: int
    mean_cycle_length: float
    cycle_std_error: float
    dt: float
    horizon: float
    burn_in: float
    seeds: list
    per_replication: list
    coupled: Optional['SimulationEstimate'] = None
    coupling_violations: int = 0

    def to_dict(self):
        out = {
            'avg_cost': self.avg_cost,
            'components': dict(self.components),
            'std_error': self.std_error,
            'component_std_errors': dict(self.component_std_errors),
            'cycles': self.cycles,
            'mean_cycle_length': self.mean_cycle_length,
            'cycle_std_error': self.cycle_std_error,
            'dt': self.dt,
            'horizon': self.horizon,
            'burn_in': self.burn_in,
            'replications': len(self.per_replication),
            'seeds': list(self.seeds),
            'per_replication': list(self.per_replication),
        }
        if self.coupled is not None:
            out['coupled'] = self.coupled.to_dict()
            out['coupling_violations'] = self.coupling_violations
        return out


def summarize(ledgers, config, seeds) -> SimulationEstimate:
    comps = [l.components() for l in ledgers]
    names = ('holding', 'setup', 'proportional')
    means = {c: float(np.mean([x[c] for x in comps])) for c in names}
    ses = {c: jackknife_se([x[c] for x in comps]) for c in names}
    totals = [sum(x.values()) for x in comps]
    cycles = AverageMeter()
    for l in ledgers:
        cycles.update_many(l.cycle_lengths)
    coupled = None
    if ledgers and ledgers[0].coupled is not None:
        coupled = summarize([l.coupled for l in ledgers], config, seeds)
    return SimulationEstimate(
        avg_cost=sum(means.values()),
        components=means,
        std_error=jackknife_se(totals),
        component_std_errors=ses,
        cycles=cycles.count,
        mean_cycle_length=cycles.avg if cycles.count else math.nan,
        cycle_std_error=cycles.std_error,
        dt=config.dt,
        horizon=config.horizon,
        burn_in=config.burn_in,
        seeds=seeds,
        per_replication=[{'avg_cost': t, **c} for t, c in zip(totals, comps)],
        coupled=coupled,
        coupling_violations=sum(l.coupling_violations for l in ledgers),
    )


def estimate_ac(policy, config, instance, trajectory: Trajectory = None, progress=False,
                workers=None) -> SimulationEstimate:
    """Average cost of a policy over config.replications independent replications.

    ``trajectory`` records replication 0.
    """
    policy = create_policy(policy)
    policy.check(instance)
    streams = replication_streams(config.seed, config.replications)

    def run(r):
        return run_policy(policy, config, instance, r, streams[r], trajectory if r == 0 else None)

    workers = workers or num_threads()
    with ThreadPoolExecutor(max_workers=min(workers, config.replications)) as pool:
        ledgers = list(tqdm(pool.map(run, range(config.replications)), total=config.replications,
                            disable=not progress, desc='replications'))
    estimate = summarize(ledgers, config, stream_info(streams))
    logger.info('{}: AC={:.6g} (se {:.3g}) over {} replications, {} cycles'.format(
        policy.kind, estimate.avg_cost, estimate.std_error, config.replications, estimate.cycles))
    return estimate
