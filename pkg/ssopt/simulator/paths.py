""" Brownian demand paths

Inventory before ordering moves by dX ~ Normal(-mu*dt, sigma2*dt) per grid step.
Each replication draws from its own stream spawned from the master seed, so a
replication's path does not depend on how many others run or in which order.
"""
import numpy as np


def replication_streams(seed, replications):
    return np.random.SeedSequence(seed).spawn(replications)


def stream_info(streams):
    return [{'entropy': int(s.entropy), 'spawn_key': [int(k) for k in s.spawn_key]} for s in streams]


def iter_increments(config, demand, stream):
    """Yield the increments of one replication in blocks of at most config.block_size steps."""
    rng = np.random.default_rng(stream)
    loc = -demand.mu * config.dt
    scale = demand.sigma * np.sqrt(config.dt)
    remaining = config.n_steps
    while remaining > 0:
        n = min(remaining, config.block_size)
        yield rng.normal(loc, scale, size=n)
        remaining -= n


def generate_path(config, instance, replication=0):
    """All increments of one replication as a single array."""
    streams = replication_streams(config.seed, max(config.replications, replication + 1))
    return np.concatenate(list(iter_increments(config, instance.demand, streams[replication])))
