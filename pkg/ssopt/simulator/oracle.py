""" Marginal law of Brownian motion reflected at a lower barrier m

Z^m(0) = max(x, m), dZ^m = -mu dt + sigma dB with instantaneous reflection at m.
"""
import math

import numpy as np
from scipy.stats import norm

from .paths import replication_streams


def reflected_tail_oracle(v, t, m, x, demand):
    """P[Z^m(t) > v]; 1 below the barrier."""
    if t <= 0:
        raise ValueError('reflected_tail_oracle needs t > 0, got {}'.format(t))
    v = np.asarray(v, dtype=float)
    start = max(x, m)
    mu, sigma, lam = demand.mu, demand.sigma, demand.lam
    scale = sigma * math.sqrt(t)
    tail = (norm.cdf((-v + start - mu * t) / scale)
            + np.exp(-lam * np.maximum(v - m, 0.0)) * norm.cdf((-v - start + 2.0 * m + mu * t) / scale))
    out = np.where(v < m, 1.0, np.minimum(tail, 1.0))
    return float(out) if out.ndim == 0 else out


def reflected_cdf(v, t, m, x, demand):
    return 1.0 - reflected_tail_oracle(v, t, m, x, demand)


def sample_reflected_levels(demand, m, x, t, dt, n_paths, seed=0, chunk=4096):
    """Z^m(t) on n_paths independent grid paths, via the running minimum of the free path."""
    n_steps = int(round(t / dt))
    if n_steps < 1:
        raise ValueError('need t >= dt, got t={} dt={}'.format(t, dt))
    rng = np.random.default_rng(replication_streams(seed, 1)[0])
    loc = -demand.mu * dt
    scale = demand.sigma * math.sqrt(dt)
    level = np.full(n_paths, float(x))
    running_min = level.copy()
    done = 0
    while done < n_steps:
        n = min(chunk, n_steps - done)
        path = level[:, None] + np.cumsum(rng.normal(loc, scale, size=(n_paths, n)), axis=1)
        running_min = np.minimum(running_min, path.min(axis=1))
        level = path[:, -1]
        done += n
    return level + np.maximum(m - running_min, 0.0)
