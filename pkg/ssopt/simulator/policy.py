""" Ordering policies on the simulation grid

Every policy advances one block of demand increments at a time and reports,
per grid step i, the level just before ordering (``pre``) and right after
(``post``), its jump orders and its continuous ordering ``dYc``. Orders are
detected at grid points only.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import PolicyError

logger = logging.getLogger(__name__)


@dataclass
class BlockResult:
    pre: np.ndarray
    post: np.ndarray
    order_idx: np.ndarray
    order_size: np.ndarray
    setup_size: np.ndarray  # quantity the setup fee is charged on
    dYc: Optional[np.ndarray] = None
    coupled: Optional['BlockResult'] = None


@dataclass
class PolicyState:
    level: float
    gap: float = 0.0  # Z - Z_m for a bounded modification
    base: Optional['PolicyState'] = None
    extra: dict = field(default_factory=dict)


def _first_at_or_below(values, start, threshold, stop=None, window=1024):
    """First index j in [start, stop) with values[j] <= threshold, or -1."""
    stop = values.size if stop is None else stop
    lo = start
    while lo < stop:
        hi = min(stop, lo + window)
        hit = values[lo:hi] <= threshold
        if hit.any():
            return lo + int(np.argmax(hit))
        lo = hi
        window *= 2
    return -1


class Policy:
    kind = ''

    def new_state(self, x0) -> PolicyState:
        raise NotImplementedError

    def advance(self, dx, state: PolicyState) -> BlockResult:
        raise NotImplementedError

    def check(self, instance):
        """Raise PolicyError when the policy has infinite cost on the instance."""
        pass

    def to_dict(self):
        raise NotImplementedError


class SSPolicy(Policy):
    """ Order up to S whenever the level is at or below s at a grid point

    Runs start at S. The setup fee is charged on the nominal quantity S - s,
    the proportional cost on what is actually ordered.
    """
    kind = 'ss'

    def __init__(self, s, S) -> None:
        if not s < S:
            raise PolicyError('an (s, S) policy needs s < S, got s={} S={}'.format(s, S))
        self.s = float(s)
        self.S = float(S)

    def new_state(self, x0):
        return PolicyState(self.S)

    def advance(self, dx, state):
        n = dx.size
        cum = np.cumsum(dx)
        pre = np.empty(n)
        post = np.empty(n)
        idx, sizes = [], []
        start, level, base = 0, state.level, 0.0
        while start < n:
            j = _first_at_or_below(cum, start, self.s - level + base)
            stop = n if j < 0 else j + 1
            seg = level + (cum[start:stop] - base)
            pre[start:stop] = seg
            post[start:stop] = seg
            if j < 0:
                break
            post[j] = self.S
            idx.append(j)
            sizes.append(self.S - pre[j])
            level, base, start = self.S, cum[j], j + 1
        state.level = float(post[-1])
        sizes = np.asarray(sizes, dtype=float)
        return BlockResult(pre, post, np.asarray(idx, dtype=np.int64), sizes, np.full(sizes.shape, self.S - self.s))

    def to_dict(self):
        return {'kind': self.kind, 's': self.s, 'S': self.S}


class BaseStockPolicy(Policy):
    """ Keep the level at or above s by continuous ordering

    On the grid this is the running-maximum (Skorokhod) reflection of the free
    path at s.
    """
    kind = 'base_stock'

    def __init__(self, s) -> None:
        self.s = float(s)

    def new_state(self, x0):
        return PolicyState(max(float(x0), self.s))

    def check(self, instance):
        if instance.setup.ell().infinite:
            raise PolicyError('base stock policy has infinite ordering cost when K(0+) > 0')

    def advance(self, dx, state):
        x = state.level + np.cumsum(dx)
        Y = np.maximum.accumulate(np.maximum(self.s - x, 0.0))
        post = x + Y
        pre = np.empty(dx.size)
        pre[0] = state.level + dx[0]
        pre[1:] = post[:-1] + dx[1:]
        state.level = float(post[-1])
        empty = np.zeros(0)
        return BlockResult(pre, post, np.zeros(0, dtype=np.int64), empty, empty, dYc=np.diff(Y, prepend=0.0))

    def to_dict(self):
        return {'kind': self.kind, 's': self.s}


class BoundedModificationPolicy(Policy):
    """ Order-up-to-m modification Y_m of a base policy Y, coupled on the same path

    With D = Z - Z_m >= 0 and Z_m(t-) the level before ordering at a grid step:
      J1  base jump, Z_m(t-) > m/2:            no jump, D += dY
      J2  base jump, Z_m(t-) + dY <= m:        jump dY
      J3  base jump otherwise:                 jump m - Z_m(t-), D grows by the rest
      J4  Z_m crosses 0, D > 0, no base jump:  jump min(D, m), D shrinks by it
    Continuous ordering of the base is copied unless Z_m(t-) > m, in which case
    it goes into D. Within one step the jump rules act before the reflection.
    """
    kind = 'bounded_modification'

    def __init__(self, base: Policy, m) -> None:
        if isinstance(base, BoundedModificationPolicy):
            raise PolicyError('bounded modification of a bounded modification is not supported')
        if not (float(m) == int(m) and m >= 1):
            raise PolicyError('order-up-to bound m must be an integer >= 1, got {}'.format(m))
        self.base = base
        self.m = int(m)

    def new_state(self, x0):
        base_state = self.base.new_state(x0)
        return PolicyState(base_state.level, 0.0, base_state)

    def check(self, instance):
        self.base.check(instance)

    def advance(self, dx, state):
        b = self.base.advance(dx, state.base)
        n = dx.size
        m = float(self.m)
        D = state.gap
        pre_b, post_b, dYc = b.pre, b.post, b.dYc
        pre = np.empty(n)
        post = np.empty(n)
        dYc_m = np.zeros(n) if dYc is not None else None
        suppress = np.flatnonzero((dYc > 0) & (pre_b > m)) if dYc is not None else np.zeros(0, dtype=np.int64)
        idx, sizes = [], []
        jumps = b.order_idx
        ptr, start = 0, 0
        while start < n:
            jb = int(jumps[ptr]) if ptr < jumps.size else n
            j4 = _first_at_or_below(pre_b, start, D, stop=jb) if D > 0 else -1
            i = jb if j4 < 0 else j4
            if suppress.size:
                cand = suppress[(suppress >= start) & (suppress < i)]
                cand = cand[pre_b[cand] > m + D]
                if cand.size:
                    i = int(cand[0])
            pre[start:i] = pre_b[start:i] - D
            post[start:i] = post_b[start:i] - D
            if dYc_m is not None:
                dYc_m[start:i] = dYc[start:i]
            if i >= n:
                break

            z_pre = pre_b[i] - D
            dym = 0.0
            if ptr < jumps.size and jumps[ptr] == i:
                dy = float(b.order_size[ptr])
                ptr += 1
                if z_pre > m / 2:
                    D += dy
                elif z_pre + dy <= m:
                    dym = dy
                else:
                    dym = m - z_pre
                    D += dy - dym
            elif D > 0 and z_pre <= 0:
                dym = min(D, m)
                D -= dym
            if dYc is not None and dYc[i] > 0:
                if z_pre > m:
                    D += dYc[i]
                else:
                    dYc_m[i] = dYc[i]
            pre[i] = z_pre
            post[i] = post_b[i] - D
            if dym > 0:
                idx.append(i)
                sizes.append(dym)
            start = i + 1

        state.gap = D
        state.level = float(post[-1])
        sizes = np.asarray(sizes, dtype=float)
        return BlockResult(pre, post, np.asarray(idx, dtype=np.int64), sizes, sizes, dYc=dYc_m, coupled=b)

    def to_dict(self):
        return {'kind': self.kind, 'm': self.m, 'base': self.base.to_dict()}


def _get(spec, key):
    if key not in spec:
        raise PolicyError('policy {!r} is missing {!r}'.format(spec.get('kind'), key))
    value = float(spec[key])
    if not math.isfinite(value):
        raise PolicyError('policy field {} must be finite, got {}'.format(key, value))
    return value


def create_policy(spec) -> Policy:
    """Build a policy from {'kind': 'ss'|'base_stock'|'bounded_modification', ...}."""
    if isinstance(spec, Policy):
        return spec
    kind = spec.get('kind', 'ss' if 'S' in spec else 'base_stock')
    if kind == 'ss':
        s, S = _get(spec, 's'), _get(spec, 'S')
        if s > S:
            raise PolicyError('an (s, S) policy needs s <= S, got s={} S={}'.format(s, S))
        # s == S is the base stock policy at s
        policy = SSPolicy(s, S) if s < S else BaseStockPolicy(s)
    elif kind == 'base_stock':
        policy = BaseStockPolicy(_get(spec, 's'))
    elif kind == 'bounded_modification':
        if 'base' not in spec:
            raise PolicyError('bounded_modification needs a base policy')
        policy = BoundedModificationPolicy(create_policy(spec['base']), _get(spec, 'm'))
    else:
        raise PolicyError('Unknown policy kind ({})'.format(kind))
    logger.debug('Created policy {}'.format(policy.to_dict()))
    return policy
