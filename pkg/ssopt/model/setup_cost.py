""" Quantity-dependent setup costs K(xi) and the ordering cost C(xi) = K(xi) + k*xi

All setup costs are step functions: K(0) = 0, K = K_n on (Q_{n-1}, Q_n) with
Q_0 = 0 and Q_N = inf, and K(Q_n) = min(K_n, K_{n+1}) at a breakpoint.
A constant setup cost is the one-piece case.
"""
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import Violation
from .registry import register_setup


@dataclass(frozen=True)
class ExtendedReal:
    """Nonnegative extended real; ``infinite`` marks +inf, ``value`` is unused then."""
    value: float = 0.0
    infinite: bool = False

    @classmethod
    def inf(cls):
        return cls(0.0, True)

    @classmethod
    def finite(cls, value):
        return cls(float(value), False)

    @property
    def is_finite(self):
        return not self.infinite

    def __float__(self):
        return math.inf if self.infinite else self.value

    def to_json(self):
        return 'inf' if self.infinite else self.value

    def __str__(self):
        return 'inf' if self.infinite else '{:g}'.format(self.value)


class StepSetup:
    kind = 'step'

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float]) -> None:
        self.breakpoints = tuple(float(q) for q in breakpoints)
        self.values = tuple(float(v) for v in values)
        self._q = np.array(self.breakpoints, dtype=float)
        self._v = np.array(self.values, dtype=float)
        if len(self.values) == len(self.breakpoints) + 1 and len(self.values) > 0:
            # value at each breakpoint under the lower-fee rule
            self._at_q = np.minimum(self._v[:-1], self._v[1:])
        else:
            self._at_q = np.zeros(0)

    @property
    def num_pieces(self):
        return len(self.values)

    @property
    def k_bar(self):
        """sup K"""
        return max(self.values) if self.values else 0.0

    def ell(self) -> ExtendedReal:
        """liminf K(xi)/xi as xi -> 0+: inf when K_1 > 0, else 0."""
        return ExtendedReal.inf() if self.values[0] > 0 else ExtendedReal.finite(0.0)

    def interval(self, n):
        """(Q_{n-1}, Q_n) of piece n (1-based)."""
        lo = 0.0 if n == 1 else self.breakpoints[n - 2]
        hi = math.inf if n == self.num_pieces else self.breakpoints[n - 1]
        return lo, hi

    def __call__(self, xi):
        scalar = np.ndim(xi) == 0
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < 0):
            raise ValueError('setup cost needs xi >= 0, got {}'.format(xi[xi < 0].ravel()[0]))
        idx = np.searchsorted(self._q, xi, side='left')
        out = self._v[idx]
        if self._q.size:
            at_q = (idx < self._q.size) & (self._q[np.minimum(idx, self._q.size - 1)] == xi)
            out = np.where(at_q, self._at_q[np.minimum(idx, self._q.size - 1)], out)
        out = np.where(xi == 0, 0.0, out)
        return float(out) if scalar else out

    def check(self):
        violations = []
        if len(self.values) != len(self.breakpoints) + 1:
            violations.append(Violation(
                'SCHEMA', len(self.values), 'need len(values) == len(breakpoints) + 1, got {} and {}'.format(
                    len(self.values), len(self.breakpoints))))
            return violations
        for n, v in enumerate(self.values, 1):
            if not math.isfinite(v):
                violations.append(Violation('S2', v, 'K_{} must be finite'.format(n)))
            elif v < 0:
                violations.append(Violation('S1', v, 'K_{} must be nonnegative'.format(n)))
        prev = 0.0
        for n, q in enumerate(self.breakpoints, 1):
            if not math.isfinite(q) or q <= prev:
                violations.append(Violation(
                    'S4', q, 'breakpoints must be finite, positive and strictly increasing (Q_{})'.format(n)))
            prev = q if math.isfinite(q) else prev
        for n in range(1, len(self.values)):
            if self.values[n - 1] == self.values[n]:
                violations.append(Violation(
                    'S4', self.values[n], 'adjacent values K_{} and K_{} must differ'.format(n, n + 1)))
        return violations

    def to_dict(self):
        return {'kind': 'step', 'breakpoints': list(self.breakpoints), 'values': list(self.values)}

    def __repr__(self):
        return 'StepSetup(breakpoints={}, values={})'.format(list(self.breakpoints), list(self.values))


class ConstantSetup(StepSetup):
    kind = 'constant'

    def __init__(self, kappa: float) -> None:
        self.kappa = float(kappa)
        super().__init__((), (self.kappa,))

    def check(self):
        if not math.isfinite(self.kappa):
            return [Violation('S2', self.kappa, 'kappa must be finite')]
        if self.kappa < 0:
            return [Violation('S1', self.kappa, 'kappa must be nonnegative')]
        return []

    def to_dict(self):
        return {'kind': 'constant', 'kappa': self.kappa}

    def __repr__(self):
        return 'ConstantSetup(kappa={})'.format(self.kappa)


@dataclass(frozen=True)
class OrderingCostModel:
    k: float
    setup: StepSetup

    def __call__(self, xi):
        """C(xi) = K(xi) + k*xi"""
        if np.ndim(xi) == 0:
            return self.setup(xi) + self.k * float(xi)
        return self.setup(xi) + self.k * np.asarray(xi, dtype=float)

    def check(self):
        violations = []
        if not (math.isfinite(self.k) and self.k >= 0):
            violations.append(Violation('C1', self.k, 'proportional rate k must be finite and >= 0'))
        return violations + self.setup.check()

    def to_dict(self):
        return {'k': self.k, 'setup': self.setup.to_dict()}


@register_setup
def constant(kappa):
    return ConstantSetup(kappa)


@register_setup
def step(breakpoints, values):
    return StepSetup(breakpoints, values)


@register_setup
def contract_fee(fee, volume):
    """No charge up to the contract volume, a fee above it."""
    return StepSetup([volume], [0.0, fee])


@register_setup
def free_shipping(fee, threshold):
    """A shipping fee for orders below the threshold, waived from the threshold on."""
    return StepSetup([threshold], [fee, 0.0])


def eval_setup(setup: StepSetup, xi):
    """K(xi); lower-fee rule at breakpoints, K(0) = 0, negative xi rejected."""
    return setup(xi)


def ell(setup: StepSetup) -> ExtendedReal:
    return setup.ell()
