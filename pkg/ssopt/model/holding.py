""" Holding and shortage cost models h(z)

h is charged per unit time on the inventory level z; positive z is held stock,
negative z is backlog. Every model is vectorized over numpy arrays and carries
a polynomial bound witness (a, b0, b1) with h(z) <= b0 + b1*|z|^a.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .. import params
from ..errors import Violation
from .registry import register_holding


@dataclass(frozen=True)
class PolyBoundWitness:
    a: int
    b0: float
    b1: float

    def check(self):
        violations = []
        if not (isinstance(self.a, (int, np.integer)) and not isinstance(self.a, bool) and self.a >= 1):
            violations.append(Violation('H5', self.a, 'witness exponent a must be a positive integer'))
        for name in ('b0', 'b1'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                violations.append(Violation('H5', value, 'witness {} must be finite and > 0'.format(name)))
        return violations

    def bound(self, z):
        return self.b0 + self.b1 * np.abs(z) ** self.a

    def to_dict(self):
        return {'a': int(self.a), 'b0': self.b0, 'b1': self.b1}


def _power_bound_ok(beta, p, witness):
    """Exact check of beta*|z|^p <= b0 + b1*|z|^a for all z."""
    a, b0, b1 = witness.a, witness.b0, witness.b1
    if a < p:
        return False
    if a == p:
        return b1 >= beta
    z0 = (p * beta / (a * b1)) ** (1.0 / (a - p))
    return beta * z0 ** p - b1 * z0 ** a <= b0


class HoldingCostModel:
    """ Holding cost base class

    Subclasses implement ``_eval`` and ``_derivative`` on float arrays and
    ``_check_params``. ``kinks`` lists the points where h is not differentiable.
    """
    kind = ''
    kinks: Tuple[float, ...] = ()

    def __init__(self, witness: Optional[PolyBoundWitness] = None) -> None:
        self.witness_given = witness is not None
        self.witness = witness if witness is not None else self.default_witness()

    def default_witness(self) -> PolyBoundWitness:
        raise NotImplementedError

    def _eval(self, z):
        raise NotImplementedError

    def _derivative(self, z):
        raise NotImplementedError

    def __call__(self, z):
        if np.ndim(z) == 0:
            return float(self._eval(np.float64(z)))
        return self._eval(np.asarray(z, dtype=float))

    def derivative(self, z):
        """One-sided (right) derivative at kinks, h' elsewhere."""
        if np.ndim(z) == 0:
            return float(self._derivative(np.float64(z)))
        return self._derivative(np.asarray(z, dtype=float))

    @property
    def sampled(self):
        """True when (H2)/(H4) are only checked on the sampling grid."""
        return False

    def _check_params(self):
        return []

    def _check_witness(self):
        return []

    def check(self, grid=None):
        violations = self._check_params()
        if violations:
            return violations
        violations = self.witness.check()
        if violations:
            return violations
        return self._check_witness()

    def params(self):
        return {}

    def to_dict(self):
        out = {'kind': self.kind}
        out.update(self.params())
        out['witness'] = self.witness.to_dict()
        return out

    def __repr__(self):
        return '{}({})'.format(self.__class__.__name__, ', '.join(
            '{}={!r}'.format(k, v) for k, v in self.params().items()))


class PiecewiseLinearHolding(HoldingCostModel):
    kind = 'piecewise_linear'
    kinks = (0.0,)

    def __init__(self, beta1: float, beta2: float, witness: Optional[PolyBoundWitness] = None) -> None:
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        super().__init__(witness)

    def default_witness(self):
        b1 = max(self.beta1, self.beta2)
        return PolyBoundWitness(1, 1.0, b1 if math.isfinite(b1) and b1 > 0 else 1.0)

    def _eval(self, z):
        return np.where(z >= 0, self.beta1 * z, -self.beta2 * z)

    def _derivative(self, z):
        return np.where(z >= 0, self.beta1, -self.beta2) + 0.0 * z

    def _check_params(self):
        violations = []
        for name in ('beta1', 'beta2'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                violations.append(Violation('H4', value, '{} must be finite and > 0'.format(name)))
        return violations

    def _check_witness(self):
        if _power_bound_ok(max(self.beta1, self.beta2), 1, self.witness):
            return []
        return [Violation('H5', self.witness.to_dict(), 'witness does not bound max(beta1, beta2)*|z|')]

    def params(self):
        return {'beta1': self.beta1, 'beta2': self.beta2}


class QuadraticHolding(HoldingCostModel):
    kind = 'quadratic'

    def __init__(self, beta: float, witness: Optional[PolyBoundWitness] = None) -> None:
        self.beta = float(beta)
        super().__init__(witness)

    def default_witness(self):
        return PolyBoundWitness(2, 1.0, self.beta if math.isfinite(self.beta) and self.beta > 0 else 1.0)

    def _eval(self, z):
        return self.beta * z * z

    def _derivative(self, z):
        return 2.0 * self.beta * z

    def _check_params(self):
        if math.isfinite(self.beta) and self.beta > 0:
            return []
        return [Violation('H4', self.beta, 'beta must be finite and > 0')]

    def _check_witness(self):
        if _power_bound_ok(self.beta, 2, self.witness):
            return []
        return [Violation('H5', self.witness.to_dict(), 'witness does not bound beta*z^2')]

    def params(self):
        return {'beta': self.beta}


class ConvexPolyHolding(HoldingCostModel):
    """ h(z) = sum_i c_i z^i for z >= 0 and sum_i d_i (-z)^i for z < 0

    Coefficients are given lowest power first. (H2) and (H4) are checked on a
    sampling grid, recorded on the validated instance.
    """
    kind = 'convex_poly'

    def __init__(self, positive: Sequence[float], negative: Sequence[float],
                 witness: Optional[PolyBoundWitness] = None) -> None:
        self.positive = tuple(float(c) for c in positive)
        self.negative = tuple(float(c) for c in negative)
        # np.polyval wants highest power first
        self._pos = np.array(self.positive[::-1] or (0.0,))
        self._neg = np.array(self.negative[::-1] or (0.0,))
        self._dpos = np.polyder(self._pos) if len(self._pos) > 1 else np.array([0.0])
        self._dneg = np.polyder(self._neg) if len(self._neg) > 1 else np.array([0.0])
        right = self.positive[1] if len(self.positive) > 1 else 0.0
        left = self.negative[1] if len(self.negative) > 1 else 0.0
        self.kinks = (0.0,) if right + left != 0.0 else ()
        super().__init__(witness)

    @property
    def degree(self):
        return max(len(self.positive), len(self.negative), 2) - 1

    @property
    def sampled(self):
        return True

    def default_witness(self):
        total = sum(abs(c) for c in self.positive + self.negative)
        total = total if math.isfinite(total) and total > 0 else 1.0
        return PolyBoundWitness(self.degree, total, total)

    def _eval(self, z):
        return np.where(z >= 0, np.polyval(self._pos, z), np.polyval(self._neg, -z))

    def _derivative(self, z):
        return np.where(z >= 0, np.polyval(self._dpos, z), -np.polyval(self._dneg, -z))

    def _check_params(self):
        violations = []
        for name in ('positive', 'negative'):
            coeffs = getattr(self, name)
            if len(coeffs) < 2:
                violations.append(Violation('H4', list(coeffs), '{} needs at least one power >= 1'.format(name)))
            if not all(math.isfinite(c) for c in coeffs):
                violations.append(Violation('H5', list(coeffs), '{} coefficients must be finite'.format(name)))
        for name in ('positive', 'negative'):
            coeffs = getattr(self, name)
            if coeffs and coeffs[0] != 0.0:
                violations.append(Violation('H1', coeffs[0], 'h(0) must be 0; {}[0] is nonzero'.format(name)))
        return violations

    def check(self, grid=None):
        violations = super().check(grid)
        if violations:
            return violations
        if grid is None:
            grid = np.linspace(-params.h_grid_scale, params.h_grid_scale, params.h_grid_points)
        grid = np.asarray(grid, dtype=float)
        values = self(grid)
        scale = 1.0 + np.abs(values)
        # midpoint convexity on equally spaced triples
        mid = 0.5 * (values[:-2] + values[2:]) - values[1:-1]
        bad = np.nonzero(mid < -1e-12 * scale[1:-1])[0]
        if bad.size:
            z = float(grid[bad[0] + 1])
            violations.append(Violation('H2', z, 'midpoint convexity fails at z={:.6g}'.format(z)))
        slope = self.derivative(grid)
        bad = np.nonzero(((grid > 0) & (slope <= 0)) | ((grid < 0) & (slope >= 0)))[0]
        if bad.size:
            z = float(grid[bad[0]])
            violations.append(Violation('H4', z, 'derivative has the wrong sign at z={:.6g}'.format(z)))
        bad = np.nonzero(values > self.witness.bound(grid) * (1 + 1e-12))[0]
        if bad.size:
            z = float(grid[bad[0]])
            violations.append(Violation('H5', z, 'h exceeds b0 + b1*|z|^a at z={:.6g}'.format(z)))
        return violations

    def params(self):
        return {'positive': list(self.positive), 'negative': list(self.negative)}


@register_holding
def piecewise_linear(beta1, beta2, witness=None):
    return PiecewiseLinearHolding(beta1, beta2, witness=witness)


@register_holding
def quadratic(beta, witness=None):
    return QuadraticHolding(beta, witness=witness)


@register_holding
def convex_poly(positive, negative, witness=None):
    return ConvexPolyHolding(positive, negative, witness=witness)
