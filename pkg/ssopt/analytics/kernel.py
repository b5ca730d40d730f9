""" g0 kernels

g0(z) = (lam/mu) * int_0^inf h(y+z) exp(-lam*y) dy is the marginal steady holding
cost. Closed forms exist for piecewise linear and quadratic h; any other holding
model goes through truncated adaptive Simpson quadrature.
"""
import logging
import math

import numpy as np

from .numerics import adaptive_simpson

logger = logging.getLogger(__name__)


class G0Kernel:
    """ Kernel base class

    ``g0``, ``g0_prime`` and ``antiderivative`` take floats or numpy arrays.
    g0' is continuous everywhere, so ``g0_prime`` needs no kink handling here.
    """
    closed_form = False

    def __init__(self, holding, demand, quadrature) -> None:
        self.holding = holding
        self.mu = demand.mu
        self.lam = demand.lam
        self.quadrature = quadrature

    def _g0(self, z):
        raise NotImplementedError

    def _g0_prime(self, z):
        raise NotImplementedError

    def _antiderivative(self, z):
        raise NotImplementedError

    @staticmethod
    def _apply(fn, z):
        if np.ndim(z) == 0:
            return float(fn(np.float64(z)))
        return fn(np.asarray(z, dtype=float))

    def g0(self, z):
        return self._apply(self._g0, z)

    def g0_prime(self, z):
        return self._apply(self._g0_prime, z)

    def antiderivative(self, z):
        """G0 with G0' = g0; only for closed-form kernels."""
        return self._apply(self._antiderivative, z)

    def z_star(self):
        """Closed-form minimizer of g0, or None."""
        return None

    def describe(self):
        return {'kernel': self.__class__.__name__, 'closed_form': self.closed_form}


class PiecewiseLinearKernel(G0Kernel):
    closed_form = True

    def __init__(self, holding, demand, quadrature) -> None:
        super().__init__(holding, demand, quadrature)
        self.beta1 = holding.beta1
        self.beta2 = holding.beta2

    def _g0(self, z):
        lam, b1, b2 = self.lam, self.beta1, self.beta2
        right = b1 * (z + 1.0 / lam)
        left = (b1 + b2) * np.exp(lam * np.minimum(z, 0.0)) / lam - b2 * (z + 1.0 / lam)
        return np.where(z >= 0, right, left) / self.mu

    def _g0_prime(self, z):
        lam, b1, b2 = self.lam, self.beta1, self.beta2
        left = (b1 + b2) * np.exp(lam * np.minimum(z, 0.0)) - b2
        return np.where(z >= 0, b1, left) / self.mu

    def _antiderivative(self, z):
        lam, b1, b2 = self.lam, self.beta1, self.beta2
        right = b1 * (0.5 * z * z + z / lam) + (b1 + b2) / lam ** 2
        left = (b1 + b2) * np.exp(lam * np.minimum(z, 0.0)) / lam ** 2 - b2 * (0.5 * z * z + z / lam)
        return np.where(z >= 0, right, left) / self.mu

    def z_star(self):
        return math.log(self.beta2 / (self.beta1 + self.beta2)) / self.lam


class QuadraticKernel(G0Kernel):
    closed_form = True

    def __init__(self, holding, demand, quadrature) -> None:
        super().__init__(holding, demand, quadrature)
        self.beta = holding.beta

    def _g0(self, z):
        lam = self.lam
        return self.beta * (z * z + 2.0 * z / lam + 2.0 / lam ** 2) / self.mu

    def _g0_prime(self, z):
        return self.beta * (2.0 * z + 2.0 / self.lam) / self.mu

    def _antiderivative(self, z):
        lam = self.lam
        return self.beta * (z ** 3 / 3.0 + z * z / lam + 2.0 * z / lam ** 2) / self.mu

    def z_star(self):
        return -1.0 / self.lam


class QuadratureKernel(G0Kernel):
    """ Adaptive Simpson on [0, u_max], u_max from the (H5) witness

    u_max is the first doubling of 1 with exp(-lam*u) * (b0 + b1*(|z|+u)^a) <= tol.
    The integration range is split where y + z crosses a kink of h.
    """

    def u_max(self, z):
        w = self.holding.witness
        tol = self.quadrature.tol
        u = 1.0
        while math.exp(-self.lam * u) * (w.b0 + w.b1 * (abs(z) + u) ** w.a) > tol:
            u *= 2.0
        return u

    def _integral(self, z):
        z = float(z)
        u_max = self.u_max(z)
        h = self.holding
        lam = self.lam

        def integrand(y):
            return h(y + z) * math.exp(-lam * y)

        points = [0.0] + sorted(k - z for k in h.kinks if 0.0 < k - z < u_max) + [u_max]
        tol = self.quadrature.tol * self.mu / lam
        value = 0.0
        for lo, hi in zip(points[:-1], points[1:]):
            v, _ = adaptive_simpson(integrand, lo, hi, tol * (hi - lo) / u_max, max_depth=self.quadrature.max_depth)
            value += v
        return value

    def _g0(self, z):
        if np.ndim(z) == 0:
            return self.lam / self.mu * self._integral(z)
        out = np.empty(np.shape(z))
        for idx, zz in np.ndenumerate(z):
            out[idx] = self.lam / self.mu * self._integral(zz)
        return out

    def _g0_prime(self, z):
        # (lam/mu) * (lam * int h(y+z) e^{-lam y} dy - h(z))
        return self.lam * self._g0(z) - self.lam / self.mu * self.holding(z)

    def _antiderivative(self, z):
        raise NotImplementedError('no closed-form antiderivative for {}'.format(self.holding.kind))


_closed_form_kernels = {
    'piecewise_linear': PiecewiseLinearKernel,
    'quadratic': QuadraticKernel,
}


def create_kernel(holding, demand, quadrature):
    """Closed form for the built-in kinds unless the quadrature scheme forces 'simpson'."""
    if quadrature.scheme == 'auto' and holding.kind in _closed_form_kernels:
        kernel = _closed_form_kernels[holding.kind](holding, demand, quadrature)
    elif quadrature.scheme in ('auto', 'simpson'):
        kernel = QuadratureKernel(holding, demand, quadrature)
    else:
        raise ValueError('Unknown quadrature scheme ({})'.format(quadrature.scheme))
    logger.debug('Created {} for {} holding'.format(kernel.__class__.__name__, holding.kind))
    return kernel
