import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import InternalError, KinkError
from ..model.setup_cost import ExtendedReal
from .context import AnalyticsContext
from .kernel import create_kernel
from .numerics import adaptive_simpson, bisect, bisect_array, expand_bracket, integrate_pieces

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchedLevels:
    s_tilde: float
    S_tilde: float
    xi: float

    def to_dict(self):
        return {'s_tilde': self.s_tilde, 'S_tilde': self.S_tilde, 'xi': self.xi}


class Analytics:
    """ Closed-form and quadrature functions of a validated instance

    Everything is a pure function of the context; z* is solved once on
    construction and never mutated afterwards, so one object can be shared
    across threads.
    """

    def __init__(self, context) -> None:
        if not isinstance(context, AnalyticsContext):
            context = AnalyticsContext(context)
        self.context = context
        self.instance = context.instance
        self.demand = self.instance.demand
        self.holding = self.instance.holding
        self.setup = self.instance.ordering.setup
        self.k = self.instance.ordering.k
        self.mu = self.demand.mu
        self.lam = self.demand.lam
        self.ell = self.setup.ell()
        self.rootfind = context.rootfind
        self.kernel = create_kernel(self.holding, self.demand, context.quadrature)
        self._z_star = self._solve_z_star()
        self._g0_star = self.kernel.g0(self._z_star)

    # -- g0 and its minimizer -------------------------------------------------

    def g0(self, z):
        return self.kernel.g0(z)

    def g0_prime(self, z):
        """g0'(z); rejected exactly at a kink of h."""
        kinks = self.holding.kinks
        if kinks and np.any(np.isin(np.asarray(z, dtype=float), kinks)):
            raise KinkError('g0_prime is not evaluated at a kink of h (kinks: {})'.format(list(kinks)))
        return self.kernel.g0_prime(z)

    def _solve_z_star(self):
        g0p = self.kernel.g0_prime
        if not g0p(0.0) > 0:
            raise InternalError('g0\'(0) = {} is not positive; (H4) should rule this out'.format(g0p(0.0)))
        lo = expand_bracket(lambda x: g0p(x) < 0, 0.0, width=1.0, factor=self.rootfind.expansion,
                            cap=self.rootfind.cap, direction=-1)
        z = bisect(g0p, lo, 0.0, max_iter=self.rootfind.max_iter)
        resid = abs(g0p(z))
        if resid > self.rootfind.tol:
            logger.warning('z* residual {:.3g} exceeds root tol {:.3g}'.format(resid, self.rootfind.tol))
        logger.debug('z* = {:.12g} (bracket [{:.6g}, 0], residual {:.3g})'.format(z, lo, resid))
        return z

    def z_star(self):
        return self._z_star

    @property
    def g0_star(self):
        """g0(z*) = min g0"""
        return self._g0_star

    # -- integrals of g0 -------------------------------------------------------

    def integrate_g0(self, a, b):
        """int_a^b g0(y) dy"""
        if self.kernel.closed_form:
            return self.kernel.antiderivative(b) - self.kernel.antiderivative(a)
        if a == b:
            return 0.0
        sign = 1.0
        if a > b:
            a, b, sign = b, a, -1.0
        points = [a] + sorted(k for k in self.holding.kinks if a < k < b) + [b]
        value, _ = integrate_pieces(self.kernel.g0, points, tol=self.context.quadrature.tol,
                                    max_depth=self.context.quadrature.max_depth)
        return sign * value

    def integrate_g0_array(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kernel.closed_form:
            return self.kernel.antiderivative(b) - self.kernel.antiderivative(a)
        a, b = np.broadcast_arrays(a, b)
        out = np.empty(a.shape)
        for idx in np.ndindex(a.shape):
            out[idx] = self.integrate_g0(float(a[idx]), float(b[idx]))
        return out

    def integrate_g0_from(self, anchor, points):
        """int_anchor^z g0 for every z in points, accumulating over sorted neighbours."""
        points = np.asarray(points, dtype=float)
        if self.kernel.closed_form:
            return self.kernel.antiderivative(points) - self.kernel.antiderivative(anchor)
        flat = points.ravel()
        order = np.argsort(flat)
        out = np.empty(flat.size)
        # walk outward from the anchor in both directions
        right = [i for i in order if flat[i] >= anchor]
        left = [i for i in order[::-1] if flat[i] < anchor]
        for side in (right, left):
            prev, acc = anchor, 0.0
            for i in side:
                acc += self.integrate_g0(prev, float(flat[i]))
                prev = float(flat[i])
                out[i] = acc
        return out.reshape(points.shape)

    # -- matched levels --------------------------------------------------------

    def matched_levels_array(self, xi):
        """(s_tilde, S_tilde) arrays with g0(s_tilde) = g0(s_tilde + xi); xi = 0 maps to (z*, z*)."""
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < 0):
            raise ValueError('matched levels need xi >= 0')
        z = self._z_star
        g0 = self.kernel.g0
        xi_flat = xi.ravel()
        s = np.full(xi_flat.shape, z)
        pos = xi_flat > 0
        if pos.any():
            width = xi_flat[pos]
            s[pos] = bisect_array(lambda x: g0(x + width) - g0(x), z - width, np.full(width.shape, z),
                                  max_iter=self.rootfind.max_iter)
        s = s.reshape(xi.shape)
        return s, s + xi

    def matched_levels(self, xi) -> MatchedLevels:
        if xi < 0:
            raise ValueError('matched_levels needs xi >= 0, got {}'.format(xi))
        if xi == 0:
            return MatchedLevels(self._z_star, self._z_star, 0.0)
        s, S = self.matched_levels_array(np.array([float(xi)]))
        return MatchedLevels(float(s[0]), float(S[0]), float(xi))

    # -- average costs ---------------------------------------------------------

    def _ell_for(self, setup_value):
        if setup_value is None:
            return self.ell
        return ExtendedReal.inf() if setup_value > 0 else ExtendedReal.finite(0.0)

    def base_stock_cost(self, s, setup_value=None):
        """H(s) = (k + ell)*mu + mu*g0(s); inf when ell is inf."""
        ell = self._ell_for(setup_value)
        if ell.infinite:
            return math.inf
        return (self.k + ell.value) * self.mu + self.mu * self.kernel.g0(s)

    def gamma(self, s, S, setup_value=None):
        """Long-run average cost of the (s, S) policy.

        ``setup_value`` replaces K(S - s), which is how the per-piece costs
        gamma_n are evaluated.
        """
        if s > S:
            raise ValueError('gamma needs s <= S, got s={} > S={}'.format(s, S))
        if s == S:
            return self.base_stock_cost(s, setup_value)
        xi = S - s
        K = self.setup(xi) if setup_value is None else setup_value
        return self.k * self.mu + K * self.mu / xi + self.mu / xi * self.integrate_g0(s, S)

    def theta(self, xi, setup_value=None):
        """Minimum average cost among policies whose every order has size xi."""
        if xi < 0:
            raise ValueError('theta needs xi >= 0, got {}'.format(xi))
        if xi == 0:
            return self.base_stock_cost(self._z_star, setup_value)
        ml = self.matched_levels(xi)
        return self.gamma(ml.s_tilde, ml.S_tilde, setup_value)

    def theta_array(self, xi, setup_values=None):
        """Vectorized theta; returns (theta, s_tilde, S_tilde)."""
        xi = np.asarray(xi, dtype=float)
        s, S = self.matched_levels_array(xi)
        K = self.setup(xi) if setup_values is None else np.broadcast_to(np.asarray(setup_values, float), xi.shape)
        out = np.empty(xi.shape)
        pos = xi > 0
        if pos.any():
            out[pos] = (self.k * self.mu + K[pos] * self.mu / xi[pos]
                        + self.mu / xi[pos] * self.integrate_g0_array(s[pos], S[pos]))
        if (~pos).any():
            zero_K = K[~pos]
            if setup_values is None:
                out[~pos] = self.base_stock_cost(self._z_star)
            else:
                out[~pos] = [self.base_stock_cost(self._z_star, v) for v in zero_K]
        return out, s, S

    def expected_cycle_length(self, s, S):
        """Mean time between orders of an (s, S) policy, (S - s)/mu."""
        return (S - s) / self.mu

    # -- level sets and the constant-K integrals --------------------------------

    def level_set(self, y):
        """(s(y), S(y)) with g0(s(y)) = g0(S(y)) = y around z*."""
        y0 = self._g0_star
        if y < y0 - self.rootfind.tol * (1.0 + abs(y0)):
            raise ValueError('level y={} is below min g0 = {}'.format(y, y0))
        z = self._z_star
        if y <= y0:
            return z, z
        g0 = self.kernel.g0
        rf = self.rootfind
        lo = expand_bracket(lambda x: g0(x) >= y, z, factor=rf.expansion, cap=rf.cap, direction=-1)
        hi = expand_bracket(lambda x: g0(x) >= y, z, factor=rf.expansion, cap=rf.cap, direction=1)
        s = bisect(lambda x: y - g0(x), lo, z, max_iter=rf.max_iter)
        S = bisect(lambda x: g0(x) - y, z, hi, max_iter=rf.max_iter)
        return s, S

    def lambda_measure(self, y):
        """Lebesgue measure of {u : g0(u) <= y}"""
        s, S = self.level_set(y)
        return S - s

    def big_I(self, u):
        """int_{g0(z*)}^u Lambda(y) dy, integrated in t with y = g0(z*) + t^2."""
        y0 = self._g0_star
        if u < y0 - self.rootfind.tol * (1.0 + abs(y0)):
            raise ValueError('big_I needs u >= min g0 = {}, got {}'.format(y0, u))
        if u <= y0:
            return 0.0
        value, _ = adaptive_simpson(lambda t: 2.0 * t * self.lambda_measure(y0 + t * t), 0.0, math.sqrt(u - y0),
                                    tol=self.context.quadrature.tol, max_depth=self.context.quadrature.max_depth)
        return value

    def big_L(self, xi):
        """int over [s_tilde, S_tilde] of (g0(s_tilde) - g0(y)) dy"""
        if xi <= 0:
            raise ValueError('big_L needs xi > 0, got {}'.format(xi))
        ml = self.matched_levels(xi)
        return xi * self.kernel.g0(ml.s_tilde) - self.integrate_g0(ml.s_tilde, ml.S_tilde)

    # -- relative value ----------------------------------------------------------

    def relative_value(self, z, s, nu):
        """V(z) = -(z - s)*nu/mu + int_s^z g0, with V(s) = 0."""
        if np.ndim(z) == 0:
            return -(z - s) * nu / self.mu + self.integrate_g0(s, z)
        z = np.asarray(z, dtype=float)
        return -(z - s) * nu / self.mu + self.integrate_g0_from(s, z)

    def generator_residual(self, z, s, nu, step=1e-4):
        """(sigma2/2) V'' - mu V' + h - nu by central differences."""
        sigma2 = self.demand.sigma2
        v = self.relative_value(np.array([z - step, z, z + step]), s, nu)
        d1 = (v[2] - v[0]) / (2 * step)
        d2 = (v[2] - 2 * v[1] + v[0]) / step ** 2
        return 0.5 * sigma2 * d2 - self.mu * d1 + self.holding(z) - nu

    def describe(self):
        out = dict(self.kernel.describe())
        out.update({'z_star': self._z_star, 'g0_star': self._g0_star, 'ell': self.ell.to_json()})
        return out
