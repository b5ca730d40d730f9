""" Relative value functions and the V* lower-bound certificate

V solves (sigma2/2) V'' - mu V' + h = nu with V(s) = 0. V* is the relative
value at the candidate cost, flattened below a far-left level s_lower; a
candidate (s*, S*, nu*) is certified when V* satisfies the lower-bound
inequality, the order-cost inequality and the derivative growth bounds on a
finite grid.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .. import params
from .numerics import expand_bracket

logger = logging.getLogger(__name__)


class RelativeValue:
    """V(z) = -(z - s)*nu/mu + int_s^z g0."""

    def __init__(self, analytics, nu, s_anchor) -> None:
        self.analytics = analytics
        self.nu = float(nu)
        self.s_anchor = float(s_anchor)

    def __call__(self, z):
        return self.analytics.relative_value(z, self.s_anchor, self.nu)

    def derivative(self, z):
        return -self.nu / self.analytics.mu + self.analytics.g0(z)

    def residual(self, z, step=1e-4):
        return self.analytics.generator_residual(z, self.s_anchor, self.nu, step=step)


class VStar:
    """ Relative value at gamma_c anchored at s_lower, linear below s_lower

    V*(z)   = -(gamma_c/mu)(z - s_lower) + int_{s_lower}^z g0(max(y, s_lower)) dy
    V*'(z)  = -gamma_c/mu + g0(max(z, s_lower))
    V*''(z) = g0'(z) above s_lower, 0 below
    """

    def __init__(self, analytics, gamma_c, s_lower) -> None:
        self.analytics = analytics
        self.gamma_c = float(gamma_c)
        self.s_lower = float(s_lower)
        self._g0_lower = analytics.g0(self.s_lower)

    def __call__(self, z):
        a = self.analytics
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = -(self.gamma_c / a.mu) * (z - self.s_lower)
        above = z >= self.s_lower
        if above.any():
            out[above] += a.integrate_g0_from(self.s_lower, z[above])
        if (~above).any():
            out[~above] += self._g0_lower * (z[~above] - self.s_lower)
        return float(out[0]) if scalar else out

    def derivative(self, z):
        a = self.analytics
        return -self.gamma_c / a.mu + a.g0(np.maximum(z, self.s_lower))

    def second_derivative(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(z > self.s_lower, self.analytics.kernel.g0_prime(z), 0.0)

    def generator(self, z):
        """Gamma V*(z) + h(z)"""
        a = self.analytics
        z = np.asarray(z, dtype=float)
        return 0.5 * a.demand.sigma2 * self.second_derivative(z) - a.mu * self.derivative(z) + a.holding(z)


@dataclass(frozen=True)
class CertificateConfig:
    grid_points: int = params.cert_grid_points
    tol: float = params.cert_tol
    pairs: int = params.cert_pairs
    seed: int = params.cert_seed
    span_factor: float = params.cert_span_factor
    structured_points: int = params.cert_structured_points
    structured_xis: int = params.cert_structured_xis

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError('certificate grid needs at least 3 points, got {}'.format(self.grid_points))
        if self.tol <= 0:
            raise ValueError('certificate tol must be positive, got {}'.format(self.tol))
        if self.pairs < 0 or self.structured_points < 0 or self.structured_xis < 0:
            raise ValueError('certificate pair counts must be nonnegative')

    def to_dict(self):
        return asdict(self)


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    location: Optional[list] = None
    checked: int = 0
    message: str = ''

    def to_dict(self):
        return asdict(self)


@dataclass
class CertificateReport:
    passed: bool
    checks: List[CheckResult]
    s_lower: float
    xi_bar: float
    gamma_candidate: float
    nu_claimed: float
    grid: dict
    tol: float
    pairs: int
    failures: List[str] = field(default_factory=list)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            'passed': self.passed,
            'failures': list(self.failures),
            'checks': [c.to_dict() for c in self.checks],
            's_lower': self.s_lower,
            'xi_bar': self.xi_bar,
            'gamma_candidate': self.gamma_candidate,
            'nu_claimed': self.nu_claimed,
            'grid': dict(self.grid),
            'tol': self.tol,
            'pairs': self.pairs,
        }


def find_s_lower(analytics, s_star, S_star, gamma_c):
    """Return (xi_bar, s_tilde(xi_bar)) with theta(xi_bar) > K_bar*mu/xi_bar + gamma_c."""
    k_bar = analytics.setup.k_bar
    mu = analytics.mu
    rf = analytics.rootfind
    width = 2.0 * max(S_star - s_star, 1.0)
    xi_bar = expand_bracket(lambda x: analytics.theta(x) > k_bar * mu / x + gamma_c, 0.0, width=width,
                            factor=rf.expansion, cap=rf.cap, direction=1)
    return xi_bar, analytics.matched_levels(xi_bar).s_tilde


def _growth_bound(analytics, z, gamma_c, s_lower):
    w = analytics.holding.witness
    mu, lam = analytics.mu, analytics.lam
    left = gamma_c / mu + max(analytics.g0(s_lower), analytics.g0(0.0))
    moment = math.gamma(w.a + 1.0) / lam ** w.a
    zp = np.maximum(z, 0.0)
    right = gamma_c / mu + (w.b0 + w.b1 * max(2.0 ** (w.a - 1.0), 1.0) * (zp ** w.a + moment)) / mu
    return np.where(z < 0, left, right)


def _worst(slack, where):
    i = int(np.argmin(slack))
    return float(slack[i]), where(i)


def vstar_certificate(analytics, s_star, S_star, nu_star, config: CertificateConfig = None) -> CertificateReport:
    """Check the lower-bound certificate for a candidate optimum on a finite grid."""
    config = config or CertificateConfig()
    tol = config.tol
    gamma_c = analytics.gamma(s_star, S_star)
    checks = []

    if not math.isfinite(gamma_c):
        check = CheckResult('consistency', False, math.inf, [s_star, S_star], 1,
                            'candidate has infinite average cost')
        return CertificateReport(False, [check], math.nan, math.nan, gamma_c, float(nu_star), {}, tol, 0,
                                 ['consistency'])

    xi_bar, s_lower = find_s_lower(analytics, s_star, S_star, gamma_c)
    vstar = VStar(analytics, gamma_c, s_lower)

    span = config.span_factor * (S_star - s_star + 1.0)
    lo, hi = s_star - span, S_star + span
    grid = np.linspace(lo, hi, config.grid_points)
    grid_info = {'lo': lo, 'hi': hi, 'points': config.grid_points}
    logger.debug('certificate: s_lower={:.6g} xi_bar={:.6g} gamma_c={:.10g} grid=[{:.4g}, {:.4g}]'.format(
        s_lower, xi_bar, gamma_c, lo, hi))

    # (a) lower bound on the twice-differentiable grid points
    smooth = grid[grid != s_lower]
    slack = vstar.generator(smooth) - (nu_star - tol)
    worst, loc = _worst(slack, lambda i: [float(smooth[i])])
    checks.append(CheckResult('lower_bound', bool(worst >= 0), worst, loc, int(smooth.size),
                              'Gamma V* + h >= nu* - tol'))

    # (b) order-cost inequality on random and structured pairs
    values = vstar(grid)
    rng = np.random.default_rng(config.seed)
    i, j = rng.integers(0, grid.size, size=(2, config.pairs)) if config.pairs else (np.zeros(0, int),) * 2
    i, j = np.maximum(i, j), np.minimum(i, j)
    keep = i > j
    z1, z2 = grid[i[keep]], grid[j[keep]]
    v1, v2 = values[i[keep]], values[j[keep]]

    if config.structured_points and config.structured_xis:
        stride = max(1, grid.size // config.structured_points)
        base = grid[::stride]
        xis = [np.geomspace(1e-3 * (S_star - s_star + 1.0), hi - lo, config.structured_xis), [S_star - s_star]]
        for q in analytics.setup.breakpoints:
            xis.append([q - 1e-9, q + 1e-9])
        xis = np.concatenate(xis)
        xis = xis[xis > 0]
        sz2 = np.repeat(base, xis.size)
        sz1 = sz2 + np.tile(xis, base.size)
        z1 = np.concatenate([z1, sz1])
        z2 = np.concatenate([z2, sz2])
        v1 = np.concatenate([v1, vstar(sz1)])
        v2 = np.concatenate([v2, np.repeat(values[::stride], xis.size)])

    if z1.size:
        order_cost = analytics.instance.ordering(z1 - z2)
        slack = (v1 - v2) + order_cost + tol * (1.0 + np.abs(v1) + np.abs(v2))
        worst, loc = _worst(slack, lambda n: [float(z1[n]), float(z2[n])])
    else:
        worst, loc = math.inf, None
    checks.append(CheckResult('order_cost', bool(worst >= 0), worst, loc, int(z1.size),
                              'V*(z1) - V*(z2) >= -K(z1 - z2) - k(z1 - z2)'))

    # (c) growth of V*'
    bound = _growth_bound(analytics, grid, gamma_c, s_lower)
    slack = bound + tol - np.abs(vstar.derivative(grid))
    worst, loc = _worst(slack, lambda n: [float(grid[n])])
    checks.append(CheckResult('growth', bool(worst >= 0), worst, loc, int(grid.size), '|V*\'| within growth bound'))

    # (d) claimed cost against the recomputed one
    gap = abs(nu_star - gamma_c)
    limit = tol * (1.0 + abs(nu_star))
    checks.append(CheckResult('consistency', bool(gap <= limit), float(limit - gap), [s_star, S_star], 1,
                              '|nu* - gamma(s*, S*)| <= tol(1 + |nu*|)'))

    failures = [c.name for c in checks if not c.passed]
    for c in checks:
        if not c.passed:
            logger.warning('certificate check {} failed: worst slack {:.3g} at {}'.format(c.name, c.worst, c.location))
    return CertificateReport(not failures, checks, s_lower, xi_bar, gamma_c, float(nu_star), grid_info, tol,
                             int(z1.size), failures)
