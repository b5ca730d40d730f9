import logging

from .. import params
from ..analytics.numerics import bisect, expand_bracket
from .results import ConstantKSolution

logger = logging.getLogger(__name__)


def solve_constant(analytics, kappa, with_residuals=True) -> ConstantKSolution:
    """ Optimal (s, S) when every order pays the same setup cost kappa

    kappa = 0 gives the base stock policy at z*. Otherwise xi_hat is the root
    of the strictly increasing L(xi) = kappa, the levels are the matched levels
    at xi_hat and nu_hat = k*mu + mu*g0(s_hat).
    """
    kappa = float(kappa)
    if kappa < 0:
        raise ValueError('solve_constant needs kappa >= 0, got {}'.format(kappa))
    mu, k = analytics.mu, analytics.k
    if kappa == 0:
        z = analytics.z_star()
        return ConstantKSolution(0.0, 0.0, z, z, k * mu + mu * analytics.g0(z), {})

    rf = analytics.rootfind

    def excess(xi):
        return analytics.big_L(xi) - kappa if xi > 0 else -kappa

    hi = expand_bracket(lambda x: excess(x) >= 0, 0.0, width=1.0, factor=rf.expansion, cap=rf.cap, direction=1)
    lo = hi / rf.expansion if hi > 1.0 else 0.0
    xi_hat = bisect(excess, lo, hi, max_iter=rf.max_iter)
    ml = analytics.matched_levels(xi_hat)
    g0_s = analytics.g0(ml.s_tilde)
    nu_hat = k * mu + mu * g0_s

    residuals = {
        'L': abs(excess(xi_hat)),
        'matched': abs(analytics.g0(ml.S_tilde) - g0_s),
    }
    if with_residuals:
        residuals['I'] = abs(analytics.big_I(nu_hat / mu - k) - kappa)
        for name, value in residuals.items():
            scale = kappa if name != 'matched' else abs(g0_s)
            if value > params.residual_tol * (1.0 + scale):
                logger.warning('constant-K residual {} = {:.3g} for kappa={:g}'.format(name, value, kappa))
    logger.debug('kappa={:g}: xi_hat={:.10g} s_hat={:.10g} S_hat={:.10g} nu_hat={:.10g}'.format(
        kappa, xi_hat, ml.s_tilde, ml.S_tilde, nu_hat))
    return ConstantKSolution(kappa, xi_hat, ml.s_tilde, ml.S_tilde, nu_hat, residuals)
