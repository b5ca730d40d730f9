import logging

from ..analytics import Analytics, AnalyticsContext, CertificateConfig, vstar_certificate
from .constant import solve_constant
from .grid import GridConfig, solve_grid
from .results import SolveResult
from .step import solve_step

logger = logging.getLogger(__name__)

_methods = ('auto', 'step', 'grid')


def _constant_result(analytics):
    sol = solve_constant(analytics, analytics.setup.values[0])
    return SolveResult(sol.s_hat, sol.S_hat, sol.nu_hat, 'constant_k', constant=sol)


def solve(instance, method='auto', cross_check=False, context=None, certificate_config=None, grid_config=None,
          certify=True, workers=None) -> SolveResult:
    """ Optimal (s, S) policy of a validated instance

    'auto' runs the constant-K solver for a constant setup and the step
    algorithm otherwise; 'step' forces the step algorithm; 'grid' runs the
    grid search. The answer is checked with the V* certificate and, with
    ``cross_check``, compared with the grid search.
    """
    if method not in _methods:
        raise ValueError('Unknown solve method ({}), expected one of {}'.format(method, _methods))
    context = context or AnalyticsContext(instance)
    certificate_config = certificate_config or CertificateConfig()
    grid_config = grid_config or GridConfig()
    analytics = Analytics(context)

    if method == 'grid':
        result = solve_grid(analytics, grid_config, workers=workers)
    elif method == 'auto' and analytics.setup.kind == 'constant':
        result = _constant_result(analytics)
    else:
        result = solve_step(analytics, workers=workers)

    result.tolerances = {
        'quadrature': context.to_dict()['quadrature'],
        'rootfind': context.to_dict()['rootfind'],
        'certificate': certificate_config.to_dict(),
        'grid': grid_config.to_dict(),
    }

    if certify:
        result.certificate = vstar_certificate(analytics, result.s_star, result.S_star, result.nu_star,
                                               certificate_config)
        if not result.certificate.passed:
            logger.warning('certificate failed for (s*, S*) = ({:.8g}, {:.8g}): {}'.format(
                result.s_star, result.S_star, ', '.join(result.certificate.failures)))

    if cross_check and method != 'grid':
        grid = solve_grid(analytics, grid_config, workers=workers)
        result.grid_check = {
            'nu_grid': grid.nu_star,
            's_grid': grid.s_star,
            'S_grid': grid.S_star,
            'gap': abs(grid.nu_star - result.nu_star),
        }
        logger.info('grid cross-check: nu_grid={:.10g} gap={:.3g}'.format(grid.nu_star, result.grid_check['gap']))

    logger.info('{}: s*={:.10g} S*={:.10g} nu*={:.10g}'.format(result.method, result.s_star, result.S_star,
                                                               result.nu_star))
    return result
