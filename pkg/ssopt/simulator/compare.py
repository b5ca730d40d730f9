import logging
import math

import pandas as pd

from .estimate import estimate_ac
from .policy import BoundedModificationPolicy, create_policy

logger = logging.getLogger(__name__)

COLUMNS = ['m', 'ac_m', 'ac', 'bound', 'std_error_m', 'std_error', 'holds', 'coupling_violations']


def comparison_bound(instance, m):
    """4*mu*K_bar/m"""
    return 4.0 * instance.demand.mu * instance.setup.k_bar / m


def comparison_experiment(base_policy, m_list, config, instance, progress=False, workers=None) -> pd.DataFrame:
    """ Average cost of Y_m against its base policy Y on the same paths, one row per m

    ``holds`` is AC(Y_m) <= AC(Y) + 4*mu*K_bar/m + 3 * combined standard error.
    """
    base = create_policy(base_policy)
    rows = []
    for m in m_list:
        est = estimate_ac(BoundedModificationPolicy(base, m), config, instance, progress=progress, workers=workers)
        se_m, se = est.std_error, est.coupled.std_error
        combined = math.sqrt(se_m ** 2 + se ** 2) if not (math.isnan(se_m) or math.isnan(se)) else 0.0
        bound = comparison_bound(instance, m)
        holds = est.avg_cost <= est.coupled.avg_cost + bound + 3.0 * combined
        rows.append({
            'm': int(m), 'ac_m': est.avg_cost, 'ac': est.coupled.avg_cost, 'bound': bound,
            'std_error_m': se_m, 'std_error': se, 'holds': bool(holds),
            'coupling_violations': est.coupling_violations,
        })
        logger.info('m={}: AC(Y_m)={:.6g} AC(Y)={:.6g} bound={:.6g} holds={}'.format(
            m, est.avg_cost, est.coupled.avg_cost, bound, holds))
    return pd.DataFrame(rows, columns=COLUMNS)
