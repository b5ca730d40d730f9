""" Exact optimum for a step setup cost

Step 1 solves z*; with K_1 = 0 the base stock policy at z* is optimal.
Otherwise each piece n is solved as a constant-K problem (Step 2), the
constant-K order quantity is classified against (Q_{n-1}, Q_n) and clamped
into it (Step 3), the pieces whose clamped quantity really pays K_n form the
candidate set and get their matched levels and cost (Step 4), and the
cheapest candidate with the smallest index wins (Step 5).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

from ..errors import InternalError
from ..utils import num_threads
from .constant import solve_constant
from .results import N_EQUAL, N_GREATER, N_LESS, CandidateRow, CandidateTable, SolveResult

logger = logging.getLogger(__name__)

_TIE_RTOL = 1e-12


def base_stock_result(analytics, reason='K_1 = 0'):
    z = analytics.z_star()
    nu = analytics.k * analytics.mu + analytics.mu * analytics.g0(z)
    logger.debug('base stock optimum ({}): z*={:.10g} nu={:.10g}'.format(reason, z, nu))
    return SolveResult(z, z, nu, 'base_stock', diagnostics={'z_star': z, 'reason': reason})


def classify(xi_hat, q_lo, q_hi):
    """Index set and clamped order quantity xi* of one piece."""
    if xi_hat <= q_lo:
        return N_LESS, q_lo
    if xi_hat >= q_hi:
        return N_GREATER, q_hi
    return N_EQUAL, xi_hat


def _ties(rows, nu_best):
    return [r for r in rows if r.nu_n <= nu_best + _TIE_RTOL * (1.0 + abs(nu_best))]


def solve_step(analytics, workers=None) -> SolveResult:
    setup = analytics.setup
    if setup.values[0] == 0:
        return base_stock_result(analytics)

    pieces = list(range(1, setup.num_pieces + 1))
    workers = workers or num_threads()
    with ThreadPoolExecutor(max_workers=min(workers, len(pieces))) as pool:
        solutions = list(pool.map(
            lambda n: solve_constant(analytics, setup.values[n - 1], with_residuals=False), pieces))

    rows = []
    for n, sol in zip(pieces, solutions):
        q_lo, q_hi = setup.interval(n)
        K_n = setup.values[n - 1]
        membership, xi_star = classify(sol.xi_hat, q_lo, q_hi)
        in_set = bool(setup(xi_star) == K_n) if math.isfinite(xi_star) else False
        nu_tilde = analytics.theta(xi_star, setup_value=K_n) if math.isfinite(xi_star) else math.inf
        row = CandidateRow(n, q_lo, q_hi, K_n, sol.nu_hat, sol.s_hat, sol.S_hat, sol.xi_hat, xi_star,
                           membership, in_set, nu_tilde)
        if in_set:
            if membership == N_EQUAL:
                row.s_n, row.S_n, row.nu_n = sol.s_hat, sol.S_hat, sol.nu_hat
            else:
                ml = analytics.matched_levels(xi_star)
                row.s_n, row.S_n = ml.s_tilde, ml.S_tilde
                row.nu_n = analytics.gamma(ml.s_tilde, ml.S_tilde, setup_value=K_n)
        logger.debug('piece {}: K={:g} xi_hat={:.8g} {} xi*={:.8g} candidate={} nu_tilde={:.10g}'.format(
            n, K_n, sol.xi_hat, membership, xi_star, in_set, nu_tilde))
        rows.append(row)

    table = CandidateTable(rows)
    candidates = table.candidates()
    if not candidates:
        raise InternalError('empty candidate set for setup {!r}'.format(setup))

    candidate_ids = [r.n for r in candidates]
    for row in rows:
        if row.in_candidate_set:
            continue
        if row.membership == N_LESS:
            lower = [j for j in candidate_ids if j < row.n]
            row.chi_lower = max(lower) if lower else None
            ref = row.chi_lower
        else:
            upper = [j for j in candidate_ids if j > row.n]
            row.chi_upper = min(upper) if upper else None
            ref = row.chi_upper
        # a dropped piece is strictly beaten by its nearest candidate on the side it was clamped to
        row.pruned_ok = ref is not None and table[ref].nu_n < row.nu_tilde
        if not row.pruned_ok:
            logger.warning('piece {} pruned without a cheaper neighbouring candidate'.format(row.n))

    nu_best = min(r.nu_n for r in candidates)
    tied = _ties(candidates, nu_best)
    best = tied[0]  # smallest index among minimizers
    by_xi = min(tied, key=lambda r: (r.S_n - r.s_n, r.n))
    diagnostics = {
        'z_star': analytics.z_star(),
        'n_star': best.n,
        'n_star_smallest_xi': by_xi.n,
        'candidate_set': candidate_ids,
        'index_sets': {m: table.members(m) for m in (N_LESS, N_EQUAL, N_GREATER)},
        'alternates': [{'n': r.n, 's': r.s_n, 'S': r.S_n, 'nu': r.nu_n} for r in tied if r.n != best.n],
    }
    logger.debug('n*={} (smallest xi choice {}), nu*={:.10g}'.format(best.n, by_xi.n, best.nu_n))
    return SolveResult(best.s_n, best.S_n, best.nu_n, 'step_algorithm', candidate_table=table,
                       diagnostics=diagnostics)
