import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .. import params
from ..analytics.numerics import expand_bracket, golden_section
from ..utils import num_threads
from .results import SolveResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridConfig:
    log_points: int = params.grid_log_points
    uniform_points: int = params.grid_uniform_points
    golden_tol: float = params.golden_tol
    xi0: float = params.grid_xi0
    span_factor: float = params.grid_span_factor

    def __post_init__(self):
        if self.log_points < 2 or self.uniform_points < 2:
            raise ValueError('grid search needs at least 2 log and 2 uniform points per cell')
        if self.golden_tol <= 0:
            raise ValueError('golden_tol must be positive, got {}'.format(self.golden_tol))

    def to_dict(self):
        return asdict(self)


def _xi_max(analytics, incumbent, xi_incumbent, config):
    """First xi_max = 8*span*2^j with theta(xi_max) > incumbent + K_bar*mu/xi_max."""
    k_bar = analytics.setup.k_bar
    mu = analytics.mu
    width = config.span_factor * max(xi_incumbent, config.xi0)
    rf = analytics.rootfind
    return expand_bracket(lambda x: analytics.theta(x) > incumbent + k_bar * mu / x, 0.0, width=width,
                          factor=rf.expansion, cap=rf.cap, direction=1)


def _cells(breakpoints, xi_max):
    edges = [0.0] + [q for q in breakpoints if q < xi_max] + [xi_max]
    return list(zip(edges[:-1], edges[1:]))


def _scan_cell(analytics, lo, hi, K, include_hi, config):
    """Best (xi, theta) over the open cell (lo, hi) where K is constant."""
    log_lo = lo if lo > 0 else hi * 1e-8
    xs = np.union1d(np.geomspace(log_lo, hi, config.log_points), np.linspace(lo, hi, config.uniform_points))
    keep = (xs > lo) & ((xs < hi) | (include_hi & (xs == hi)))
    xs = xs[keep]
    if xs.size == 0:
        return math.inf, math.inf, 0
    values, _, _ = analytics.theta_array(xs, setup_values=K)
    i = int(np.argmin(values))
    a = xs[i - 1] if i > 0 else lo
    b = xs[i + 1] if i + 1 < xs.size else hi
    best_x, best_v = float(xs[i]), float(values[i])
    if b > a:
        x, v = golden_section(lambda x: analytics.theta(x, setup_value=K) if lo < x < hi else math.inf,
                              a, b, tol=config.golden_tol)
        if v < best_v:
            best_x, best_v = float(x), float(v)
    return best_x, best_v, int(xs.size)


def solve_grid(analytics, config: GridConfig = None, workers=None) -> SolveResult:
    """ Minimize theta over xi by grid search with golden-section refinement

    The search runs over (0, xi_max] split into the continuity cells of K,
    and also evaluates every breakpoint with its own K value and xi = 0 when
    ell is finite. Among equal costs the smallest xi wins.
    """
    config = config or GridConfig()
    setup = analytics.setup
    points = [(config.xi0, analytics.theta(config.xi0))]
    if analytics.ell.is_finite:
        points.append((0.0, analytics.theta(0.0)))
    xi_inc, incumbent = min(points, key=lambda p: (p[1], p[0]))
    xi_max = _xi_max(analytics, incumbent, xi_inc, config)

    cells = _cells(setup.breakpoints, xi_max)
    workers = workers or num_threads()

    def scan(cell):
        lo, hi = cell
        K = float(setup(0.5 * (lo + hi)))
        return _scan_cell(analytics, lo, hi, K, hi == xi_max, config)

    with ThreadPoolExecutor(max_workers=min(workers, len(cells))) as pool:
        scanned = list(pool.map(scan, cells))

    evaluations = len(points)
    for xi, value, n_eval in scanned:
        points.append((xi, value))
        evaluations += n_eval
    for q in setup.breakpoints:
        if q < xi_max:
            points.append((q, analytics.theta(q)))
            evaluations += 1

    best = min(v for _, v in points)
    xi_opt = min(x for x, v in points if v <= best + 1e-12 * (1.0 + abs(best)))
    ml = analytics.matched_levels(xi_opt)
    logger.debug('grid: xi_max={:.6g} cells={} evaluations={} xi_opt={:.10g} theta={:.10g}'.format(
        xi_max, len(cells), evaluations, xi_opt, best))
    diagnostics = {
        'xi_max': xi_max,
        'cells': [list(c) for c in cells],
        'evaluations': evaluations,
        'xi_opt': xi_opt,
        'grid': config.to_dict(),
    }
    return SolveResult(ml.s_tilde, ml.S_tilde, best, 'grid', diagnostics=diagnostics)
