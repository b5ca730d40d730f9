""" Scalar and vectorized numerical building blocks

Adaptive Simpson quadrature with Richardson correction, bisection (scalar and
lane-wise over numpy arrays), geometric bracket expansion and golden-section search.
"""
import logging
import math
from typing import Callable

import numpy as np

from .. import params
from ..errors import QuadratureError, RootFindError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


def adaptive_simpson(
        f: Callable[[float], float],
        a: float,
        b: float,
        tol: float = params.quad_tol,
        max_depth: int = params.simpson_max_depth,
        min_depth: int = params.simpson_min_depth,
) -> tuple:
    """Adaptive Simpson's rule integration.

    Args:
        f: Function to integrate.
        a: Lower bound.
        b: Upper bound.
        tol: Absolute error tolerance.
        max_depth: Maximum recursion depth.
        min_depth: Subdivisions always performed before accepting a panel.

    Returns:
        Tuple of (integral_value, error_estimate).

    Raises:
        QuadratureError: If max_depth is reached without meeting tol.
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        result, error = adaptive_simpson(f, b, a, tol, max_depth, min_depth)
        return -result, error
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError('adaptive_simpson needs finite bounds, got [{}, {}]'.format(a, b))

    exhausted = [False]

    def _simpson(fa, fm, fb, h):
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def _adaptive(a, b, fa, fm, fb, s_whole, depth, tol):
        m = (a + b) / 2.0
        h = (b - a) / 2.0
        lm = (a + m) / 2.0
        rm = (m + b) / 2.0
        flm = f(lm)
        frm = f(rm)

        s_left = _simpson(fa, flm, fm, h / 2.0)
        s_right = _simpson(fm, frm, fb, h / 2.0)
        s_combined = s_left + s_right
        error_estimate = (s_combined - s_whole) / 15.0

        if depth >= min_depth and abs(error_estimate) < tol:
            # Richardson extrapolation
            return s_combined + error_estimate, abs(error_estimate)
        if depth >= max_depth:
            exhausted[0] = True
            return s_combined + error_estimate, abs(error_estimate)

        left_result, left_error = _adaptive(a, m, fa, flm, fm, s_left, depth + 1, tol / 2.0)
        right_result, right_error = _adaptive(m, b, fm, frm, fb, s_right, depth + 1, tol / 2.0)
        return left_result + right_result, left_error + right_error

    fa = f(a)
    fb = f(b)
    m = (a + b) / 2.0
    fm = f(m)
    s_whole = _simpson(fa, fm, fb, (b - a) / 2.0)
    result, error = _adaptive(a, b, fa, fm, fb, s_whole, 0, tol)
    if not math.isfinite(result):
        raise QuadratureError('non-finite integral on [{}, {}]'.format(a, b))
    if exhausted[0] and error > tol:
        raise QuadratureError('adaptive Simpson on [{:.6g}, {:.6g}] reached depth {} with error {:.3g} > {:.3g}'.format(
            a, b, max_depth, error, tol))
    return result, error


def integrate_pieces(f, points, tol=params.quad_tol, **kwargs):
    """Integrate over consecutive sorted points, splitting the tolerance by length."""
    points = [float(p) for p in points]
    total_len = points[-1] - points[0]
    value = error = 0.0
    for lo, hi in zip(points[:-1], points[1:]):
        if hi <= lo:
            continue
        v, e = adaptive_simpson(f, lo, hi, tol * (hi - lo) / total_len, **kwargs)
        value += v
        error += e
    return value, error


def bisect(f, lo, hi, max_iter=params.root_max_iter, xtol=0.0):
    """Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must differ in sign.

    Iterates until the bracket no longer shrinks in floating point, or to xtol.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootFindError('no sign change on [{:.6g}, {:.6g}]: f = {:.6g}, {:.6g}'.format(lo, hi, flo, fhi))
    for _ in range(max_iter):
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fmid = f(mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    else:
        raise RootFindError('bisection did not converge in {} iterations on [{:.6g}, {:.6g}]'.format(
            max_iter, lo, hi))
    return lo + 0.5 * (hi - lo)


def bisect_array(f, lo, hi, max_iter=params.root_max_iter):
    """Lane-wise bisection; f maps an array of points to an array of values.

    Each lane must have f(lo) <= 0 <= f(hi) (increasing convention). Lanes stop
    once their bracket is exhausted in floating point.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(max_iter):
        mid = lo + 0.5 * (hi - lo)
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        fmid = f(mid)
        go_right = active & (fmid <= 0)
        go_left = active & (fmid > 0)
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_left, mid, hi)
    else:
        raise RootFindError('lane-wise bisection did not converge in {} iterations'.format(max_iter))
    return lo + 0.5 * (hi - lo)


def expand_bracket(pred, start, width=1.0, factor=params.bracket_factor, cap=params.bracket_cap, direction=1):
    """Return the first x = start + direction*width*factor**j with pred(x) true.

    Raises RootFindError once width passes cap.
    """
    while width <= cap:
        x = start + direction * width
        if pred(x):
            return x
        width *= factor
    raise RootFindError('bracket expansion from {:.6g} passed the cap {:.3g}'.format(start, cap))


def golden_section(f, a, b, tol=params.golden_tol, max_iter=params.root_max_iter):
    """Golden-section search for the minimum of a unimodal f on [a, b].

    Returns (x, f(x)) for the best interior point evaluated.
    """
    (a, b) = (min(a, b), max(a, b))
    h = b - a
    c = a + params.invphi2 * h
    d = a + params.invphi * h
    yc = f(c)
    yd = f(d)
    best = (c, yc) if yc <= yd else (d, yd)
    n = 0
    while h > tol * (1.0 + abs(c)) and n < max_iter:
        n += 1
        if yc <= yd:
            b = d
            d = c
            yd = yc
            h = params.invphi * h
            c = a + params.invphi2 * h
            yc = f(c)
            if yc <= best[1]:
                best = (c, yc)
        else:
            a = c
            c = d
            yc = yd
            h = params.invphi * h
            d = a + params.invphi * h
            yd = f(d)
            if yd < best[1]:
                best = (d, yd)
    logger.debug('golden section: {} iterations, x={:.10g}'.format(n, best[0]))
    return best
