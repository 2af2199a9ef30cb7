"""Shared numerical helpers: stable ln(1 − e^{−y}) forms and scan + golden maximization."""

from __future__ import annotations

import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
GOLDEN_XTOL = 1e-10
# Beyond this y, −ln(1 − e^{−y}) = e^{−y}(1 + e^{−y}/2 + …) to double precision.
_TAIL_Y = 30.0


def log1mexp(y):
    """ln(1 − e^{−y}) for y > 0 without cancellation at either end."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.where(
            y >= LN2,
            np.log1p(-np.exp(-y)),
            np.log(-np.expm1(-y)),
        )
    return out


def log_neg_log1mexp(y):
    """ln{−ln(1 − e^{−y})} for y > 0, finite even where e^{−y} underflows."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        near = np.log(-log1mexp(np.minimum(y, _TAIL_Y)))
        far = -y + np.log1p(0.5 * np.exp(-y))
    return np.where(y > _TAIL_Y, far, near)


def log1mexp_terms(log_y) -> Tuple[np.ndarray, np.ndarray]:
    """Both ln(1 − e^{−y}) and ln{−ln(1 − e^{−y})} from ln y.

    Working from ln y keeps the pair finite when y itself would underflow
    (λ → 0 in log space) or overflow.
    """
    log_y = np.asarray(log_y, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        y = np.exp(log_y)
    small = log_y < -20.0
    with np.errstate(divide="ignore", invalid="ignore"):
        # 1 − e^{−y} = y(1 − y/2 + …) for tiny y
        l1m_small = log_y + np.log1p(-0.5 * y)
        l1m = np.where(small, l1m_small, log1mexp(np.where(small, 1.0, y)))
        lnl = np.where(small, np.log(-l1m_small), log_neg_log1mexp(np.where(small, 1.0, y)))
    return l1m, lnl


def scalar_or_array(out: np.ndarray):
    """Unwrap 0-d results so scalar callers get a plain float."""
    return float(out) if np.ndim(out) == 0 else out


# ── Scan + golden-section maximization ───────────────────────────────────────

def golden_maximize(
    f: Callable[[float], float],
    lo: float,
    mid: float,
    hi: float,
    xtol: float = GOLDEN_XTOL,
) -> Tuple[float, float, int]:
    """Refine a scan maximum with golden-section search.

    ``(lo, mid, hi)`` must bracket the maximum, i.e. ``f(mid)`` is at least
    ``f(lo)`` and ``f(hi)``. ``xtol`` is relative to the abscissa.

    Returns
    -------
    (x, f(x), iterations)
    """
    f_mid = float(f(mid))
    try:
        res = minimize_scalar(
            lambda x: -float(f(x)),
            bracket=(lo, mid, hi),
            method="golden",
            options={"xtol": xtol},
        )
    except ValueError:
        # Flat top: neighbours tie with the scan point.
        logger.debug("golden bracket degenerate at %.6g; keeping scan point", mid)
        return mid, f_mid, 0

    x, fx = float(res.x), -float(res.fun)
    if not (lo <= x <= hi) or fx < f_mid:
        return mid, f_mid, int(res.nit)
    return x, fx, int(res.nit)


def scan_argmax(values: np.ndarray) -> int:
    """Index of the largest finite value; −1 when every value is −∞ or NaN."""
    vals = np.where(np.isnan(values), -np.inf, values)
    if not np.any(np.isfinite(vals)):
        return -1
    return int(np.argmax(vals))
