"""Goodness-of-fit and sampler diagnostics.

  - One-sample Kolmogorov–Smirnov test (exact p-value for n ≤ 100)
  - Geweke z-score comparing an early and a late chain segment
  - Autocorrelation function
  - Scaled bias / scaled RMSE of an estimator across replications
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, asdict
from typing import Any, Callable, Literal, Sequence, Union

import numpy as np
from scipy.special import kolmogorov
from scipy.stats import kstwo

from models.errors import DegenerateChainError, DomainError
from models.params import Dataset

logger = logging.getLogger(__name__)

EXACT_KS_MAX_N = 100
MIN_GEWEKE_LENGTH = 100


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n: int
    method: Literal["exact", "asymptotic"]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ScaledErrors:
    sbias: float
    srmse: float


# ── Kolmogorov–Smirnov ───────────────────────────────────────────────────────

def ks_test(
    data: Union[Dataset, Sequence[float], np.ndarray],
    cdf: Callable[[np.ndarray], Any],
) -> KsResult:
    """One-sample K-S test of ``data`` against a fully specified ``cdf``.

    D = maxᵢ max{i/n − F(x₍ᵢ₎), F(x₍ᵢ₎) − (i−1)/n}. The p-value uses the exact
    distribution of D for n ≤ 100 and the Kolmogorov limit series above that.
    Fitted parameters are plugged in as if known (no Lilliefors correction).
    """
    values = data.values if isinstance(data, Dataset) else np.asarray(data, dtype=float).ravel()
    x = np.sort(values)
    n = int(x.size)
    if n < 1:
        raise DomainError("ks_test needs at least one observation")

    f = np.asarray(cdf(x), dtype=float).reshape(n)
    if np.any(np.isnan(f)) or np.any(f < 0.0) or np.any(f > 1.0):
        raise DomainError("cdf returned values outside [0, 1]")

    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    stat = float(min(max(d_plus, d_minus), 1.0))

    if n <= EXACT_KS_MAX_N:
        p, method = float(kstwo.sf(stat, n)), "exact"
    else:
        p, method = float(kolmogorov(math.sqrt(n) * stat)), "asymptotic"
    return KsResult(statistic=stat, p_value=min(max(p, 0.0), 1.0), n=n, method=method)


# ── Chain diagnostics ────────────────────────────────────────────────────────

def geweke_z(chain, frac_first: float = 0.1, frac_last: float = 0.5) -> float:
    """Geweke z = (m̄₁ − m̄₂)/√(s₁²/n₁ + s₂²/n₂) on the first and last segments.

    Plain segment variances are used in place of spectral densities at zero.
    For an iid chain the two agree in expectation.
    """
    x = np.asarray(chain, dtype=float).ravel()
    if x.size < MIN_GEWEKE_LENGTH:
        raise DomainError(f"geweke_z needs at least {MIN_GEWEKE_LENGTH} draws, got {x.size}")
    if not (0 < frac_first < 1 and 0 < frac_last < 1 and frac_first + frac_last <= 1):
        raise DomainError(
            f"segment fractions must be in (0, 1) with sum ≤ 1, got {frac_first}, {frac_last}"
        )
    n1 = int(frac_first * x.size)
    n2 = int(frac_last * x.size)
    first, last = x[:n1], x[x.size - n2:]
    v1, v2 = np.var(first, ddof=1), np.var(last, ddof=1)
    if v1 == 0 and v2 == 0:
        raise DegenerateChainError("both Geweke segments have zero variance")
    return float((first.mean() - last.mean()) / math.sqrt(v1 / n1 + v2 / n2))


def acf(chain, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags 0..max_lag (biased, divide-by-total normalization)."""
    x = np.asarray(chain, dtype=float).ravel()
    if max_lag < 1 or max_lag >= x.size / 2:
        raise DomainError(f"max_lag must be in [1, {x.size / 2:g}), got {max_lag}")
    d = x - x.mean()
    denom = float(np.dot(d, d))
    if denom == 0:
        raise DegenerateChainError("autocorrelation of a constant chain is undefined")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = np.dot(d[:-k], d[k:]) / denom
    return out


# ── Estimator accuracy ───────────────────────────────────────────────────────

def scaled_errors(estimates, truth: float) -> ScaledErrors:
    """SBias = (mean(θ̂) − θ)/θ and SRMSE = √mean((θ̂ − θ)²)/θ."""
    est = np.asarray(estimates, dtype=float).ravel()
    if est.size == 0:
        raise DomainError("scaled_errors needs at least one estimate")
    if truth == 0 or not math.isfinite(truth):
        raise DomainError(f"true value must be finite and non-zero, got {truth!r}")
    sbias = (float(est.mean()) - truth) / truth
    srmse = math.sqrt(float(np.mean((est - truth) ** 2))) / abs(truth)
    return ScaledErrors(sbias=sbias, srmse=srmse)
