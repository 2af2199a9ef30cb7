"""Generalized exponential (GE) distribution.

CDF F(x) = (1 − e^{−λx})^α and density f(x) = αλ(1 − e^{−λx})^{α−1}e^{−λx}
for x > 0. Every ln(1 − e^{−λx}) goes through :func:`services.numerics.log1mexp`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, polygamma

from models.errors import DomainError, SingularityError
from models.params import GEParams
from services.numerics import log1mexp, scalar_or_array

logger = logging.getLogger(__name__)

EULER_GAMMA = float(np.euler_gamma)
_SINGULAR_TOL = 1e-6


@dataclass(frozen=True)
class FisherInfo:
    """Symmetric 2×2 Fisher information for (α, λ) over ``n`` observations."""

    i_aa: float
    i_al: float
    i_ll: float
    n: int

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.i_aa, self.i_al], [self.i_al, self.i_ll]])

    def per_observation(self) -> "FisherInfo":
        return FisherInfo(self.i_aa / self.n, self.i_al / self.n, self.i_ll / self.n, 1)


# ── Distribution functions ───────────────────────────────────────────────────

def ge_cdf(x, p: GEParams):
    """(1 − e^{−λx})^α; 0 for x ≤ 0 and 1 at +∞. NaN and −∞ are rejected."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(np.isneginf(x)):
        raise DomainError("ge_cdf: x must not be NaN or −∞")
    pos = x > 0
    safe = np.where(pos, x, 1.0)
    with np.errstate(over="ignore", under="ignore"):
        vals = np.exp(p.alpha * log1mexp(p.lam * safe))
    return scalar_or_array(np.where(pos, vals, 0.0))


def ge_logpdf(x, p: GEParams):
    """ln α + ln λ + (α − 1)·ln(1 − e^{−λx}) − λx for finite x > 0."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("ge_logpdf: x must be finite and > 0")
    lx = p.lam * x
    out = math.log(p.alpha) + math.log(p.lam) + (p.alpha - 1.0) * log1mexp(lx) - lx
    return scalar_or_array(out)


def ge_quantile(prob, p: GEParams):
    """Closed-form inverse CDF −ln(1 − prob^{1/α})/λ for prob in (0, 1)."""
    prob = np.asarray(prob, dtype=float)
    if np.any(~(prob > 0)) or np.any(~(prob < 1)):
        raise DomainError("ge_quantile: prob must lie strictly inside (0, 1)")
    # ln(1 − prob^{1/α}) = log1mexp(−ln(prob)/α); exact for tiny and near-one prob^{1/α}
    out = -log1mexp(-np.log(prob) / p.alpha) / p.lam
    return scalar_or_array(out)


def ge_sample(p: GEParams, m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``m`` GE variates by inverse CDF from the given generator."""
    if m < 1:
        raise DomainError(f"ge_sample: m must be ≥ 1, got {m}")
    u = rng.random(m)
    # Generator.random is on [0, 1); keep the quantile strictly positive.
    u[u == 0.0] = np.finfo(float).tiny
    return np.asarray(ge_quantile(u, p), dtype=float).reshape(m)


# ── Fisher information ───────────────────────────────────────────────────────

def fisher_info(p: GEParams, n: int = 1) -> FisherInfo:
    """Closed-form Fisher information, valid for α ∉ {1, 2}.

    The off-diagonal and λλ entries have removable singularities at α = 1 and
    α = 2. Those points are refused rather than patched.
    """
    if n < 1:
        raise DomainError(f"fisher_info: n must be ≥ 1, got {n}")
    alpha, lam = p.alpha, p.lam
    for excluded in (1.0, 2.0):
        if abs(alpha - excluded) < _SINGULAR_TOL:
            raise SingularityError(
                excluded,
                f"fisher_info: closed form is singular at α = {excluded:g} (got α = {alpha!r})",
            )

    c = EULER_GAMMA
    psi = float(digamma(alpha))
    trigamma = float(polygamma(1, alpha))

    i_aa = n / alpha**2
    i_al = n * (float(digamma(2.0)) - float(digamma(alpha + 1.0))) / (lam * (alpha - 1.0))
    bracket = (
        math.pi**2
        - 6.0 * trigamma
        - 12.0 * c
        - 12.0 * psi
        + 6.0 * c**2
        + 12.0 * c * psi
        + 6.0 * psi**2
    )
    i_ll = n / lam**2 + n * alpha * bracket / (6.0 * lam**2 * (alpha - 2.0))
    return FisherInfo(i_aa=i_aa, i_al=i_al, i_ll=i_ll, n=n)
