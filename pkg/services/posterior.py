"""Posterior of the GE parameters under the vague prior 1/(α^a λ^b).

Provides the propriety gate, the log kernels (joint, conditional Gamma for α,
marginal for λ) and a quadrature summary used as an independent oracle for
the ratio-of-uniforms sampler. Kernels are exposed in log space only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp

from models.errors import BracketError, DomainError, ImproperPosteriorError, RateUnderflowError
from models.params import Dataset, PriorSpec, ProprietyReport
from services.numerics import log1mexp_terms, scalar_or_array

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-8
SCAN_POINTS = 2048
SCAN_DECADES = 8.0
DROP_NATS = 50.0


@dataclass(frozen=True)
class PosteriorQuadrature:
    """Quadrature summary of the λ marginal (and E[α] through the Gamma conditional)."""

    norm_const: float
    log_norm_const: float
    mean_lambda: float
    median_lambda: float
    mean_alpha: float
    z_lower: float
    z_upper: float


# ── Propriety gate ───────────────────────────────────────────────────────────

def check_propriety(data: Dataset, prior: PriorSpec) -> ProprietyReport:
    """Sufficient conditions for a proper posterior: a ≥ 1, b ≤ 1 and n > a − 1."""
    reasons = []
    if not prior.a >= 1:
        reasons.append("a ≥ 1 violated")
    if not prior.b <= 1:
        reasons.append("b ≤ 1 violated")
    if not data.n > prior.a - 1:
        reasons.append("n > a − 1 violated")
    return ProprietyReport(proper=not reasons, reasons=reasons)


def require_proper(data: Dataset, prior: PriorSpec) -> None:
    report = check_propriety(data, prior)
    if not report.proper:
        raise ImproperPosteriorError(report)


# ── Kernels ──────────────────────────────────────────────────────────────────

def tail_sums(log_lam: np.ndarray, data: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    """Σ ln(1 − e^{−λxᵢ}) and ln{−Σ ln(1 − e^{−λxᵢ})} for each ln λ."""
    log_y = np.asarray(log_lam, dtype=float)[..., None] + np.log(data.values)
    l1m, lnl = log1mexp_terms(log_y)
    return l1m.sum(axis=-1), logsumexp(lnl, axis=-1)


def _check_positive(name: str, v: np.ndarray) -> None:
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise DomainError(f"{name} must be finite and > 0")


def _alpha_shape(data: Dataset, prior: PriorSpec) -> float:
    shape = data.n - prior.a + 1.0
    if shape <= 0:
        raise ImproperPosteriorError(check_propriety(data, prior))
    return shape


def log_joint_posterior(alpha, lam, data: Dataset, prior: PriorSpec):
    """Unnormalized ln π(α, λ | X) = (n−a)ln α + (n−b)ln λ + (α−1)Σln(1−e^{−λxᵢ}) − λΣxᵢ."""
    alpha, lam = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(lam, dtype=float))
    _check_positive("alpha", alpha)
    _check_positive("lambda", lam)
    log_lam = np.log(lam)
    s, _ = tail_sums(log_lam, data)
    out = (
        (data.n - prior.a) * np.log(alpha)
        + (data.n - prior.b) * log_lam
        + (alpha - 1.0) * s
        - lam * data.sum_x
    )
    return scalar_or_array(out)


def conditional_alpha_params(lam, data: Dataset, prior: PriorSpec):
    """Shape and rate of the Gamma conditional posterior of α given λ.

    shape = n − a + 1 and rate = −Σ ln(1 − e^{−λxᵢ}) (rate parametrization).

    Raises
    ------
    RateUnderflowError
        If λxᵢ is so large for every i that the rate rounds to zero.
    """
    lam = np.asarray(lam, dtype=float)
    _check_positive("lambda", lam)
    shape = _alpha_shape(data, prior)
    _, log_rate = tail_sums(np.log(lam), data)
    rate = np.exp(log_rate)
    if np.any(rate == 0):
        worst = float(np.max(lam))
        raise RateUnderflowError(
            f"conditional α rate underflows at λ = {worst:.6g} (ln rate = {float(np.min(log_rate)):.6g})"
        )
    return shape, scalar_or_array(rate)


def _log_marginal_z(z, data: Dataset, prior: PriorSpec, shape: float):
    """ln π(λ = e^z | X) computed from z, finite for any real z."""
    z = np.asarray(z, dtype=float)
    s, log_rate = tail_sums(z, data)
    with np.errstate(over="ignore"):
        lam = np.exp(z)
    return (
        (data.n - prior.b) * z
        - lam * data.sum_x
        - s
        + gammaln(shape)
        - shape * log_rate
    )


def log_marginal_lambda(lam, data: Dataset, prior: PriorSpec):
    """Unnormalized ln π(λ | X) with α integrated out analytically."""
    lam = np.asarray(lam, dtype=float)
    _check_positive("lambda", lam)
    shape = _alpha_shape(data, prior)
    return scalar_or_array(_log_marginal_z(np.log(lam), data, prior, shape))


def log_marginal_z(z, data: Dataset, prior: PriorSpec):
    """ln p(z | X) for z = ln λ, i.e. the λ marginal plus the Jacobian z."""
    shape = _alpha_shape(data, prior)
    z = np.asarray(z, dtype=float)
    return scalar_or_array(_log_marginal_z(z, data, prior, shape) + z)


# ── Quadrature oracle ────────────────────────────────────────────────────────

def _bracket_z(data: Dataset, prior: PriorSpec, drop_nats: float) -> Tuple[float, float, float, float]:
    """Scan z = ln λ and return (z_lower, z_mode, z_upper, p_max).

    An infinite end means the kernel never falls ``drop_nats`` below its
    maximum inside the scan (the polynomial λ → 0 tail when b = 1).
    """
    centre = math.log(data.exp_fit_rate)
    span = SCAN_DECADES * math.log(10.0)
    grid = np.linspace(centre - span, centre + span, SCAN_POINTS)
    vals = np.asarray(log_marginal_z(grid, data, prior))
    i = int(np.nanargmax(vals))
    if i == 0 or i == grid.size - 1:
        raise BracketError("posterior mode not bracketed by the λ scan", math.exp(grid[0]), math.exp(grid[-1]))
    p_max = float(vals[i])
    below = vals < p_max - drop_nats
    lower_idx = np.nonzero(below[:i])[0]
    upper_idx = np.nonzero(below[i:])[0]
    z_lo = float(grid[lower_idx[-1]]) if lower_idx.size else -np.inf
    z_hi = float(grid[i + upper_idx[0]]) if upper_idx.size else np.inf
    logger.debug("quadrature bracket z ∈ [%.4g, %.4g], mode %.6g", z_lo, z_hi, grid[i])
    return z_lo, float(grid[i]), z_hi, p_max


def _integrate(f, lo: float, hi: float, mode: float) -> float:
    # quad's ``points`` only applies to finite ranges; split at the mode instead.
    left, _ = quad(f, lo, mode, epsrel=QUAD_EPSREL, epsabs=0.0, limit=400)
    right, _ = quad(f, mode, hi, epsrel=QUAD_EPSREL, epsabs=0.0, limit=400)
    return left + right


def quadrature_posterior_summary(
    data: Dataset,
    prior: PriorSpec,
    drop_nats: float = DROP_NATS,
) -> PosteriorQuadrature:
    """Normalizing constant and λ/α posterior moments by adaptive quadrature.

    Integration runs in z = ln λ, where the kernel is bounded. A finite
    normalizing constant is the numerical witness of posterior propriety.
    """
    require_proper(data, prior)
    shape = _alpha_shape(data, prior)
    z_lo, z_mode, z_hi, p_max = _bracket_z(data, prior, drop_nats)

    def kernel(z: float) -> float:
        with np.errstate(all="ignore"):
            v = float(np.exp(float(log_marginal_z(z, data, prior)) - p_max))
        return v if math.isfinite(v) else 0.0

    def rate_at(z: float) -> float:
        # From z directly: e^z underflows far into the λ → 0 tail.
        return -float(tail_sums(np.asarray(z), data)[0])

    mass = _integrate(kernel, z_lo, z_hi, z_mode)
    if not (mass > 0 and math.isfinite(mass)):
        raise BracketError("quadrature of the λ marginal did not converge", math.exp(z_lo), math.exp(z_hi))

    mean_lambda = _integrate(lambda z: kernel(z) * math.exp(z), z_lo, z_hi, z_mode) / mass
    mean_alpha = _integrate(lambda z: kernel(z) * shape / rate_at(z), z_lo, z_hi, z_mode) / mass

    left_mass, _ = quad(kernel, z_lo, z_mode, epsrel=QUAD_EPSREL, epsabs=0.0, limit=400)

    def cdf_gap(z: float) -> float:
        if z <= z_mode:
            part = left_mass - quad(kernel, z, z_mode, epsrel=QUAD_EPSREL, epsabs=0.0, limit=400)[0]
        else:
            part = left_mass + quad(kernel, z_mode, z, epsrel=QUAD_EPSREL, epsabs=0.0, limit=400)[0]
        return part / mass - 0.5

    # The median lies within a few posterior sds of the mode; widen until it is bracketed.
    step = 1.0
    lo, hi = z_mode - step, z_mode + step
    while cdf_gap(lo) > 0:
        step *= 2.0
        lo = z_mode - step
    while cdf_gap(hi) < 0:
        step *= 2.0
        hi = z_mode + step
    z_med = brentq(cdf_gap, lo, hi, xtol=1e-12, rtol=1e-12)

    log_norm = p_max + math.log(mass)
    logger.debug("quadrature: ln Z = %.10g, E[λ] = %.6g, E[α] = %.6g", log_norm, mean_lambda, mean_alpha)
    return PosteriorQuadrature(
        norm_const=math.exp(log_norm),
        log_norm_const=log_norm,
        mean_lambda=mean_lambda,
        median_lambda=math.exp(z_med),
        mean_alpha=mean_alpha,
        z_lower=z_lo,
        z_upper=z_hi,
    )
