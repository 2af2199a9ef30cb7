"""Generalized ratio-of-uniforms sampler.

A pair (U, V) drawn uniformly from C(r) = {0 < u ≤ f(c + v/u^r)^{1/(r+1)}}
gives ρ = c + V/U^r distributed exactly as the normalized density f. The
sampler proposes from the bounding rectangle [0, a] × [b⁻, b⁺] and rejects
points outside C(r).

For the GE posterior the engine runs in z = ln λ. There the marginal is
bounded at both tails, which is not true in λ-space when b = 1. Each λ draw
is then paired with an exact draw of α from its Gamma conditional.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Literal, Optional, Tuple

import numpy as np
import pandas as pd

from models.errors import BracketError, DomainError, EmptySupportError, SamplerEfficiencyError
from models.params import Dataset, PriorSpec
from services.numerics import golden_maximize, scan_argmax
from services.posterior import conditional_alpha_params, log_marginal_z, require_proper

logger = logging.getLogger(__name__)

LogDensity = Callable[[Any], Any]

SCAN_POINTS = 1024
BOUND_INFLATION = 1e-8
BRACKET_STEP = 2.0
BRACKET_DROP = 50.0
BRACKET_CAP = 60.0


# ── Data classes ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class RouBounds:
    """Bounding rectangle of C(r) for a log density shifted by its maximum.

    ``a_bound`` is 1 by construction: the density is divided by its supremum
    ``exp(log_shift)`` before the rectangle is built.
    """

    r: float
    a_bound: float
    b_minus: float
    b_plus: float
    log_shift: float
    center: float = 0.0
    mode: float = 0.0
    bracket: Tuple[float, float] = (-np.inf, np.inf)


@dataclass
class PosteriorSample:
    """Independent joint posterior draws (α⁽ᵏ⁾, λ⁽ᵏ⁾) with sampler metadata."""

    alphas: np.ndarray
    lambdas: np.ndarray
    r: float
    acceptance_rate: float
    seed: Optional[int]
    prior: PriorSpec
    bounds: Optional[RouBounds] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.alphas = np.asarray(self.alphas, dtype=float)
        self.lambdas = np.asarray(self.lambdas, dtype=float)
        if self.alphas.shape != self.lambdas.shape:
            raise ValueError(
                f"alpha/lambda draws differ in length: {self.alphas.size} vs {self.lambdas.size}"
            )

    def __len__(self) -> int:
        return int(self.lambdas.size)

    def point_estimate(self, estimator: Literal["median", "mean"] = "median") -> Tuple[float, float]:
        """Posterior median (default) or mean of each marginal sample."""
        if estimator == "median":
            return float(np.median(self.alphas)), float(np.median(self.lambdas))
        if estimator == "mean":
            return float(np.mean(self.alphas)), float(np.mean(self.lambdas))
        raise ValueError(f"unknown point estimator {estimator!r}; expected 'median' or 'mean'")

    def summary(self) -> Dict[str, Dict[str, float]]:
        """Mean, median, sd and 95% equal-tail limits for both parameters."""
        out: Dict[str, Dict[str, float]] = {}
        for name, chain in (("alpha", self.alphas), ("lambda", self.lambdas)):
            lo, hi = np.quantile(chain, [0.025, 0.975])
            out[name] = {
                "mean": float(np.mean(chain)),
                "median": float(np.median(chain)),
                "sd": float(np.std(chain, ddof=1)) if chain.size > 1 else 0.0,
                "q025": float(lo),
                "q975": float(hi),
            }
        return out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"alpha": self.alphas, "lambda": self.lambdas})


# ── Bounds ───────────────────────────────────────────────────────────────────

def _evaluate(log_density: LogDensity, x: np.ndarray) -> np.ndarray:
    vals = np.asarray(log_density(x), dtype=float)
    if vals.shape != x.shape:
        vals = np.array([float(log_density(float(xi))) for xi in x])
    return np.where(np.isnan(vals), -np.inf, vals)


def locate_mode(log_density: LogDensity, bracket: Tuple[float, float]) -> Tuple[float, float]:
    """Arg max and max of a log density: 1024-point scan, then golden section.

    Raises
    ------
    EmptySupportError
        The density is −∞ at every scan point.
    BracketError
        The maximum sits on a bracket endpoint.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise DomainError(f"bracket must satisfy lower < upper, got {bracket!r}")
    grid = np.linspace(lo, hi, SCAN_POINTS)
    vals = _evaluate(log_density, grid)
    i = scan_argmax(vals)
    if i < 0:
        raise EmptySupportError("log density is −∞ across the whole bracket", lo, hi)
    if i == 0 or i == grid.size - 1:
        raise BracketError("log density maximum lies on the bracket edge; widen the bracket", lo, hi)
    x, fx, _ = golden_maximize(lambda t: _evaluate(log_density, np.array([t]))[0], grid[i - 1], grid[i], grid[i + 1])
    return x, fx


def rou_bounds(
    log_density: LogDensity,
    r: float,
    bracket: Tuple[float, float],
    center: Optional[float] = 0.0,
) -> RouBounds:
    """Compute the bounding rectangle of C(r) over ``bracket``.

    Parameters
    ----------
    log_density : callable
        Unnormalized log density, vectorized over numpy arrays where possible.
    r : float
        Exponent of the method, r ≥ 0.
    bracket : (float, float)
        Interval holding essentially all of the mass.
    center : float or None
        Shift c of the proposal ρ = c + V/U^r. ``None`` centres at the mode.
    """
    if not (math.isfinite(r) and r >= 0):
        raise DomainError(f"r must be finite and ≥ 0, got {r!r}")
    lo, hi = float(bracket[0]), float(bracket[1])
    mode, log_shift = locate_mode(log_density, (lo, hi))
    c = mode if center is None else float(center)
    power = r / (r + 1.0)

    def g(x: np.ndarray) -> np.ndarray:
        f = _evaluate(log_density, x)
        with np.errstate(invalid="ignore", over="ignore"):
            scaled = np.exp(power * (f - log_shift)) if r > 0 else np.ones_like(f)
        return np.where(np.isfinite(f), (x - c) * scaled, 0.0)

    grid = np.linspace(lo, hi, SCAN_POINTS)
    gvals = g(grid)

    def extreme(sign: float) -> float:
        vals = sign * gvals
        j = int(np.argmax(vals))
        if vals[j] <= 0:
            return 0.0
        if j == 0 or j == grid.size - 1:
            side = "b⁺" if sign > 0 else "b⁻"
            raise BracketError(f"{side}(r) is attained on the bracket edge (unbounded for r = {r:g}?)", lo, hi)
        _, best, _ = golden_maximize(lambda t: sign * g(np.array([t]))[0], grid[j - 1], grid[j], grid[j + 1])
        return sign * best

    b_plus = extreme(1.0)
    b_minus = extreme(-1.0)
    b_plus += BOUND_INFLATION * abs(b_plus)
    b_minus -= BOUND_INFLATION * abs(b_minus)
    if not b_minus < b_plus:
        raise BracketError("degenerate bounding rectangle (b⁻ ≥ b⁺)", lo, hi)

    logger.debug(
        "rou_bounds r=%g: mode=%.8g log_shift=%.8g b⁻=%.6g b⁺=%.6g (centre %.6g)",
        r, mode, log_shift, b_minus, b_plus, c,
    )
    return RouBounds(
        r=float(r),
        a_bound=1.0,
        b_minus=float(b_minus),
        b_plus=float(b_plus),
        log_shift=float(log_shift),
        center=c,
        mode=float(mode),
        bracket=(lo, hi),
    )


# ── Sampling ─────────────────────────────────────────────────────────────────

def rou_sample_1d(
    log_density: LogDensity,
    bounds: RouBounds,
    m: int,
    rng: np.random.Generator,
    max_proposals: int = 1_000_000,
    min_acceptance: float = 1e-4,
) -> Tuple[np.ndarray, float]:
    """Draw ``m`` exact variates from the normalized ``log_density``.

    Proposals are generated in vectorized batches. The acceptance test
    (r+1)·ln U ≤ ln f(ρ) − log_shift is the log form of U ≤ f(ρ)^{1/(r+1)};
    equality is accepted.

    Returns
    -------
    (draws, acceptance_rate)
        ``acceptance_rate`` is m divided by the uniform pairs consumed up to
        and including the m-th acceptance.
    """
    if m < 1:
        raise DomainError(f"m must be ≥ 1, got {m}")
    r = bounds.r
    chunks = []
    accepted = 0
    proposed = 0
    rate_guess = 0.25

    while accepted < m:
        k = int(min(max(64, math.ceil(1.2 * (m - accepted) / rate_guess)), 200_000))
        u = bounds.a_bound * (1.0 - rng.random(k))  # (0, a]
        v = rng.uniform(bounds.b_minus, bounds.b_plus, k)
        rho = bounds.center + v / u**r
        f = _evaluate(log_density, rho)
        ok = (r + 1.0) * np.log(u / bounds.a_bound) <= f - bounds.log_shift

        hits = np.flatnonzero(ok)
        need = m - accepted
        if hits.size >= need:
            proposed += int(hits[need - 1]) + 1
            chunks.append(rho[hits[:need]])
            accepted = m
            break

        proposed += k
        accepted += hits.size
        chunks.append(rho[hits])
        rate_guess = max(accepted / proposed, 1e-3)
        if proposed >= max_proposals and accepted / proposed < min_acceptance:
            raise SamplerEfficiencyError(
                f"acceptance rate {accepted / proposed:.2e} after {proposed} proposals "
                f"is below {min_acceptance:g}; try a different r"
            )

    draws = np.concatenate(chunks)
    return draws, m / proposed


def gamma_variate(shape: float, rate: float, rng: np.random.Generator) -> float:
    """One draw from Gamma(shape, rate) in the rate parametrization."""
    return float(gamma_variates(shape, np.array([rate]), rng)[0])


def gamma_variates(shape: float, rate, rng: np.random.Generator) -> np.ndarray:
    """Gamma(shape, rateᵢ) draws, one per entry of ``rate``.

    Shape ≥ 1 uses numpy's Marsaglia–Tsang squeeze generator. Shape < 1 draws
    Gamma(shape + 1) and multiplies by U^{1/shape}.
    """
    rate = np.atleast_1d(np.asarray(rate, dtype=float))
    if not (math.isfinite(shape) and shape > 0):
        raise DomainError(f"gamma shape must be finite and > 0, got {shape!r}")
    if not np.all(np.isfinite(rate)) or np.any(rate <= 0):
        raise DomainError("gamma rate must be finite and > 0")
    if shape >= 1.0:
        g = rng.standard_gamma(shape, size=rate.size)
    else:
        g = rng.standard_gamma(shape + 1.0, size=rate.size)
        g = g * (1.0 - rng.random(rate.size)) ** (1.0 / shape)
    return g / rate


# ── Joint posterior: ratio-of-uniforms for λ, Gamma for α | λ ──────────────────

def auto_bracket_z(data: Dataset, prior: PriorSpec) -> Tuple[float, float]:
    """Bracket for z = ln λ.

    Starts at ln(n/Σxᵢ) and steps 2 units outward on each side until the log
    density is 50 nats below the running maximum, at most 60 units away.
    """
    centre = math.log(data.exp_fit_rate)
    running = float(log_marginal_z(centre, data, prior))

    def walk(direction: float) -> float:
        nonlocal running
        offset = 0.0
        while offset < BRACKET_CAP:
            offset = min(offset + BRACKET_STEP, BRACKET_CAP)
            val = float(log_marginal_z(centre + direction * offset, data, prior))
            running = max(running, val)
            if val < running - BRACKET_DROP:
                break
        return centre + direction * offset

    upper = walk(1.0)
    lower = walk(-1.0)
    logger.debug("auto bracket z ∈ [%.4g, %.4g] around %.4g", lower, upper, centre)
    return lower, upper


def sample_posterior(
    data: Dataset,
    prior: PriorSpec,
    r: float = 1.0,
    m: int = 10_000,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
    max_proposals: int = 1_000_000,
    min_acceptance: float = 1e-4,
) -> PosteriorSample:
    """Exact independent draws from π(α, λ | X).

    λ is sampled by ratio-of-uniforms on p(z) = ln π(e^z | X) + z and mapped
    back with λ = e^z. Each α is then drawn from its Gamma conditional at the
    sampled λ. ``rng`` takes precedence over ``seed``.
    """
    require_proper(data, prior)
    if rng is None:
        rng = np.random.default_rng(seed)

    z_lo, z_hi = auto_bracket_z(data, prior)

    def log_p(z):
        z = np.asarray(z, dtype=float)
        inside = (z >= z_lo) & (z <= z_hi)
        with np.errstate(all="ignore"):
            vals = np.asarray(log_marginal_z(np.where(inside, z, z_lo), data, prior))
        return np.where(inside, vals, -np.inf)

    bounds = rou_bounds(log_p, r, (z_lo, z_hi), center=None)
    z_draws, acceptance = rou_sample_1d(
        log_p, bounds, m, rng, max_proposals=max_proposals, min_acceptance=min_acceptance
    )
    lambdas = np.exp(z_draws)
    shape, rates = conditional_alpha_params(lambdas, data, prior)
    alphas = gamma_variates(shape, rates, rng)

    logger.debug("sample_posterior: M=%d r=%g acceptance=%.4f", m, r, acceptance)
    return PosteriorSample(
        alphas=alphas,
        lambdas=lambdas,
        r=float(r),
        acceptance_rate=acceptance,
        seed=seed,
        prior=prior,
        bounds=bounds,
    )
