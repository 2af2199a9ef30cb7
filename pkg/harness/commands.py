"""Command implementations behind ``main.py``: fit, sample and diagnose.

Each command is a pure function of its inputs and seed. Printing and exit
codes are left to the CLI layer.

Usage (programmatic)::

    from harness.commands import cmd_fit
    report = cmd_fit(load_dataset("bearings"), PriorSpec(), seed=42)
    print(report.summary())
"""

from __future__ import annotations

import io
import json
import logging
from pathlib import Path
from typing import Dict, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd

from config import get_settings
from harness.report import DiagnosticsReport, FitEstimate, FitReport
from models.errors import DataParseError
from models.params import Dataset, GEParams, PriorSpec
from services.diagnostics import acf, geweke_z, ks_test
from services.ge_dist import ge_cdf, ge_logpdf
from services.mle import fit_mle
from services.rou_sampler import PosteriorSample, sample_posterior

logger = logging.getLogger(__name__)

MAX_ACF_LAG = 50
CURVE_POINTS = 200
QUANTILE_LEVELS = (0.025, 0.25, 0.5, 0.75, 0.975)
META_KEYS = ("seed", "r", "M", "a", "b", "acceptance_rate")
FLOAT_FORMAT = "%.17g"


def _draw(
    dataset: Dataset,
    prior: PriorSpec,
    r: Optional[float],
    m: Optional[int],
    seed: Optional[int],
) -> Tuple[PosteriorSample, float, int, int]:
    settings = get_settings()
    r = settings.default_r if r is None else r
    m = settings.default_m if m is None else m
    seed = settings.default_seed if seed is None else seed
    sample = sample_posterior(
        dataset,
        prior,
        r=r,
        m=m,
        seed=seed,
        max_proposals=settings.max_proposals,
        min_acceptance=settings.min_acceptance,
    )
    return sample, r, m, seed


def _max_lag(m: int) -> int:
    return min(MAX_ACF_LAG, (m - 1) // 2)


# ═══════════════════════════════════════════════════════════════════════════
#  fit
# ═══════════════════════════════════════════════════════════════════════════

def cmd_fit(
    dataset: Dataset,
    prior: PriorSpec,
    r: Optional[float] = None,
    m: Optional[int] = None,
    seed: Optional[int] = None,
    estimator: Optional[Literal["median", "mean"]] = None,
    name: str = "data",
) -> FitReport:
    """Fit the GE model by Bayes (ratio-of-uniforms sample) and by maximum likelihood.

    Raises
    ------
    ImproperPosteriorError
        The propriety gate rejects (data, prior).
    ConvergenceError, BracketError, SamplerEfficiencyError
        A numerical step did not converge.
    """
    estimator = estimator or get_settings().default_estimator
    sample, r, m, seed = _draw(dataset, prior, r, m, seed)
    alpha_b, lambda_b = sample.point_estimate(estimator)
    mle = fit_mle(dataset)

    fits = []
    for method, alpha, lam in (("bayes", alpha_b, lambda_b), ("mle", mle.alpha_hat, mle.lambda_hat)):
        params = GEParams(alpha=alpha, lam=lam)
        ks = ks_test(dataset, lambda x, p=params: ge_cdf(x, p))
        fits.append(
            FitEstimate(
                method=method,
                alpha_hat=alpha,
                lambda_hat=lam,
                ks_statistic=ks.statistic,
                ks_p_value=ks.p_value,
            )
        )

    report = FitReport(
        dataset=name,
        n=dataset.n,
        prior_a=prior.a,
        prior_b=prior.b,
        r=r,
        M=m,
        seed=seed,
        estimator=estimator,
        acceptance_rate=sample.acceptance_rate,
        geweke_z_alpha=geweke_z(sample.alphas),
        geweke_z_lambda=geweke_z(sample.lambdas),
        fits=fits,
        posterior=sample.summary(),
    )
    logger.info(
        "📈 fit %s: Bayes α̂=%.4f λ̂=%.5g │ MLE α̂=%.4f λ̂=%.5g",
        name, alpha_b, lambda_b, mle.alpha_hat, mle.lambda_hat,
    )
    return report


def write_fit_curves(report: FitReport, dataset: Dataset, path: Union[str, Path]) -> Tuple[Path, Path]:
    """Write fitted densities over the data range and a density histogram of the data.

    ``path`` receives ``x,pdf_bayes,pdf_mle``; a sibling ``<stem>.hist.csv``
    receives ``bin_left,bin_right,density``.
    """
    path = Path(path)
    x = np.linspace(float(dataset.values.min()), float(dataset.values.max()), CURVE_POINTS)
    curves = {"x": x}
    for key, method in (("pdf_bayes", "bayes"), ("pdf_mle", "mle")):
        f = report.fit(method)
        curves[key] = np.exp(ge_logpdf(x, GEParams(alpha=f.alpha_hat, lam=f.lambda_hat)))
    pd.DataFrame(curves).to_csv(path, index=False, float_format=FLOAT_FORMAT)

    density, edges = np.histogram(dataset.values, bins="sturges", density=True)
    hist_path = path.with_name(path.stem + ".hist.csv")
    pd.DataFrame(
        {"bin_left": edges[:-1], "bin_right": edges[1:], "density": density}
    ).to_csv(hist_path, index=False, float_format=FLOAT_FORMAT)
    logger.info("Wrote fitted curves to %s and histogram to %s", path, hist_path)
    return path, hist_path


# ═══════════════════════════════════════════════════════════════════════════
#  sample
# ═══════════════════════════════════════════════════════════════════════════

def _chain_summary(chain: np.ndarray) -> Dict[str, object]:
    counts, edges = np.histogram(chain, bins="auto")
    return {
        "quantiles": {f"{q:g}": float(v) for q, v in zip(QUANTILE_LEVELS, np.quantile(chain, QUANTILE_LEVELS))},
        "mean": float(np.mean(chain)),
        "hist_counts": counts.tolist(),
        "hist_edges": edges.tolist(),
    }


def cmd_sample(
    dataset: Dataset,
    prior: PriorSpec,
    out: Union[str, Path],
    r: Optional[float] = None,
    m: Optional[int] = None,
    seed: Optional[int] = None,
) -> PosteriorSample:
    """Draw a posterior sample and write it with its trace summaries.

    Files written:

    - ``out``: ``#`` metadata lines, then CSV ``alpha,lambda`` with M rows
    - ``<out>.acf.csv``: ``lag,acf_alpha,acf_lambda`` for lags 0..50 (fewer for short chains)
    - ``<out>.summary.json``: quantiles and histogram of each chain plus the acceptance rate
    """
    sample, r, m, seed = _draw(dataset, prior, r, m, seed)
    out = Path(out)

    meta = {
        "seed": seed,
        "r": repr(float(r)),
        "M": m,
        "a": repr(float(prior.a)),
        "b": repr(float(prior.b)),
        "acceptance_rate": repr(sample.acceptance_rate),
    }
    with out.open("w", encoding="utf-8", newline="") as fh:
        for key in META_KEYS:
            fh.write(f"# {key}={meta[key]}\n")
        sample.to_frame().to_csv(fh, index=False, float_format=FLOAT_FORMAT)

    max_lag = _max_lag(m)
    if max_lag >= 1:
        acf_path = out.with_name(out.name + ".acf.csv")
        pd.DataFrame(
            {
                "lag": np.arange(max_lag + 1),
                "acf_alpha": acf(sample.alphas, max_lag),
                "acf_lambda": acf(sample.lambdas, max_lag),
            }
        ).to_csv(acf_path, index=False, float_format=FLOAT_FORMAT)

    summary = {
        "M": m,
        "seed": seed,
        "acceptance_rate": sample.acceptance_rate,
        "alpha": _chain_summary(sample.alphas),
        "lambda": _chain_summary(sample.lambdas),
    }
    summary_path = out.with_name(out.name + ".summary.json")
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")

    logger.info("💾 Wrote %d draws to %s (acceptance %.3f)", m, out, sample.acceptance_rate)
    return sample


# ═══════════════════════════════════════════════════════════════════════════
#  diagnose
# ═══════════════════════════════════════════════════════════════════════════

def read_sample_file(path: Union[str, Path]) -> Tuple[Dict[str, str], pd.DataFrame]:
    """Parse a file written by :func:`cmd_sample` into (metadata, draws).

    Raises
    ------
    DataParseError
        Malformed metadata, missing columns or a non-numeric draw; the
        message carries the 1-based line number.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta: Dict[str, str] = {}
    n_meta = 0
    for line_no, line in enumerate(lines, start=1):
        if not line.startswith("#"):
            break
        n_meta = line_no
        body = line[1:].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        if not sep:
            raise DataParseError(f"metadata line {line!r} is not key=value", line_no)
        meta[key.strip()] = value.strip()

    header_line = n_meta + 1
    if header_line > len(lines) or [c.strip() for c in lines[n_meta].split(",")] != ["alpha", "lambda"]:
        raise DataParseError("expected CSV header 'alpha,lambda'", header_line)

    try:
        raw = pd.read_csv(io.StringIO("\n".join(lines[n_meta:])), dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, ValueError) as exc:
        raise DataParseError(f"malformed CSV body: {exc}", header_line) from None

    draws = raw.apply(pd.to_numeric, errors="coerce")
    bad = draws.isna().any(axis=1) | ~np.isfinite(draws.to_numpy(dtype=float)).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise DataParseError(f"non-numeric draw {lines[header_line + row]!r}", header_line + row + 1)
    if draws.empty:
        raise DataParseError("sample file holds no draws", header_line)
    return meta, draws


def cmd_diagnose(path: Union[str, Path]) -> DiagnosticsReport:
    """Recompute Geweke z, the ACF table and quantile summaries from a sample file."""
    meta, draws = read_sample_file(path)
    alphas = draws["alpha"].to_numpy(dtype=float)
    lambdas = draws["lambda"].to_numpy(dtype=float)
    m = int(alphas.size)

    z_alpha = geweke_z(alphas)
    z_lambda = geweke_z(lambdas)
    max_lag = _max_lag(m)
    quantiles = {
        name: {f"{q:g}": float(v) for q, v in zip(QUANTILE_LEVELS, np.quantile(chain, QUANTILE_LEVELS))}
        for name, chain in (("alpha", alphas), ("lambda", lambdas))
    }
    report = DiagnosticsReport(
        source=str(path),
        M=m,
        metadata=meta,
        geweke_z_alpha=z_alpha,
        geweke_z_lambda=z_lambda,
        acf_alpha=acf(alphas, max_lag).tolist(),
        acf_lambda=acf(lambdas, max_lag).tolist(),
        quantiles=quantiles,
    )
    logger.info("🔎 diagnose %s: M=%d Geweke z α=%.3f λ=%.3f", path, m, z_alpha, z_lambda)
    return report
