"""Report containers for fits, diagnostics and the simulation study."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List

logger = logging.getLogger(__name__)

SIM_COLUMNS = [
    "n",
    "alpha_true",
    "lambda_true",
    "sbias_bayes_alpha",
    "srmse_bayes_alpha",
    "sbias_mle_alpha",
    "srmse_mle_alpha",
    "sbias_bayes_lambda",
    "srmse_bayes_lambda",
    "sbias_mle_lambda",
    "srmse_mle_lambda",
    "failures",
]


@dataclass
class FitEstimate:
    """One fitted model and its K-S check against the data."""

    method: str
    alpha_hat: float
    lambda_hat: float
    ks_statistic: float
    ks_p_value: float


@dataclass
class FitReport:
    """Bayes and MLE estimates plus sampler diagnostics for one dataset."""

    dataset: str
    n: int
    prior_a: float
    prior_b: float
    r: float
    M: int
    seed: int
    estimator: str
    acceptance_rate: float
    geweke_z_alpha: float
    geweke_z_lambda: float
    fits: List[FitEstimate] = field(default_factory=list)
    posterior: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def fit(self, method: str) -> FitEstimate:
        for f in self.fits:
            if f.method == method:
                return f
        raise KeyError(method)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def summary(self) -> str:
        """Pretty-print summary for the terminal."""
        lines = [
            f"═══ GE Fit Report: {self.dataset} (n={self.n}) ═══",
            f"Prior:         1/(α^{self.prior_a:g} λ^{self.prior_b:g})",
            f"Sampler:       r={self.r:g}  M={self.M}  seed={self.seed}",
            f"Acceptance:    {self.acceptance_rate:>14.4f}",
            f"Geweke z (α):  {self.geweke_z_alpha:>14.4f}",
            f"Geweke z (λ):  {self.geweke_z_lambda:>14.4f}",
            "",
            f"{'Method':<14}{'α̂':>10}{'λ̂':>12}{'K-S':>10}{'p-value':>10}",
        ]
        for f in self.fits:
            lines.append(
                f"{f.method:<14}{f.alpha_hat:>10.4f}{f.lambda_hat:>12.4f}"
                f"{f.ks_statistic:>10.5f}{f.ks_p_value:>10.4f}"
            )
        if self.posterior:
            lines.append("")
            lines.append("Posterior      mean      median    sd        2.5%      97.5%")
            for name, s in self.posterior.items():
                lines.append(
                    f"{name:<14}{s['mean']:<10.4g}{s['median']:<10.4g}{s['sd']:<10.4g}"
                    f"{s['q025']:<10.4g}{s['q975']:<10.4g}"
                )
        lines.append("═" * 55)
        return "\n".join(lines)


@dataclass
class DiagnosticsReport:
    """Diagnostics recomputed from a stored posterior sample."""

    source: str
    M: int
    metadata: Dict[str, str]
    geweke_z_alpha: float
    geweke_z_lambda: float
    acf_alpha: List[float]
    acf_lambda: List[float]
    quantiles: Dict[str, Dict[str, float]]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def summary(self) -> str:
        lines = [
            f"═══ Sample Diagnostics: {self.source} ═══",
            f"Draws:         {self.M:>14d}",
            f"Geweke z (α):  {self.geweke_z_alpha:>14.4f}",
            f"Geweke z (λ):  {self.geweke_z_lambda:>14.4f}",
            "",
            f"{'lag':>5}{'acf α':>12}{'acf λ':>12}",
        ]
        for k, (a, l) in enumerate(zip(self.acf_alpha, self.acf_lambda)):
            lines.append(f"{k:>5}{a:>12.4f}{l:>12.4f}")
        lines.append("")
        for name, q in self.quantiles.items():
            cells = "  ".join(f"{k}={v:.4g}" for k, v in q.items())
            lines.append(f"{name:<8}{cells}")
        lines.append("═" * 45)
        return "\n".join(lines)


@dataclass
class SimCellResult:
    """Scaled errors of both estimators for one (n, α, λ) grid cell."""

    n: int
    alpha_true: float
    lambda_true: float
    sbias_bayes_alpha: float
    srmse_bayes_alpha: float
    sbias_mle_alpha: float
    srmse_mle_alpha: float
    sbias_bayes_lambda: float
    srmse_bayes_lambda: float
    sbias_mle_lambda: float
    srmse_mle_lambda: float
    failures: int = 0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
