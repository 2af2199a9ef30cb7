"""CLI entry point for GE Bayesian inference.

Usage::

    python main.py fit --data bearings --a 1 --b 1 --M 10000 --seed 42
    python main.py sample --data lifetimes.txt --M 5000 --out draws.csv
    python main.py diagnose draws.csv
    python main.py simulate --n-grid 10,20,50 --alpha-grid 0.5,1,2 --lambda-grid 1 --N 50 --M 2000
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

load_dotenv()

from config import get_settings  # noqa: E402
from models.errors import (  # noqa: E402
    BracketError,
    ConvergenceError,
    GEBayesError,
    ImproperPosteriorError,
    RateUnderflowError,
    SamplerEfficiencyError,
)

logger = logging.getLogger("main")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IMPROPER = 2
EXIT_NUMERICAL = 3


# ── Argument parsing ─────────────────────────────────────────────────────────

def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_model_args(p: argparse.ArgumentParser, with_data: bool = True) -> None:
    if with_data:
        p.add_argument("--data", required=True, help="Data file path, or 'bearings' for the built-in set")
    p.add_argument("--a", type=float, default=1.0, help="Prior exponent on α (default: 1)")
    p.add_argument("--b", type=float, default=1.0, help="Prior exponent on λ (default: 1)")
    p.add_argument("--r", type=float, default=None, help="Ratio-of-uniforms exponent (default: settings, 1)")
    p.add_argument("--M", type=int, default=None, help="Posterior draws (default: settings, 10000)")
    p.add_argument("--seed", type=int, default=None, help="Random seed (default: settings, 42)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Objective Bayesian and maximum-likelihood inference for the generalized exponential distribution.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py fit --data bearings --seed 42
  python main.py fit --data bearings --json --curves curves.csv
  python main.py sample --data bearings --M 1000 --out draws.csv
  python main.py diagnose draws.csv
  python main.py simulate --n-grid 10,20 --alpha-grid 1 --lambda-grid 1 --N 2 --M 500

Exit codes: 0 success, 1 I/O or parse error, 2 improper posterior, 3 numerical non-convergence.
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose (DEBUG) logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="Bayes and MLE fits with K-S and Geweke diagnostics")
    _add_model_args(p_fit)
    p_fit.add_argument("--estimator", choices=["median", "mean"], default=None, help="Bayes point estimator")
    p_fit.add_argument("--out", default=None, help="Write the JSON report to this path")
    p_fit.add_argument("--json", action="store_true", help="Print the JSON report instead of text")
    p_fit.add_argument("--curves", default=None, help="Write fitted-density and histogram CSVs")

    p_sample = sub.add_parser("sample", help="Write posterior draws with ACF and summary side files")
    _add_model_args(p_sample)
    p_sample.add_argument("--out", required=True, help="Sample CSV path")

    p_diag = sub.add_parser("diagnose", help="Recompute diagnostics from a sample file")
    p_diag.add_argument("sample", help="File written by the sample command")
    p_diag.add_argument("--json", action="store_true", help="Print the JSON report instead of text")

    p_sim = sub.add_parser("simulate", help="Bayes vs. MLE simulation study")
    _add_model_args(p_sim, with_data=False)
    p_sim.add_argument("--n-grid", type=_int_list, default=None, help="Sample sizes, e.g. 10,15,20")
    p_sim.add_argument("--alpha-grid", type=_float_list, default=None, help="True α values, e.g. 0.5,1,2")
    p_sim.add_argument("--lambda-grid", type=_float_list, default=None, help="True λ values, e.g. 0.5,1,2")
    p_sim.add_argument("--N", type=int, default=None, help="Replications per cell (default: settings, 200)")
    p_sim.add_argument("--workers", type=int, default=None, help="Worker processes (default: settings, 1)")
    p_sim.add_argument("--estimator", choices=["median", "mean"], default=None, help="Bayes point estimator")
    p_sim.add_argument("--out", default="simulation.csv", help="Output CSV (default: simulation.csv)")
    return parser


# ── Commands ─────────────────────────────────────────────────────────────────

def _prior(args: argparse.Namespace):
    from models.params import PriorSpec

    return PriorSpec(a=args.a, b=args.b)


def _run_fit(args: argparse.Namespace) -> None:
    from harness.commands import cmd_fit, write_fit_curves
    from harness.data_feed import load_dataset

    data = load_dataset(args.data)
    report = cmd_fit(data, _prior(args), r=args.r, m=args.M, seed=args.seed, estimator=args.estimator, name=args.data)
    document = json.dumps(report.to_dict(), indent=2, ensure_ascii=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(document + "\n")
    if args.curves:
        write_fit_curves(report, data, args.curves)
    print(document if args.json else report.summary())


def _run_sample(args: argparse.Namespace) -> None:
    from harness.commands import cmd_sample
    from harness.data_feed import load_dataset

    data = load_dataset(args.data)
    sample = cmd_sample(data, _prior(args), args.out, r=args.r, m=args.M, seed=args.seed)
    print(f"Wrote {len(sample)} draws to {args.out} (acceptance rate {sample.acceptance_rate:.4f})")


def _run_diagnose(args: argparse.Namespace) -> None:
    from harness.commands import cmd_diagnose

    report = cmd_diagnose(args.sample)
    print(json.dumps(report.to_dict(), indent=2, ensure_ascii=False) if args.json else report.summary())


def _run_simulate(args: argparse.Namespace) -> None:
    from harness.runner import run_simulation
    from models.params import SimConfig

    settings = get_settings()
    overrides = {
        "n_grid": args.n_grid,
        "alpha_grid": args.alpha_grid,
        "lambda_grid": args.lambda_grid,
        "point_estimator": args.estimator or settings.default_estimator,
    }
    config = SimConfig(
        **{k: v for k, v in overrides.items() if v is not None},
        replications=args.N if args.N is not None else settings.sim_replications,
        draws=args.M if args.M is not None else settings.sim_draws,
        workers=args.workers if args.workers is not None else settings.sim_workers,
        prior=_prior(args),
        r=args.r if args.r is not None else settings.default_r,
        base_seed=args.seed if args.seed is not None else settings.default_seed,
    )
    results = run_simulation(config, args.out)
    print(f"Wrote {len(results)} cells to {args.out}")


COMMANDS = {
    "fit": _run_fit,
    "sample": _run_sample,
    "diagnose": _run_diagnose,
    "simulate": _run_simulate,
}


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the documented CLI exit code."""
    if isinstance(exc, ImproperPosteriorError):
        return EXIT_IMPROPER
    if isinstance(exc, (BracketError, SamplerEfficiencyError, ConvergenceError, RateUnderflowError)):
        return EXIT_NUMERICAL
    return EXIT_INPUT


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.verbose else getattr(logging, get_settings().log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s │ %(name)-25s │ %(levelname)-7s │ %(message)s",
    )

    try:
        COMMANDS[args.command](args)
    except (GEBayesError, ValidationError, OSError) as exc:
        code = exit_code_for(exc)
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
