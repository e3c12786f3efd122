"""Command-line front end: experiment orchestration, CSV emission, SVG plots."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .config import EXPERIMENTS, RunConfig, echo_config, parse_config
from .errors import ModelAvgError
from .estimators import estimate_all
from .model import TrueParams, compute_design_stats, write_design_csv
from .svgplot import write_line_plot


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)  # shortest round-trip representation
    return str(value)


def write_rows_csv(path, header: list[str], rows: list[dict]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row[col]) for col in header))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _scenario_from_config(config: RunConfig, beta: float = 0.0) -> experiments.Scenario:
    return experiments.make_scenario(
        n=config.n,
        seed=config.seed,
        reps=config.reps,
        alpha=config.alpha,
        beta=beta,
        sigma=config.sigma,
        c=config.c,
        a_n=config.a_n,
        k_n=config.k_n,
        pretest_form=config.pretest_form,
        prior_scale=config.prior_scale,
        prior_p_r=config.prior_p_r,
    )


def _execute(config: RunConfig, outdir: Path, written: list[Path]) -> None:
    def target(name: str) -> Path:
        path = outdir / name
        written.append(path)
        return path

    echo_config(config, target("resolved_config.txt"))
    workers = config.resolved_workers()
    experiment = config.experiment

    if experiment in ("figure1a", "figure1b", "figure2-bootstrap", "figure2-subsample", "single"):
        scenario = _scenario_from_config(config, beta=config.beta)
        write_design_csv(scenario.design, target(f"design_n{config.n}.csv"))

    if experiment == "figure1a":
        rows = experiments.mse_curve(config.beta_grid, scenario, workers=workers)
        header = ["beta", "mse_ms", "mse_bma_bic", "mse_ama", "mse_u", "reps", "seed"]
        write_rows_csv(target("mse_curve.csv"), header, rows)
        write_line_plot(
            target("mse_curve.svg"),
            title="Mean squared error by estimator",
            x_label="beta",
            y_label="MSE",
            x=[r["beta"] for r in rows],
            series=[
                ("BMA (BIC weights)", [r["mse_bma_bic"] for r in rows], "solid"),
                ("MS (pretest)", [r["mse_ms"] for r in rows], "broken"),
                ("AMA (adaptive)", [r["mse_ama"] for r in rows], "dotted"),
                ("U only", [r["mse_u"] for r in rows], "dotdash"),
            ],
        )
    elif experiment == "figure1b":
        rows = experiments.ks_ratio_curve(config.beta_grid, scenario, workers=workers)
        header = [
            "beta", "ratio_ms", "ratio_bma_bic", "ratio_ama",
            "ks_ms_r", "ks_ms_u", "ks_bma_r", "ks_bma_u", "ks_ama_r", "ks_ama_u",
            "reps", "seed",
        ]
        write_rows_csv(target("ks_ratio.csv"), header, rows)
        write_line_plot(
            target("ks_ratio.svg"),
            title="KS location ratio between R and U references",
            x_label="beta",
            y_label="100 * KS_R / (KS_R + KS_U)",
            x=[r["beta"] for r in rows],
            series=[
                ("BMA (BIC weights)", [r["ratio_bma_bic"] for r in rows], "solid"),
                ("MS (pretest)", [r["ratio_ms"] for r in rows], "broken"),
                ("AMA (adaptive)", [r["ratio_ama"] for r in rows], "dotted"),
            ],
        )
    elif experiment in ("figure2-bootstrap", "figure2-subsample"):
        method = experiment.split("-", 1)[1]
        rows = experiments.resampling_error_curve(
            config.beta_grid,
            scenario,
            method=method,
            datasets_per_beta=config.datasets_per_beta,
            b=config.b,
            m=config.m if method == "subsample" else None,
            mode=config.ks_mode,
            workers=workers,
        )
        header = ["beta", "err_ms", "err_bma_bic", "err_ama", "datasets", "b", "excluded", "seed"]
        write_rows_csv(target(f"resamp_error_{method}.csv"), header, rows)
        write_line_plot(
            target(f"resamp_error_{method}.svg"),
            title=f"{method} approximation error (100 x mean KS distance)",
            x_label="beta",
            y_label="100 * KS(truth, resampling)",
            x=[r["beta"] for r in rows],
            series=[
                ("BMA (BIC weights)", [r["err_bma_bic"] for r in rows], "solid"),
                ("MS (pretest)", [r["err_ms"] for r in rows], "broken"),
                ("AMA (adaptive)", [r["err_ama"] for r in rows], "dotted"),
            ],
        )
    elif experiment == "riskbound":
        params = TrueParams(alpha=config.alpha, beta=config.beta, sigma=config.sigma)
        rows = experiments.risk_bound_sweep(
            params, config.n_grid, config.reps, config.seed,
            prior_scale=config.prior_scale, prior_p_r=config.prior_p_r, workers=workers,
        )
        write_rows_csv(target("risk_bound.csv"), ["n", "n_risk", "mc_se", "reps", "seed"], rows)
        write_line_plot(
            target("risk_bound.svg"),
            title="Normalized risk of the exact-posterior model average",
            x_label="n",
            y_label="n * MSE",
            x=[r["n"] for r in rows],
            series=[("n * risk", [r["n_risk"] for r in rows], "solid")],
        )
    elif experiment == "decay":
        params = TrueParams(alpha=config.alpha, beta=config.beta, sigma=config.sigma)
        rows = experiments.weight_decay_sweep(
            params, config.n_grid, config.reps, config.seed, workers=workers
        )
        write_rows_csv(
            target("weight_decay.csv"),
            ["n", "mean_p_r", "mean_sqrtn_p_r", "reps", "seed"],
            rows,
        )
        write_line_plot(
            target("weight_decay.svg"),
            title="Adaptive weight decay",
            x_label="n",
            y_label="weight",
            x=[r["n"] for r in rows],
            series=[
                ("mean weight on R", [r["mean_p_r"] for r in rows], "solid"),
                ("sqrt(n) x mean weight", [r["mean_sqrtn_p_r"] for r in rows], "broken"),
            ],
        )
    elif experiment == "single":
        dataset = experiments.draw_dataset(scenario)
        stats = compute_design_stats(dataset.design, config.sigma)
        bundle = estimate_all(
            dataset, stats, scenario.pretest, scenario.adaptive, config.sigma,
            prior_scale=config.prior_scale, prior_p_r=config.prior_p_r,
        )
        header = [
            "alpha_r", "alpha_u", "beta_u", "ms", "bma_exact", "bma_bic", "ama",
            "w_posterior_r", "w_bic_r", "w_adaptive_r", "n", "seed",
        ]
        row = {
            "alpha_r": bundle.alpha_r,
            "alpha_u": bundle.alpha_u,
            "beta_u": bundle.beta_u,
            "ms": bundle.ms,
            "bma_exact": bundle.bma_exact,
            "bma_bic": bundle.bma_bic,
            "ama": bundle.ama,
            "w_posterior_r": bundle.weights_posterior.p_r,
            "w_bic_r": bundle.weights_bic.p_r,
            "w_adaptive_r": bundle.weights_adaptive.p_r,
            "n": config.n,
            "seed": config.seed,
        }
        write_rows_csv(target("single.csv"), header, [row])
    else:  # pragma: no cover - guarded by config validation
        raise ModelAvgError(f"unhandled experiment {experiment!r}")


def run(config: RunConfig) -> int:
    """Run one experiment; on any failure remove partial outputs and return 1."""
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        _execute(config, outdir, written)
    except Exception as exc:
        for path in written:
            try:
                path.unlink()
            except FileNotFoundError:
                pass
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


_FLAGS: list[tuple[str, str, type]] = [
    ("--n", "n", int),
    ("--reps", "reps", int),
    ("--seed", "seed", int),
    ("--alpha", "alpha", float),
    ("--beta", "beta", float),
    ("--sigma", "sigma", float),
    ("--c", "c", float),
    ("--pretest-form", "pretest_form", str),
    ("--a-n", "a_n", str),
    ("--k-n", "k_n", str),
    ("--prior-scale", "prior_scale", float),
    ("--prior-p-r", "prior_p_r", float),
    ("--beta-grid", "beta_grid", str),
    ("--b", "b", int),
    ("--m", "m", int),
    ("--datasets-per-beta", "datasets_per_beta", int),
    ("--ks-mode", "ks_mode", str),
    ("--n-grid", "n_grid", str),
    ("--out", "out", str),
    ("--workers", "workers", int),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelavg",
        description="Model-averaging simulation laboratory for the two-regressor linear model.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in ("figure1a", "figure1b", "figure2", "riskbound", "decay", "single"):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=str, default=None, help="config file (key = value lines)")
        if name == "figure2":
            p.add_argument(
                "--method", choices=("bootstrap", "subsample"), default="bootstrap",
                help="resampling engine (default: bootstrap)",
            )
        for flag, key, typ in _FLAGS:
            p.add_argument(flag, dest=key, type=typ, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    experiment = args.experiment
    if experiment == "figure2":
        experiment = f"figure2-{args.method}"
    if experiment not in EXPERIMENTS:  # pragma: no cover - argparse restricts choices
        print(f"error: unknown experiment {experiment!r}", file=sys.stderr)
        return 2
    overrides = {}
    for _, key, _ in _FLAGS:
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    try:
        config = parse_config(experiment, config_file=args.config, overrides=overrides)
    except (ModelAvgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
