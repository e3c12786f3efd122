"""The competing point estimators of the intercept-slope target alpha.

Six estimates per dataset: restricted-only, unrestricted-only, post-model-
selection (hard pretest), exact-posterior model average, BIC model average,
and the adaptive model average. A mean-model analogue (weighted shrinkage of
the sample mean) is included for the resampling coverage experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .model import Dataset, DesignStats, compute_design_stats, fit_restricted, fit_unrestricted
from .weights import (
    AdaptiveConfig,
    ModelChoice,
    ModelWeights,
    PretestConfig,
    adaptive_weights,
    bic_weights,
    exact_posterior_weights,
    pretest_select,
)

ESTIMATOR_NAMES = ("r", "u", "ms", "bma_exact", "bma_bic", "ama")


@dataclass(frozen=True)
class EstimateBundle:
    """All six point estimates of alpha for one dataset plus the weights used."""

    alpha_r: float
    alpha_u: float
    beta_u: float
    ms: float
    bma_exact: float
    bma_bic: float
    ama: float
    weights_posterior: ModelWeights
    weights_bic: ModelWeights
    weights_adaptive: ModelWeights

    def by_name(self, name: str) -> float:
        return {
            "r": self.alpha_r,
            "u": self.alpha_u,
            "ms": self.ms,
            "bma_exact": self.bma_exact,
            "bma_bic": self.bma_bic,
            "ama": self.ama,
        }[name]


@dataclass(frozen=True)
class MeanModelSample:
    """Observations from the one-parameter mean model (iid N(mu, 1))."""

    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise ValueError("y must be a non-empty vector")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.size


def post_model_selection(
    dataset: Dataset, stats: DesignStats, pretest_config: PretestConfig
) -> float:
    """alpha_r when the pretest keeps the restricted model, alpha_u otherwise."""
    fit = fit_unrestricted(dataset, stats)
    choice = pretest_select(fit.beta_u, stats.sigma_beta, pretest_config)
    if choice is ModelChoice.R:
        return fit_restricted(dataset, stats)
    return fit.alpha_u


def model_average(alpha_r: float, alpha_u: float, weights: ModelWeights) -> float:
    """Convex combination p_r * alpha_r + p_u * alpha_u."""
    value = alpha_u + weights.p_r * (alpha_r - alpha_u)
    # Clamp away the last-ulp excursions so the average always lies in the
    # closed interval between its two constituents.
    lo, hi = (alpha_r, alpha_u) if alpha_r <= alpha_u else (alpha_u, alpha_r)
    return min(max(value, lo), hi)


def estimate_all(
    dataset: Dataset,
    stats: DesignStats,
    pretest_config: PretestConfig,
    adaptive_config: AdaptiveConfig,
    sigma: float,
    prior_scale: float = 1.0,
    prior_p_r: float = 0.5,
) -> EstimateBundle:
    """One pass over a dataset: both fits, all three weight rules, six estimates.

    The single unrestricted fit is shared by every rule so that all weights see
    the same beta_u.
    """
    alpha_r = fit_restricted(dataset, stats)
    fit = fit_unrestricted(dataset, stats)
    choice = pretest_select(fit.beta_u, stats.sigma_beta, pretest_config)
    ms = alpha_r if choice is ModelChoice.R else fit.alpha_u
    w_post = exact_posterior_weights(dataset, sigma, prior_scale, prior_p_r)
    w_bic = bic_weights(dataset, stats)
    w_ada = adaptive_weights(fit.beta_u, adaptive_config)
    return EstimateBundle(
        alpha_r=alpha_r,
        alpha_u=fit.alpha_u,
        beta_u=fit.beta_u,
        ms=ms,
        bma_exact=model_average(alpha_r, fit.alpha_u, w_post),
        bma_bic=model_average(alpha_r, fit.alpha_u, w_bic),
        ama=model_average(alpha_r, fit.alpha_u, w_ada),
        weights_posterior=w_post,
        weights_bic=w_bic,
        weights_adaptive=w_ada,
    )


def mean_model_estimate(sample: MeanModelSample, weight_rule: Callable[[float], float]) -> float:
    """Shrunken mean W(sqrt(n) * ybar) * ybar for a weight function W into [0, 1]."""
    ybar = float(np.mean(sample.y))
    w = float(weight_rule(np.sqrt(sample.n) * ybar))
    return w * ybar


def make_pipeline(
    name: str,
    sigma: float,
    pretest_config: PretestConfig | None = None,
    adaptive_config: AdaptiveConfig | None = None,
    prior_scale: float = 1.0,
    prior_p_r: float = 0.5,
) -> Callable[[Dataset], float]:
    """A Dataset -> estimate map that re-runs the full pipeline from scratch.

    This is the resampling unit of work: stats, fits and weights are all
    recomputed on whatever dataset it is handed.
    """
    multi = make_multi_pipeline(
        (name,), sigma, pretest_config, adaptive_config, prior_scale, prior_p_r
    )

    def procedure(dataset: Dataset) -> float:
        return multi(dataset)[name]

    return procedure


def make_multi_pipeline(
    names: Iterable[str],
    sigma: float,
    pretest_config: PretestConfig | None = None,
    adaptive_config: AdaptiveConfig | None = None,
    prior_scale: float = 1.0,
    prior_p_r: float = 0.5,
) -> Callable[[Dataset], dict[str, float]]:
    """Like :func:`make_pipeline` but computes several estimators in one pass."""
    names = tuple(names)
    unknown = set(names) - set(ESTIMATOR_NAMES)
    if unknown:
        raise ValueError(f"unknown estimator names: {sorted(unknown)}")
    need_ms = "ms" in names
    need_bic = "bma_bic" in names
    need_post = "bma_exact" in names
    need_ama = "ama" in names
    if need_ms and pretest_config is None:
        raise ValueError("'ms' needs a pretest config")
    if need_ama and adaptive_config is None:
        raise ValueError("'ama' needs an adaptive config")

    def procedure(dataset: Dataset) -> dict[str, float]:
        stats = compute_design_stats(dataset.design, sigma)
        alpha_r = fit_restricted(dataset, stats)
        fit = fit_unrestricted(dataset, stats)
        out: dict[str, float] = {}
        for nm in names:
            if nm == "r":
                out[nm] = alpha_r
            elif nm == "u":
                out[nm] = fit.alpha_u
        if need_ms:
            choice = pretest_select(fit.beta_u, stats.sigma_beta, pretest_config)
            out["ms"] = alpha_r if choice is ModelChoice.R else fit.alpha_u
        if need_bic:
            out["bma_bic"] = model_average(alpha_r, fit.alpha_u, bic_weights(dataset, stats))
        if need_post:
            w = exact_posterior_weights(dataset, sigma, prior_scale, prior_p_r)
            out["bma_exact"] = model_average(alpha_r, fit.alpha_u, w)
        if need_ama:
            w = adaptive_weights(fit.beta_u, adaptive_config)
            out["ama"] = model_average(alpha_r, fit.alpha_u, w)
        return out

    return procedure
