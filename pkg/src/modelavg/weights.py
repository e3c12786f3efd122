"""Model-weight rules: hard pretest, exact posterior, BIC, and adaptive smooth weights.

All rules produce a weight pair (p_r, p_u) on the restricted (slope-free) and
unrestricted models with p_u = 1 - p_r. Every rule is evaluated in log-space /
through a stable logistic so that arbitrarily large slope estimates cannot
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import Dataset, DesignStats, compute_design_stats, fit_restricted, fit_unrestricted


class ModelChoice(Enum):
    R = "R"
    U = "U"


@dataclass(frozen=True)
class ModelWeights:
    """Weight pair on the restricted/unrestricted models; p_u is derived as 1 - p_r."""

    p_r: float

    def __post_init__(self):
        if not (0.0 <= self.p_r <= 1.0):
            raise ValueError(f"p_r must lie in [0, 1], got {self.p_r!r}")

    @property
    def p_u(self) -> float:
        return 1.0 - self.p_r


@dataclass(frozen=True)
class PretestConfig:
    """Hard-threshold selection rule.

    ``form="t"`` compares |beta_u / sigma_beta| to c (the reading under which
    c = sqrt(2) mimics AIC and c = sqrt(log n) mimics BIC). ``form="scaled"``
    additionally divides the statistic by sqrt(n) and then needs ``n``.
    c = 0 makes the rule select U whenever beta_u != 0.
    """

    c: float = math.sqrt(2.0)
    form: str = "t"
    n: int | None = None

    def __post_init__(self):
        if not self.c >= 0.0:
            raise ValueError("c must be >= 0")
        if self.form not in ("t", "scaled"):
            raise ValueError(f"unknown pretest form {self.form!r}")
        if self.form == "scaled" and self.n is None:
            raise ValueError("form='scaled' requires n")


@dataclass(frozen=True)
class AdaptiveConfig:
    """Tuning pair (a_n, k_n) for the adaptive smooth weights."""

    a_n: float
    k_n: float

    def __post_init__(self):
        if not self.a_n > 0.0:
            raise ValueError("a_n must be > 0")
        if not self.k_n > 0.0:
            raise ValueError("k_n must be > 0")


def stable_sigmoid(t):
    """Overflow-safe logistic 1 / (1 + exp(-t)), elementwise."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def pretest_select(beta_u: float, sigma_beta: float, config: PretestConfig) -> ModelChoice:
    """U when the studentized slope exceeds c, R otherwise (ties go to R)."""
    if not sigma_beta >= 0.0:
        raise ValueError("sigma_beta must be >= 0")
    threshold = config.c * sigma_beta
    if config.form == "scaled":
        threshold *= math.sqrt(config.n)
    # Comparing |beta_u| against c * sigma_beta avoids a 0/0 when sigma_beta = 0
    # (noiseless data); the rule then reduces to beta_u != 0.
    return ModelChoice.U if abs(beta_u) > threshold else ModelChoice.R


def adaptive_p_r(beta_u, a_n: float, k_n: float):
    """Vectorized adaptive weight 0.5*xi1 + 0.5*xi2.

    xi1 approximates the indicator of {beta_u - k_n <= 0} and xi2 the indicator
    of {beta_u + k_n >= 0}, with data-driven slopes gamma_1 = a_n * beta_u and
    gamma_2 = -a_n * beta_u, giving

        xi1 = logistic(-a_n * beta_u * (beta_u - k_n))
        xi2 = logistic(-a_n * beta_u * (beta_u + k_n)).
    """
    b = np.asarray(beta_u, dtype=float)
    # Overflow to -inf for enormous slopes is intended: the logistic maps it to 0.
    with np.errstate(over="ignore"):
        xi1 = stable_sigmoid(-a_n * b * (b - k_n))
        xi2 = stable_sigmoid(-a_n * b * (b + k_n))
    return 0.5 * xi1 + 0.5 * xi2


def adaptive_weights(beta_u: float, config: AdaptiveConfig) -> ModelWeights:
    """Smooth data-adaptive weight on the restricted model."""
    return ModelWeights(float(adaptive_p_r(beta_u, config.a_n, config.k_n)))


def default_tuning(n: int) -> AdaptiveConfig:
    """a_n = (log n)^2 with a shrinking window k_n = sqrt(log(n) / n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return AdaptiveConfig(a_n=math.log(n) ** 2, k_n=math.sqrt(math.log(n) / n))


def bic_p_r(rss_r, rss_u, n: int):
    """Vectorized BIC weight exp(-BIC_R/2) / (exp(-BIC_R/2) + exp(-BIC_U/2)).

    BIC_R = RSS_R + log n and BIC_U = RSS_U + 2 log n; the ratio is evaluated
    as a logistic of (BIC_U - BIC_R)/2 which never exponentiates a large
    positive number.
    """
    rss_r = np.asarray(rss_r, dtype=float)
    rss_u = np.asarray(rss_u, dtype=float)
    return stable_sigmoid(((rss_u - rss_r) + math.log(n)) / 2.0)


def bic_weights(dataset: Dataset, stats: DesignStats) -> ModelWeights:
    """BIC-approximate posterior weight from the two residual sums of squares."""
    x1, x2, y = dataset.design.x1, dataset.design.x2, dataset.y
    alpha_r = fit_restricted(dataset, stats)
    fit = fit_unrestricted(dataset, stats)
    resid_r = y - alpha_r * x1
    resid_u = y - fit.alpha_u * x1 - fit.beta_u * x2
    rss_r = float(np.sum(resid_r * resid_r))
    rss_u = float(np.sum(resid_u * resid_u))
    return ModelWeights(float(bic_p_r(rss_r, rss_u, dataset.n)))


def posterior_log_odds(
    yy,
    p1,
    p2,
    n: int,
    s11: float,
    s22: float,
    s12: float,
    sigma: float,
    prior_scale: float = 1.0,
    prior_p_r: float = 0.5,
):
    """Log posterior odds of the restricted model, vectorized over responses.

    Under the unrestricted model the coefficient prior is N(0, prior_scale^2 I),
    under the restricted model N(0, prior_scale^2); the marginal likelihoods are
    zero-mean Gaussians with covariances sigma^2 I + prior_scale^2 X1 X1' and
    sigma^2 I + prior_scale^2 X X'. Log-determinants use the matrix determinant
    lemma and quadratic forms the Sherman-Morrison-Woodbury identity, so no n x n
    matrix is ever formed. ``yy``, ``p1``, ``p2`` are <y,y>, <x1,y>, <x2,y>.
    """
    if not sigma > 0.0:
        raise ValueError("posterior log odds need sigma > 0")
    yy = np.asarray(yy, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    s11 = np.asarray(s11, dtype=float)
    s22 = np.asarray(s22, dtype=float)
    s12 = np.asarray(s12, dtype=float)
    s2 = sigma * sigma
    t2 = prior_scale * prior_scale
    a11 = t2 * s11 / s2
    a22 = t2 * s22 / s2
    a12 = t2 * s12 / s2
    logdet_diff = np.log((1.0 + a11) * (1.0 + a22) - a12 * a12) - np.log1p(a11)

    # 2x2 solve of (sigma^2 I + tau^2 G) z = p, written out explicitly.
    m11 = s2 + t2 * s11
    m22 = s2 + t2 * s22
    m12 = t2 * s12
    det_m = m11 * m22 - m12 * m12
    z1 = (m22 * p1 - m12 * p2) / det_m
    z2 = (m11 * p2 - m12 * p1) / det_m
    quad_u = (yy - t2 * (p1 * z1 + p2 * z2)) / s2
    quad_r = (yy - t2 * p1 * p1 / m11) / s2

    prior_odds = math.log(prior_p_r) - math.log1p(-prior_p_r)
    return prior_odds + 0.5 * logdet_diff + 0.5 * (quad_u - quad_r)


def exact_posterior_weights(
    dataset: Dataset,
    sigma: float,
    prior_scale: float = 1.0,
    prior_p_r: float = 0.5,
) -> ModelWeights:
    """Exact posterior model probability of the restricted model.

    Defined for any design, collinear or not, since only marginal Gaussian
    densities of y are compared. For sigma = 0 the sigma -> 0 limit is returned:
    all weight on R when both models interpolate y equally well, otherwise all
    weight on U.
    """
    if not 0.0 < prior_p_r < 1.0:
        raise ValueError("prior_p_r must lie in (0, 1)")
    if not prior_scale > 0.0:
        raise ValueError("prior_scale must be > 0")
    x1, x2, y = dataset.design.x1, dataset.design.x2, dataset.y
    if sigma == 0.0:
        stats = compute_design_stats(dataset.design, 0.0)
        alpha_r = fit_restricted(dataset, stats)
        fit = fit_unrestricted(dataset, stats)
        resid_r = y - alpha_r * x1
        resid_u = y - fit.alpha_u * x1 - fit.beta_u * x2
        rss_r = float(np.sum(resid_r * resid_r))
        rss_u = float(np.sum(resid_u * resid_u))
        tol = 1e-9 * (1.0 + float(np.sum(y * y)))
        return ModelWeights(1.0 if rss_r - rss_u <= tol else 0.0)
    yy = float(np.sum(y * y))
    p1 = float(np.sum(x1 * y))
    p2 = float(np.sum(x2 * y))
    s11 = float(np.sum(x1 * x1))
    s22 = float(np.sum(x2 * x2))
    s12 = float(np.sum(x1 * x2))
    d = posterior_log_odds(
        yy, p1, p2, dataset.n, s11, s22, s12, sigma, prior_scale, prior_p_r
    )
    return ModelWeights(float(stable_sigmoid(d)))
