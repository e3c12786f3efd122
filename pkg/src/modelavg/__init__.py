"""modelavg: post-model-selection and model-averaged estimation lab.

Estimation, weighting, and resampling tools for the two-regressor linear
model with uncertainty about whether the second slope is zero, plus the Monte
Carlo harness and CLI that produce the package's risk and resampling-accuracy
experiments.
"""

from .config import EXPERIMENTS, RunConfig, parse_config
from .errors import (
    CollinearDesign,
    ConfigError,
    ModelAvgError,
    TooManySingularResamples,
    ZeroColumn,
)
from .estimators import (
    ESTIMATOR_NAMES,
    EstimateBundle,
    MeanModelSample,
    estimate_all,
    make_multi_pipeline,
    make_pipeline,
    mean_model_estimate,
    model_average,
    post_model_selection,
)
from .experiments import (
    Scenario,
    draw_dataset,
    ks_ratio_curve,
    ks_two_sample,
    make_scenario,
    mc_estimator_draws,
    mc_sampling_distribution,
    mse_curve,
    resampling_error_curve,
    risk_bound_sweep,
    stream,
    weight_decay_sweep,
)
from .model import (
    COLLINEARITY_RTOL,
    REFERENCE_DESIGN_SEED,
    Dataset,
    DesignMatrix,
    DesignStats,
    TrueParams,
    UnrestrictedFit,
    compute_design_stats,
    fit_restricted,
    fit_unrestricted,
    generate_response,
    load_reference_design,
    make_uniform_design,
    read_design_csv,
    write_design_csv,
)
from .resampling import (
    EmpiricalSample,
    ResamplePlan,
    mean_model_bootstrap,
    paired_bootstrap,
    subsample_distribution,
)
from .weights import (
    AdaptiveConfig,
    ModelChoice,
    ModelWeights,
    PretestConfig,
    adaptive_weights,
    bic_weights,
    default_tuning,
    exact_posterior_weights,
    pretest_select,
)

__version__ = "0.1.0"
