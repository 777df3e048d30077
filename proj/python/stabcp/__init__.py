"""Distribution-free prediction intervals and algorithmic stability toolkit.

Thin Python surface over the C++ core: base learners, split/jackknife+/full
conformal prediction sets, Monte Carlo m-stability estimators, and the
training-conditional coverage bound evaluators.
"""

from ._core import (
    Algorithm,
    Distribution,
    Predictor,
    algorithm,
    bagging_stability_bound,
    bound_split_conformal,
    bounded_uniform,
    clipped,
    conformal_quantile,
    constant,
    derive_stream_probe,
    distribution,
    estimate_stability,
    estimate_tail_stability,
    evaluate_bound,
    fit,
    full_conformal,
    jackknife_plus,
    knn,
    knn_stability_bound,
    linear_gaussian,
    mean,
    miscoverage_distribution,
    ridge,
    ridge_stability_bound,
    sine_mixture,
    split_conformal,
    stability_curve,
    subbag,
    tree,
)

__all__ = [
    "Algorithm",
    "Distribution",
    "Predictor",
    "algorithm",
    "bagging_stability_bound",
    "bound_split_conformal",
    "bounded_uniform",
    "clipped",
    "conformal_quantile",
    "constant",
    "derive_stream_probe",
    "distribution",
    "estimate_stability",
    "estimate_tail_stability",
    "evaluate_bound",
    "fit",
    "full_conformal",
    "jackknife_plus",
    "knn",
    "knn_stability_bound",
    "linear_gaussian",
    "mean",
    "miscoverage_distribution",
    "ridge",
    "ridge_stability_bound",
    "sine_mixture",
    "split_conformal",
    "stability_curve",
    "subbag",
    "tree",
]
