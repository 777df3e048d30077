#ifndef STABCP_STABILITY_HPP
#define STABCP_STABILITY_HPP

#include <optional>
#include <vector>

#include "stabcp/core.hpp"
#include "stabcp/distributions.hpp"

// Monte Carlo estimation of the four m-stability functionals (out-of-sample
// or in-sample evaluation, add-remove or swap perturbation), the (epsilon,
// nu) tail variant, and the closed-form stability bounds for k-nearest
// neighbors, ridge regression, and subbagging.
//
// All estimators couple the two fitted models within a trial: the (n+m)-
// sample extends the n-sample, and the swap variant replaces the last m
// points. Trial t draws everything from derive_stream(seed, t), so results
// do not depend on how trials are scheduled.

namespace stabcp {

enum class StabilitySide { out_of_sample, in_sample };
enum class StabilityPerturbation { add_remove, swap };

struct StabilityVariant {
  StabilitySide side = StabilitySide::out_of_sample;
  StabilityPerturbation perturbation = StabilityPerturbation::add_remove;
};

const char* variant_name(StabilityVariant v);
StabilityVariant parse_variant(const std::string& text);  // "out-add", "in-swap", ...

struct StabilityEstimate {
  StabilityVariant variant;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  double mean = 0.0;       // beta hat
  double std_error = 0.0;  // sample SD / sqrt(trials)
};

struct TailStabilityEstimate {
  std::size_t m = 0;
  std::size_t n = 0;
  double epsilon = 0.0;
  double nu_hat = 0.0;  // empirical frequency of |mu_n(X) - mu_{n+m}(X)| > epsilon
  std::size_t trials = 0;
};

// One Monte Carlo estimate of beta_{m,n} for the chosen variant.
// Preconditions by variant: add-remove needs n >= 1; swap needs n >= m;
// in-sample swap needs n > m (the evaluation point X_1 must be retained).
StabilityEstimate estimate_stability(const RegressionAlgorithm& alg, const Distribution& dist,
                                     StabilityVariant variant, std::size_t n, std::size_t m,
                                     std::size_t trials, std::int64_t seed,
                                     std::size_t workers = 0);

struct StabilityCurvePoint {
  StabilityEstimate estimate;
  // Sum_{k=n}^{n+m-1} beta_{1,k} estimated from the same trials; only
  // produced for the out-of-sample add-remove variant.
  std::optional<double> lemma_bound;
  std::optional<double> lemma_std_error;
};

// Estimates beta_{m,n} for every m in ascending m_list, sharing one stream
// ladder per trial so the whole curve is reproducible from (seed, trials).
std::vector<StabilityCurvePoint> stability_curve(const RegressionAlgorithm& alg,
                                                 const Distribution& dist,
                                                 StabilityVariant variant, std::size_t n,
                                                 const std::vector<std::size_t>& m_list,
                                                 std::size_t trials, std::int64_t seed,
                                                 std::size_t workers = 0);

// nu_hat for the probabilistic form of out-of-sample m-stability:
// P{ |mu_n(X) - mu_{n+m}(X)| > epsilon } estimated over `trials` trials.
TailStabilityEstimate estimate_tail_stability(const RegressionAlgorithm& alg,
                                              const Distribution& dist, std::size_t n,
                                              std::size_t m, double epsilon, std::size_t trials,
                                              std::int64_t seed, std::size_t workers = 0);

// Closed-form bounds. Each returns the printed value of the corresponding
// proposition; inputs outside the stated ranges throw.
double knn_stability_bound(double bound_y, std::size_t m, std::size_t n);
double ridge_stability_bound(double bound_x, double bound_y, double lambda, std::size_t m,
                             std::size_t n);
double bagging_stability_bound(std::size_t n, std::size_t bag_size, std::size_t m,
                               std::size_t bag_count);

}  // namespace stabcp

#endif  // STABCP_STABILITY_HPP
