#ifndef STABCP_CONFORMAL_HPP
#define STABCP_CONFORMAL_HPP

#include <vector>

#include "stabcp/core.hpp"

// Constructors for the three prediction-set methods: split conformal,
// gamma-inflated jackknife+, and gamma-inflated full conformal over a
// response grid. Each method also exposes a fit-once form so that a single
// trained state can be evaluated at many query points.

namespace stabcp {

enum class Method { split_conformal, jackknife_plus, full_conformal };

const char* method_name(Method m);

// Finite union of disjoint extended-real intervals, tagged with the method
// and the (alpha, gamma) it was built at.
class PredictionSet {
 public:
  PredictionSet(Method method, double alpha, double gamma, std::vector<Interval> intervals);

  bool contains(double y) const;
  bool is_empty() const;
  bool is_whole_line() const;

  const std::vector<Interval>& intervals() const { return intervals_; }
  Method method() const { return method_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

 private:
  std::vector<Interval> intervals_;  // sorted, pairwise disjoint, no empties
  Method method_;
  double alpha_;
  double gamma_;
};

// ---------------------------------------------------------------------------
// Split conformal
// ---------------------------------------------------------------------------

// Model trained on the proper training set plus the absolute calibration
// residuals |Y_i - mu(X_i)|.
struct SplitFit {
  PredictorPtr model;
  std::vector<double> calibration_residuals;
};

SplitFit split_fit(const Dataset& train, const Dataset& calib, const RegressionAlgorithm& alg);

// mu(x) +- Quantile(residuals; (1-alpha)(1+1/n1)); the whole line when the
// quantile overflows.
PredictionSet split_interval(const SplitFit& fit, double alpha, std::span<const double> x);

PredictionSet split_conformal(const Dataset& train, const Dataset& calib,
                              const RegressionAlgorithm& alg, double alpha,
                              const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Jackknife+
// ---------------------------------------------------------------------------

// The n leave-one-out models and their residuals R_i = |Y_i - mu_{-i}(X_i)|.
struct LooFit {
  std::vector<PredictorPtr> predictors;
  std::vector<double> residuals;

  std::size_t size() const { return predictors.size(); }
};

LooFit loo_fit(const Dataset& train, const RegressionAlgorithm& alg);

// [ -Quantile({-mu_{-i}(x) + R_i}; tau) - gamma,
//    Quantile({ mu_{-i}(x) + R_i}; tau) + gamma ]  with tau = (1-alpha)(1+1/n).
// Always a single interval; the whole line when the quantile overflows.
PredictionSet jackknife_plus_interval(const LooFit& fit, double alpha, double gamma,
                                      std::span<const double> x);

PredictionSet jackknife_plus(const Dataset& train, const RegressionAlgorithm& alg, double alpha,
                             double gamma, const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Full conformal
// ---------------------------------------------------------------------------

// Uniform response grid used to discretize the full-conformal membership
// test. step = (hi - lo) / (count - 1).
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 2001;

  double step() const { return (hi - lo) / static_cast<double>(count - 1); }
  double at(std::size_t i) const { return lo + step() * static_cast<double>(i); }
  void validate() const;
};

// Default grid: the response range widened by 3x its span plus 1 on each
// side, wide enough for any plausible response at the scales used here. This
// is a documented approximation -- the exact prediction set ranges over all
// real y.
GridSpec default_grid(const Dataset& train, std::size_t count = 2001);

// Exact membership test at a single hypothesized response y: fits on
// train + {(x, y)} and checks
//   |y - mu^y(x)| <= Quantile({|Y_i - mu^y(X_i)|}_{i in [n]}; (1-alpha)(1+1/n)) + gamma.
bool full_conformal_member(const Dataset& train, const RegressionAlgorithm& alg, double alpha,
                           double gamma, std::span<const double> x, double y);

// Runs the membership test at every grid value and returns the maximal runs
// of included points, each widened by half a grid step per side. Widening
// never shrinks the set, so grid error biases toward coverage.
PredictionSet full_conformal(const Dataset& train, const RegressionAlgorithm& alg, double alpha,
                             double gamma, const std::vector<double>& x, const GridSpec& grid);

}  // namespace stabcp

#endif  // STABCP_CONFORMAL_HPP
