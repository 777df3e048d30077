#include "stabcp/conformal.hpp"

#include <algorithm>
#include <cmath>

namespace stabcp {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be a finite value >= 0");
  }
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::split_conformal: return "split";
    case Method::jackknife_plus: return "jackknife_plus";
    case Method::full_conformal: return "full_conformal";
  }
  return "?";
}

PredictionSet::PredictionSet(Method method, double alpha, double gamma,
                             std::vector<Interval> intervals)
    : intervals_(std::move(intervals)), method_(method), alpha_(alpha), gamma_(gamma) {
  for (const auto& iv : intervals_) {
    if (iv.is_empty()) throw std::invalid_argument("PredictionSet: empty member interval");
  }
  for (std::size_t i = 1; i < intervals_.size(); ++i) {
    if (!(intervals_[i - 1].hi() < intervals_[i].lo())) {
      throw std::invalid_argument("PredictionSet: intervals must be sorted and disjoint");
    }
  }
}

bool PredictionSet::contains(double y) const {
  for (const auto& iv : intervals_) {
    if (iv.contains(y)) return true;
  }
  return false;
}

bool PredictionSet::is_empty() const { return intervals_.empty(); }

bool PredictionSet::is_whole_line() const {
  return intervals_.size() == 1 && intervals_[0].lo().is_neg_inf() && intervals_[0].hi().is_pos_inf();
}

// ---------------------------------------------------------------------------

SplitFit split_fit(const Dataset& train, const Dataset& calib, const RegressionAlgorithm& alg) {
  if (train.empty()) throw std::invalid_argument("split_fit: empty training set");
  if (calib.empty()) throw std::invalid_argument("split_fit: empty calibration set");
  SplitFit fit;
  fit.model = alg.fit(train);
  fit.calibration_residuals.reserve(calib.size());
  for (const auto& p : calib.points()) {
    fit.calibration_residuals.push_back(std::abs(p.y - fit.model->predict(p.x)));
  }
  return fit;
}

PredictionSet split_interval(const SplitFit& fit, double alpha, std::span<const double> x) {
  check_alpha(alpha);
  const double n1 = static_cast<double>(fit.calibration_residuals.size());
  const double tau = (1.0 - alpha) * (1.0 + 1.0 / n1);
  const ExtendedReal q = conformal_quantile(fit.calibration_residuals, tau);
  if (q.is_pos_inf()) {
    return PredictionSet(Method::split_conformal, alpha, 0.0, {Interval::whole_line()});
  }
  const double center = fit.model->predict(x);
  return PredictionSet(Method::split_conformal, alpha, 0.0,
                       {Interval(ExtendedReal(center - q.value()), ExtendedReal(center + q.value()))});
}

PredictionSet split_conformal(const Dataset& train, const Dataset& calib,
                              const RegressionAlgorithm& alg, double alpha,
                              const std::vector<double>& x) {
  return split_interval(split_fit(train, calib, alg), alpha, x);
}

// ---------------------------------------------------------------------------

LooFit loo_fit(const Dataset& train, const RegressionAlgorithm& alg) {
  const std::size_t n = train.size();
  if (n < 2) throw std::invalid_argument("loo_fit: need at least 2 points");
  LooFit fit;
  fit.predictors.reserve(n);
  fit.residuals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PredictorPtr model = alg.fit(train.without(i));
    fit.residuals.push_back(std::abs(train[i].y - model->predict(train[i].x)));
    fit.predictors.push_back(std::move(model));
  }
  return fit;
}

PredictionSet jackknife_plus_interval(const LooFit& fit, double alpha, double gamma,
                                      std::span<const double> x) {
  check_alpha(alpha);
  check_gamma(gamma);
  const std::size_t n = fit.size();
  const double tau = (1.0 - alpha) * (1.0 + 1.0 / static_cast<double>(n));

  std::vector<double> upper(n), lower(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = fit.predictors[i]->predict(x);
    upper[i] = mu + fit.residuals[i];
    lower[i] = -mu + fit.residuals[i];
  }
  const ExtendedReal q_hi = conformal_quantile(upper, tau);
  const ExtendedReal q_lo = conformal_quantile(lower, tau);
  const ExtendedReal hi = q_hi.shifted(gamma);
  const ExtendedReal lo = (-q_lo).shifted(-gamma);
  return PredictionSet(Method::jackknife_plus, alpha, gamma, {Interval(lo, hi)});
}

PredictionSet jackknife_plus(const Dataset& train, const RegressionAlgorithm& alg, double alpha,
                             double gamma, const std::vector<double>& x) {
  return jackknife_plus_interval(loo_fit(train, alg), alpha, gamma, x);
}

// ---------------------------------------------------------------------------

void GridSpec::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("GridSpec: lo must be < hi");
  if (count < 2) throw std::invalid_argument("GridSpec: count must be >= 2");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("GridSpec: bounds must be finite");
}

GridSpec default_grid(const Dataset& train, std::size_t count) {
  if (train.empty()) throw std::invalid_argument("default_grid: empty training set");
  double y_min = train[0].y, y_max = train[0].y;
  for (const auto& p : train.points()) {
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  const double span = y_max - y_min;
  GridSpec grid{y_min - 3.0 * span - 1.0, y_max + 3.0 * span + 1.0, count};
  grid.validate();
  return grid;
}

bool full_conformal_member(const Dataset& train, const RegressionAlgorithm& alg, double alpha,
                           double gamma, std::span<const double> x, double y) {
  check_alpha(alpha);
  check_gamma(gamma);
  if (train.empty()) throw std::invalid_argument("full_conformal: empty training set");
  const std::size_t n = train.size();
  const PredictorPtr model = alg.fit(
      train.with_appended(std::vector<double>(x.begin(), x.end()), y));
  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i) {
    residuals[i] = std::abs(train[i].y - model->predict(train[i].x));
  }
  const double tau = (1.0 - alpha) * (1.0 + 1.0 / static_cast<double>(n));
  const ExtendedReal q = conformal_quantile(residuals, tau);
  if (q.is_pos_inf()) return true;
  return std::abs(y - model->predict(x)) <= q.value() + gamma;
}

PredictionSet full_conformal(const Dataset& train, const RegressionAlgorithm& alg, double alpha,
                             double gamma, const std::vector<double>& x, const GridSpec& grid) {
  grid.validate();
  const double half_step = 0.5 * grid.step();
  std::vector<Interval> intervals;
  std::size_t run_start = 0;
  bool in_run = false;
  for (std::size_t i = 0; i < grid.count; ++i) {
    const bool member = full_conformal_member(train, alg, alpha, gamma, x, grid.at(i));
    if (member && !in_run) {
      run_start = i;
      in_run = true;
    } else if (!member && in_run) {
      intervals.emplace_back(ExtendedReal(grid.at(run_start) - half_step),
                             ExtendedReal(grid.at(i - 1) + half_step));
      in_run = false;
    }
  }
  if (in_run) {
    intervals.emplace_back(ExtendedReal(grid.at(run_start) - half_step),
                           ExtendedReal(grid.at(grid.count - 1) + half_step));
  }
  return PredictionSet(Method::full_conformal, alpha, gamma, std::move(intervals));
}

}  // namespace stabcp
