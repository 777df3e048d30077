#include "stabcp/stability.hpp"

#include <algorithm>
#include <cmath>

#include "stabcp/parallel.hpp"

namespace stabcp {

namespace {

struct MeanStdError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanStdError summarize(const std::vector<double>& values) {
  MeanStdError out;
  const std::size_t k = values.size();
  if (k == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(k);
  if (k >= 2) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - out.mean;
      ss += d * d;
    }
    const double var = ss / static_cast<double>(k - 1);
    out.std_error = std::sqrt(var / static_cast<double>(k));
  }
  return out;
}

void check_preconditions(StabilityVariant variant, std::size_t n, std::size_t m) {
  if (n < 1) throw std::invalid_argument("estimate_stability: n must be >= 1");
  if (variant.perturbation == StabilityPerturbation::swap) {
    if (m > n) throw std::invalid_argument("estimate_stability: swap variants need m <= n");
    if (variant.side == StabilitySide::in_sample && m >= n) {
      throw std::invalid_argument("estimate_stability: in-sample swap needs m < n");
    }
  }
}

// |mu(X_eval) - mu'(X_eval)| for a single trial, with the pair of training
// sets built exactly as the chosen definition prescribes.
double stability_draw(const RegressionAlgorithm& alg, const Distribution& dist,
                      StabilityVariant variant, std::size_t n, std::size_t m, RngStream& rng) {
  Dataset base(dist.dim()), other(dist.dim());
  if (variant.perturbation == StabilityPerturbation::add_remove) {
    const Dataset pool = dist.sample(n + m, rng);
    base = pool.prefix(n);
    other = pool;
  } else {
    const Dataset pool = dist.sample(n, rng);
    const Dataset replacements = dist.sample(m, rng);
    base = pool;
    other = pool.prefix(n - m);
    for (const auto& p : replacements.points()) other.add(p.x, p.y);
  }
  std::vector<double> eval_x;
  if (variant.side == StabilitySide::out_of_sample) {
    eval_x = dist.sample_point(rng).x;
  } else {
    eval_x = base[0].x;
  }
  const PredictorPtr mu = alg.fit(base);
  const PredictorPtr mu_prime = alg.fit(other);
  return std::abs(mu->predict(eval_x) - mu_prime->predict(eval_x));
}

}  // namespace

const char* variant_name(StabilityVariant v) {
  if (v.side == StabilitySide::out_of_sample) {
    return v.perturbation == StabilityPerturbation::add_remove ? "out-add" : "out-swap";
  }
  return v.perturbation == StabilityPerturbation::add_remove ? "in-add" : "in-swap";
}

StabilityVariant parse_variant(const std::string& text) {
  if (text == "out-add") return {StabilitySide::out_of_sample, StabilityPerturbation::add_remove};
  if (text == "out-swap") return {StabilitySide::out_of_sample, StabilityPerturbation::swap};
  if (text == "in-add") return {StabilitySide::in_sample, StabilityPerturbation::add_remove};
  if (text == "in-swap") return {StabilitySide::in_sample, StabilityPerturbation::swap};
  throw std::invalid_argument("unknown stability variant '" + text +
                              "' (expected out-add, out-swap, in-add or in-swap)");
}

StabilityEstimate estimate_stability(const RegressionAlgorithm& alg, const Distribution& dist,
                                     StabilityVariant variant, std::size_t n, std::size_t m,
                                     std::size_t trials, std::int64_t seed, std::size_t workers) {
  check_preconditions(variant, n, m);
  if (trials < 1) throw std::invalid_argument("estimate_stability: trials must be >= 1");

  const std::vector<double> draws =
      parallel_map_trials<double>(trials, workers, [&](std::size_t t) {
        RngStream rng = derive_stream(seed, t);
        return stability_draw(alg, dist, variant, n, m, rng);
      });
  const MeanStdError stats = summarize(draws);
  return StabilityEstimate{variant, m, n, trials, stats.mean, stats.std_error};
}

std::vector<StabilityCurvePoint> stability_curve(const RegressionAlgorithm& alg,
                                                 const Distribution& dist,
                                                 StabilityVariant variant, std::size_t n,
                                                 const std::vector<std::size_t>& m_list,
                                                 std::size_t trials, std::int64_t seed,
                                                 std::size_t workers) {
  if (m_list.empty()) throw std::invalid_argument("stability_curve: m_list must be nonempty");
  if (!std::is_sorted(m_list.begin(), m_list.end())) {
    throw std::invalid_argument("stability_curve: m_list must be ascending");
  }
  const std::size_t m_max = m_list.back();
  check_preconditions(variant, n, m_max);
  if (trials < 1) throw std::invalid_argument("stability_curve: trials must be >= 1");

  const bool with_lemma = variant.side == StabilitySide::out_of_sample &&
                          variant.perturbation == StabilityPerturbation::add_remove;

  struct TrialResult {
    std::vector<double> deltas;      // |mu_n - mu_{n+m}| per requested m
    std::vector<double> lemma_sums;  // sum_{k=n}^{n+m-1} |mu_k - mu_{k+1}| per requested m
  };

  const auto results = parallel_map_trials<TrialResult>(trials, workers, [&](std::size_t t) {
    RngStream rng = derive_stream(seed, t);
    TrialResult r;
    r.deltas.reserve(m_list.size());
    if (variant.perturbation == StabilityPerturbation::add_remove) {
      const Dataset pool = dist.sample(n + m_max, rng);
      std::vector<double> eval_x =
          variant.side == StabilitySide::out_of_sample ? dist.sample_point(rng).x : pool[0].x;
      if (with_lemma) {
        // One prediction per sample size n..n+m_max covers both the curve
        // and the one-step increments of the lemma bound.
        std::vector<double> pred(m_max + 1);
        for (std::size_t k = 0; k <= m_max; ++k) {
          pred[k] = alg.fit(pool.prefix(n + k))->predict(eval_x);
        }
        r.lemma_sums.reserve(m_list.size());
        std::vector<double> increments(m_max);
        for (std::size_t k = 0; k < m_max; ++k) increments[k] = std::abs(pred[k] - pred[k + 1]);
        for (std::size_t m : m_list) {
          r.deltas.push_back(std::abs(pred[0] - pred[m]));
          double s = 0.0;
          for (std::size_t k = 0; k < m; ++k) s += increments[k];
          r.lemma_sums.push_back(s);
        }
      } else {
        const double base = alg.fit(pool.prefix(n))->predict(eval_x);
        for (std::size_t m : m_list) {
          r.deltas.push_back(std::abs(base - alg.fit(pool.prefix(n + m))->predict(eval_x)));
        }
      }
    } else {
      const Dataset pool = dist.sample(n, rng);
      const Dataset replacements = dist.sample(m_max, rng);
      std::vector<double> eval_x =
          variant.side == StabilitySide::out_of_sample ? dist.sample_point(rng).x : pool[0].x;
      const double base = alg.fit(pool)->predict(eval_x);
      for (std::size_t m : m_list) {
        Dataset swapped = pool.prefix(n - m);
        for (std::size_t i = 0; i < m; ++i) swapped.add(replacements[i].x, replacements[i].y);
        r.deltas.push_back(std::abs(base - alg.fit(swapped)->predict(eval_x)));
      }
    }
    return r;
  });

  std::vector<StabilityCurvePoint> curve;
  curve.reserve(m_list.size());
  std::vector<double> column(trials);
  for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
    for (std::size_t t = 0; t < trials; ++t) column[t] = results[t].deltas[mi];
    const MeanStdError stats = summarize(column);
    StabilityCurvePoint point;
    point.estimate = StabilityEstimate{variant, m_list[mi], n, trials, stats.mean, stats.std_error};
    if (with_lemma) {
      for (std::size_t t = 0; t < trials; ++t) column[t] = results[t].lemma_sums[mi];
      const MeanStdError lemma = summarize(column);
      point.lemma_bound = lemma.mean;
      point.lemma_std_error = lemma.std_error;
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

TailStabilityEstimate estimate_tail_stability(const RegressionAlgorithm& alg,
                                              const Distribution& dist, std::size_t n,
                                              std::size_t m, double epsilon, std::size_t trials,
                                              std::int64_t seed, std::size_t workers) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("estimate_tail_stability: epsilon must be > 0");
  const StabilityVariant variant{StabilitySide::out_of_sample, StabilityPerturbation::add_remove};
  check_preconditions(variant, n, m);
  if (trials < 1) throw std::invalid_argument("estimate_tail_stability: trials must be >= 1");

  const std::vector<double> exceed =
      parallel_map_trials<double>(trials, workers, [&](std::size_t t) {
        RngStream rng = derive_stream(seed, t);
        return stability_draw(alg, dist, variant, n, m, rng) > epsilon ? 1.0 : 0.0;
      });
  double count = 0.0;
  for (double v : exceed) count += v;
  return TailStabilityEstimate{m, n, epsilon, count / static_cast<double>(trials), trials};
}

double knn_stability_bound(double bound_y, std::size_t m, std::size_t n) {
  if (!(bound_y > 0)) throw std::invalid_argument("knn_stability_bound: bound_y must be > 0");
  if (n < 1) throw std::invalid_argument("knn_stability_bound: n must be >= 1");
  return 2.0 * bound_y * static_cast<double>(m) / static_cast<double>(n + m);
}

double ridge_stability_bound(double bound_x, double bound_y, double lambda, std::size_t m,
                             std::size_t n) {
  if (!(bound_x > 0) || !(bound_y > 0) || !(lambda > 0)) {
    throw std::invalid_argument("ridge_stability_bound: bounds and lambda must be > 0");
  }
  if (n < 1) throw std::invalid_argument("ridge_stability_bound: n must be >= 1");
  if (m == 0) return 0.0;
  const double bx2 = bound_x * bound_x;
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  return (2.0 * bx2 * bound_y / lambda) * (1.0 + bx2 / lambda) * (md / (nd + md)) *
         (1.0 / std::sqrt(md) + 1.0 / std::sqrt(nd));
}

double bagging_stability_bound(std::size_t n, std::size_t bag_size, std::size_t m,
                               std::size_t bag_count) {
  if (bag_size < 1) throw std::invalid_argument("bagging_stability_bound: bag size must be >= 1");
  if (bag_size >= n) throw std::invalid_argument("bagging_stability_bound: bag size must be < n");
  if (bag_count < 1) throw std::invalid_argument("bagging_stability_bound: B must be >= 1");
  const double nd = static_cast<double>(n);
  const double term = static_cast<double>(m) / (4.0 * nd) * static_cast<double>(bag_size) /
                      (nd + 1.0 - static_cast<double>(bag_size));
  return std::sqrt(term) + 1.0 / std::sqrt(static_cast<double>(bag_count));
}

}  // namespace stabcp
