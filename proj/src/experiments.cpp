#include "stabcp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stabcp/parallel.hpp"
#include "stabcp/regressors.hpp"

namespace stabcp {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // "\n" line endings everywhere
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

double order_statistic_quantile(std::vector<double> values, double q) {
  const std::size_t n = values.size();
  double raw = std::ceil(q * static_cast<double>(n));
  std::size_t k = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  if (k > n) k = n;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   values.end());
  return values[k - 1];
}

}  // namespace

PredictionRule build_rule(Method method, const RegressionAlgorithm& alg, const Dataset& data,
                          double alpha, double gamma, std::size_t grid_count) {
  switch (method) {
    case Method::split_conformal: {
      if (gamma != 0.0) {
        throw std::invalid_argument("split conformal does not take an inflation parameter");
      }
      if (data.size() < 2) throw std::invalid_argument("split conformal needs n >= 2");
      const std::size_t n0 = data.size() / 2;
      Dataset train(data.dim()), calib(data.dim());
      for (std::size_t i = 0; i < data.size(); ++i) {
        (i < n0 ? train : calib).add(data[i].x, data[i].y);
      }
      auto fit = std::make_shared<SplitFit>(split_fit(train, calib, alg));
      return [fit, alpha](const std::vector<double>& x) {
        return split_interval(*fit, alpha, x);
      };
    }
    case Method::jackknife_plus: {
      auto fit = std::make_shared<LooFit>(loo_fit(data, alg));
      return [fit, alpha, gamma](const std::vector<double>& x) {
        return jackknife_plus_interval(*fit, alpha, gamma, x);
      };
    }
    case Method::full_conformal: {
      auto train = std::make_shared<Dataset>(data);
      const GridSpec grid = default_grid(data, grid_count);
      const RegressionAlgorithm* alg_ptr = &alg;
      return [train, alg_ptr, alpha, gamma, grid](const std::vector<double>& x) {
        return full_conformal(*train, *alg_ptr, alpha, gamma, x, grid);
      };
    }
  }
  throw std::logic_error("build_rule: unreachable");
}

double miscoverage_of_rule(const PredictionRule& rule, const Distribution& dist,
                           std::size_t n_test, RngStream& rng) {
  if (n_test < 1) throw std::invalid_argument("miscoverage: n_test must be >= 1");
  std::size_t misses = 0;
  for (std::size_t i = 0; i < n_test; ++i) {
    const DataPoint p = dist.sample_point(rng);
    if (!rule(p.x).contains(p.y)) ++misses;
  }
  return static_cast<double>(misses) / static_cast<double>(n_test);
}

MiscoverageSample estimate_miscoverage(Method method, const RegressionAlgorithm& alg,
                                       const Distribution& dist, double alpha, double gamma,
                                       std::size_t n, std::size_t n_test, RngStream& rng,
                                       std::size_t grid_count) {
  if (n < 1) throw std::invalid_argument("miscoverage: n must be >= 1");
  const Dataset data = dist.sample(n, rng);
  const PredictionRule rule = build_rule(method, alg, data, alpha, gamma, grid_count);
  MiscoverageSample sample;
  sample.alpha_hat = miscoverage_of_rule(rule, dist, n_test, rng);
  sample.method = method;
  sample.alpha = alpha;
  sample.gamma = gamma;
  sample.n = n;
  sample.n_test = n_test;
  return sample;
}

std::vector<MiscoverageSample> miscoverage_distribution(const CoverageConfig& config) {
  if (!config.alg || !config.dist) {
    throw std::invalid_argument("coverage: algorithm and distribution are required");
  }
  if (config.trials < 1) throw std::invalid_argument("coverage: trials must be >= 1");
  auto samples = parallel_map_trials<MiscoverageSample>(
      config.trials, config.workers, [&](std::size_t t) {
        RngStream rng = derive_stream(config.seed, t);
        MiscoverageSample s =
            estimate_miscoverage(config.method, *config.alg, *config.dist, config.alpha,
                                 config.gamma, config.n, config.n_test, rng, config.grid_count);
        s.trial = t;
        return s;
      });
  return samples;
}

CoverageSummary summarize_coverage(const std::vector<MiscoverageSample>& samples,
                                   const std::vector<double>& tail_thresholds,
                                   const std::optional<BoundReport>& bound) {
  if (samples.empty()) throw std::invalid_argument("summarize_coverage: no samples");
  CoverageSummary out;
  std::vector<double> values;
  values.reserve(samples.size());
  double sum = 0.0;
  for (const auto& s : samples) {
    values.push_back(s.alpha_hat);
    sum += s.alpha_hat;
  }
  out.mean = sum / static_cast<double>(values.size());
  out.q50 = order_statistic_quantile(values, 0.50);
  out.q90 = order_statistic_quantile(values, 0.90);
  out.q99 = order_statistic_quantile(values, 0.99);
  for (double threshold : tail_thresholds) {
    std::size_t above = 0;
    for (double v : values) {
      if (v > threshold) ++above;
    }
    out.tail_freqs.emplace_back(threshold,
                                static_cast<double>(above) / static_cast<double>(values.size()));
  }
  if (bound.has_value()) {
    out.bound_threshold = bound->threshold;
    out.bound_failure_prob = bound->failure_prob;
  }
  return out;
}

double tail_frequency_at_least(const std::vector<MiscoverageSample>& samples, double threshold) {
  if (samples.empty()) throw std::invalid_argument("tail_frequency_at_least: no samples");
  std::size_t count = 0;
  for (const auto& s : samples) {
    if (s.alpha_hat >= threshold) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

// ---------------------------------------------------------------------------

std::optional<std::pair<double, std::string>> theory_bound_for(const RegressionAlgorithm& alg,
                                                               const Distribution& dist,
                                                               std::size_t m, std::size_t n) {
  if (const auto* knn = dynamic_cast<const KnnAlgorithm*>(&alg)) {
    (void)knn;
    if (const auto by = dist.bound_y()) {
      return std::make_pair(knn_stability_bound(*by, m, n), std::string("knn"));
    }
    return std::nullopt;
  }
  if (const auto* ridge = dynamic_cast<const RidgeAlgorithm*>(&alg)) {
    const auto bx = dist.bound_x();
    const auto by = dist.bound_y();
    if (bx && by) {
      return std::make_pair(ridge_stability_bound(*bx, *by, ridge->params().lambda, m, n),
                            std::string("ridge"));
    }
    return std::nullopt;
  }
  if (const auto* bag = dynamic_cast<const SubbagAlgorithm*>(&alg)) {
    // The subbagging bound assumes base outputs in [0,1]; only certify it
    // when the base is explicitly clipped to that range or the responses
    // are themselves bounded in [0,1] (mean-type learners stay in range).
    const auto by = dist.bound_y();
    const bool clipped_base =
        bag->params().base->name().rfind("clip(", 0) == 0;  // conservative tag check
    if (clipped_base || (by && *by <= 1.0)) {
      return std::make_pair(
          bagging_stability_bound(n, bag->params().bag_size, m, bag->params().bag_count),
          std::string("bagging"));
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<StabilityCsvRow> stability_rows(const RegressionAlgorithm& alg,
                                            const Distribution& dist, StabilityVariant variant,
                                            std::size_t n, const std::vector<std::size_t>& m_list,
                                            std::size_t trials, std::int64_t seed,
                                            std::size_t workers) {
  const auto curve = stability_curve(alg, dist, variant, n, m_list, trials, seed, workers);
  std::vector<StabilityCsvRow> rows;
  rows.reserve(curve.size());
  for (const auto& point : curve) {
    StabilityCsvRow row;
    row.variant = variant_name(variant);
    row.n = point.estimate.n;
    row.m = point.estimate.m;
    row.trials = point.estimate.trials;
    row.beta_hat = point.estimate.mean;
    row.std_error = point.estimate.std_error;
    row.lemma_bound = point.lemma_bound;
    if (const auto bound = theory_bound_for(alg, dist, point.estimate.m, point.estimate.n)) {
      row.theory_bound = bound->first;
      row.theory_bound_kind = bound->second;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, std::vector<StabilityCsvRow>> run_figure1(const Figure1Config& config) {
  if (config.m_max < 1) throw std::invalid_argument("figure1: m_max must be >= 1");
  const SineMixtureDistribution dist(config.d);
  std::vector<std::size_t> m_list(config.m_max);
  for (std::size_t i = 0; i < config.m_max; ++i) m_list[i] = i + 1;
  const StabilityVariant variant{StabilitySide::out_of_sample, StabilityPerturbation::add_remove};

  std::map<std::string, AlgorithmPtr> algorithms;
  for (const auto& tag : config.algorithms) {
    if (tag == "knn") {
      algorithms[tag] = std::make_shared<KnnAlgorithm>(KnnParams{20});
    } else if (tag == "ridge") {
      algorithms[tag] = std::make_shared<RidgeAlgorithm>(RidgeParams{0.01});
    } else if (tag == "tree") {
      algorithms[tag] = std::make_shared<TreeAlgorithm>(TreeParams{8, 1});
    } else if (tag == "subbag_tree") {
      SubbagParams params;
      params.base = std::make_shared<TreeAlgorithm>(TreeParams{8, 1});
      params.bag_size = config.n / 2;
      params.bag_count = 50;
      params.bag_seed = config.seed;
      algorithms[tag] = std::make_shared<SubbagAlgorithm>(std::move(params));
    } else {
      throw std::invalid_argument("figure1: unknown algorithm tag '" + tag + "'");
    }
  }

  std::map<std::string, std::vector<StabilityCsvRow>> out;
  for (const auto& [tag, alg] : algorithms) {
    out[tag] = stability_rows(*alg, dist, variant, config.n, m_list, config.trials, config.seed,
                              config.workers);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string format_g17(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void write_stability_csv(const std::string& path, const std::vector<StabilityCsvRow>& rows) {
  std::ofstream out = open_out(path);
  out << "variant,n,m,trials,beta_hat,stderr,lemma_bound,theory_bound,theory_bound_kind\n";
  for (const auto& r : rows) {
    out << r.variant << ',' << r.n << ',' << r.m << ',' << r.trials << ','
        << format_g17(r.beta_hat) << ',' << format_g17(r.std_error) << ','
        << (r.lemma_bound ? format_g17(*r.lemma_bound) : "") << ','
        << (r.theory_bound ? format_g17(*r.theory_bound) : "") << ',' << r.theory_bound_kind
        << '\n';
  }
}

void write_coverage_csv(const std::string& path, const std::vector<MiscoverageSample>& samples) {
  std::ofstream out = open_out(path);
  out << "trial,alpha_hat\n";
  for (const auto& s : samples) {
    out << s.trial << ',' << format_g17(s.alpha_hat) << '\n';
  }
}

void write_coverage_summary_json(const std::string& path, const CoverageSummary& summary) {
  nlohmann::json j;
  j["mean"] = summary.mean;
  j["q50"] = summary.q50;
  j["q90"] = summary.q90;
  j["q99"] = summary.q99;
  nlohmann::json tails = nlohmann::json::array();
  for (const auto& [threshold, freq] : summary.tail_freqs) {
    tails.push_back({{"threshold", threshold}, {"frequency", freq}});
  }
  j["tail_freqs"] = tails;
  j["bound_threshold"] =
      summary.bound_threshold ? nlohmann::json(*summary.bound_threshold) : nlohmann::json();
  j["bound_failure_prob"] =
      summary.bound_failure_prob ? nlohmann::json(*summary.bound_failure_prob) : nlohmann::json();
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out = open_out(path);
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << '_' << (j + 1) << ',';
  out << "y\n";
  for (const auto& p : data.points()) {
    for (double v : p.x) out << format_g17(v) << ',';
    out << format_g17(p.y) << '\n';
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset file is empty: " + path);
  std::size_t columns = 1 + std::count(line.begin(), line.end(), ',');
  if (columns < 2) throw std::runtime_error("dataset file needs x_1,...,x_d,y columns: " + path);
  Dataset data(columns - 1);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("bad number '" + cell + "' at " + path + ":" +
                                 std::to_string(lineno));
      }
    }
    if (values.size() != columns) {
      throw std::runtime_error("wrong column count at " + path + ":" + std::to_string(lineno));
    }
    const double y = values.back();
    values.pop_back();
    data.add(std::move(values), y);
  }
  return data;
}

}  // namespace stabcp
