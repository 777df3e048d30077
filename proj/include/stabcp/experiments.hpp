#ifndef STABCP_EXPERIMENTS_HPP
#define STABCP_EXPERIMENTS_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stabcp/conformal.hpp"
#include "stabcp/distributions.hpp"
#include "stabcp/guarantees.hpp"
#include "stabcp/stability.hpp"

// The experiment harness: training-conditional miscoverage estimation, the
// stability-curve simulation, and the deterministic file formats the CLI
// emits. Identical config + seed produces byte-identical files at any worker
// count; floats are printed with 17 significant digits so CSV round-trips
// are bit-stable.

namespace stabcp {

// Estimated conditional miscoverage alpha_hat for one training-set draw:
// the fraction of n_test fresh points not covered by the fitted rule.
struct MiscoverageSample {
  std::size_t trial = 0;
  double alpha_hat = 0.0;
  Method method = Method::split_conformal;
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t n_test = 0;
};

// A trained prediction rule: query point -> prediction set.
using PredictionRule = std::function<PredictionSet(const std::vector<double>& x)>;

// Builds the rule once from a realized training set. For split conformal the
// first floor(n/2) points are the proper training set and the rest are
// calibration; gamma must be 0 (split has no inflated form here). For full
// conformal every query evaluates the response grid, which makes it the
// expensive path; `grid_count` controls its resolution.
PredictionRule build_rule(Method method, const RegressionAlgorithm& alg, const Dataset& data,
                          double alpha, double gamma, std::size_t grid_count = 1001);

// Fraction of n_test fresh draws from `dist` whose response the rule fails
// to cover.
double miscoverage_of_rule(const PredictionRule& rule, const Distribution& dist,
                           std::size_t n_test, RngStream& rng);

// Draws D_n, builds the rule, then estimates its conditional miscoverage on
// n_test fresh points from the same stream.
MiscoverageSample estimate_miscoverage(Method method, const RegressionAlgorithm& alg,
                                       const Distribution& dist, double alpha, double gamma,
                                       std::size_t n, std::size_t n_test, RngStream& rng,
                                       std::size_t grid_count = 1001);

struct CoverageConfig {
  Method method = Method::split_conformal;
  AlgorithmPtr alg;
  DistributionPtr dist;
  double alpha = 0.2;
  double gamma = 0.0;
  std::size_t n = 100;
  std::size_t n_test = 2000;
  std::size_t trials = 100;
  std::int64_t seed = 1;
  std::size_t grid_count = 1001;
  std::size_t workers = 0;
};

// One MiscoverageSample per trial, trial t seeded by derive_stream(seed, t),
// output ordered by trial index.
std::vector<MiscoverageSample> miscoverage_distribution(const CoverageConfig& config);

struct CoverageSummary {
  double mean = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  // threshold -> empirical P{alpha_hat > threshold}
  std::vector<std::pair<double, double>> tail_freqs;
  std::optional<double> bound_threshold;
  std::optional<double> bound_failure_prob;
};

CoverageSummary summarize_coverage(const std::vector<MiscoverageSample>& samples,
                                   const std::vector<double>& tail_thresholds,
                                   const std::optional<BoundReport>& bound = std::nullopt);

// Empirical P{alpha_hat >= threshold}; the quantity the coverage theorems
// bound by their failure probability.
double tail_frequency_at_least(const std::vector<MiscoverageSample>& samples, double threshold);

// ---------------------------------------------------------------------------
// Stability-curve simulation (the Figure-1 style experiment)
// ---------------------------------------------------------------------------

struct StabilityCsvRow {
  std::string variant;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double beta_hat = 0.0;
  double std_error = 0.0;
  std::optional<double> lemma_bound;
  std::optional<double> theory_bound;
  std::string theory_bound_kind = "none";
};

// Closed-form bound for this algorithm on this distribution, when the
// relevant proposition applies (declared bounds present, and for subbagging
// a base learner with outputs in [0,1]); otherwise kind "none".
std::optional<std::pair<double, std::string>> theory_bound_for(const RegressionAlgorithm& alg,
                                                               const Distribution& dist,
                                                               std::size_t m, std::size_t n);

std::vector<StabilityCsvRow> stability_rows(const RegressionAlgorithm& alg,
                                            const Distribution& dist, StabilityVariant variant,
                                            std::size_t n, const std::vector<std::size_t>& m_list,
                                            std::size_t trials, std::int64_t seed,
                                            std::size_t workers = 0);

struct Figure1Config {
  std::size_t n = 500;
  std::size_t d = 40;
  std::size_t trials = 1000;
  std::size_t m_max = 25;
  std::int64_t seed = 1;
  std::vector<std::string> algorithms = {"knn", "ridge", "tree", "subbag_tree"};
  std::size_t workers = 0;
};

// Out-of-sample add-remove stability curves for the simulation's four
// algorithms (knn k=20, ridge lambda=0.01, tree depth 8, subbagged trees)
// on the sine mixture in dimension d, with the one-step lemma bound
// alongside. Keyed by algorithm tag.
std::map<std::string, std::vector<StabilityCsvRow>> run_figure1(const Figure1Config& config);

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

// Shortest-width formatting with 17 significant digits ("%.17g").
std::string format_g17(double v);

void write_stability_csv(const std::string& path, const std::vector<StabilityCsvRow>& rows);

void write_coverage_csv(const std::string& path, const std::vector<MiscoverageSample>& samples);

// {mean, q50, q90, q99, tail_freqs, bound_threshold, bound_failure_prob};
// unset bound fields serialize as null.
void write_coverage_summary_json(const std::string& path, const CoverageSummary& summary);

// Dataset CSV with header x_1,...,x_d,y.
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

}  // namespace stabcp

#endif  // STABCP_EXPERIMENTS_HPP
