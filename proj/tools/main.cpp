// Command-line front end: stability estimation, coverage experiments,
// coverage-bound evaluation, the stability-curve simulation, and one-off
// prediction sets for a dataset on disk.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "stabcp/experiments.hpp"
#include "stabcp/factory.hpp"

namespace {

using namespace stabcp;

nlohmann::json bound_report_json(const BoundReport& r) {
  nlohmann::json j;
  j["threshold"] = r.threshold;
  j["failure_prob"] = r.failure_prob;
  j["vacuous"] = r.vacuous;
  if (r.implied_inflation) j["implied_inflation"] = *r.implied_inflation;
  nlohmann::json inputs;
  inputs["alpha"] = r.inputs.alpha;
  inputs["delta"] = r.inputs.delta;
  inputs["n"] = r.inputs.n;
  inputs["m"] = r.inputs.m;
  if (r.inputs.beta) inputs["beta"] = *r.inputs.beta;
  if (r.inputs.gamma) inputs["gamma"] = *r.inputs.gamma;
  if (r.inputs.b_dens) inputs["b_dens"] = *r.inputs.b_dens;
  if (r.inputs.epsilon) inputs["epsilon"] = *r.inputs.epsilon;
  if (r.inputs.nu) inputs["nu"] = *r.inputs.nu;
  j["inputs"] = inputs;
  return j;
}

Method parse_method(const std::string& text) {
  if (text == "split") return Method::split_conformal;
  if (text == "jplus") return Method::jackknife_plus;
  if (text == "full_cp") return Method::full_conformal;
  throw ConfigError("unknown method '" + text + "' (expected split, jplus or full_cp)");
}

std::vector<std::size_t> parse_m_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    try {
      const long v = std::stol(item);
      if (v < 0) throw ConfigError("m values must be >= 0");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad m value '" + item + "'");
    }
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("--m-list must not be empty");
  return out;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad coordinate '" + item + "'");
    }
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("--x must not be empty");
  return out;
}

// ---------------------------------------------------------------------------

struct StabilityArgs {
  std::string alg = "knn:k=20";
  std::string dist = "sine:d=40";
  std::string variant = "out-add";
  std::size_t n = 100;
  std::string m_list = "1,5,10,25";
  std::size_t trials = 200;
  std::int64_t seed = 1;
  std::string out;
  std::size_t workers = 0;
};

int run_stability(const StabilityArgs& args) {
  const AlgorithmPtr alg = parse_algorithm(args.alg);
  const DistributionPtr dist = parse_distribution(args.dist);
  const StabilityVariant variant = parse_variant(args.variant);
  const auto rows = stability_rows(*alg, *dist, variant, args.n, parse_m_list(args.m_list),
                                   args.trials, args.seed, args.workers);
  if (args.out.empty()) throw ConfigError("--out is required");
  write_stability_csv(args.out, rows);
  std::cout << "wrote " << rows.size() << " rows to " << args.out << "\n";
  return 0;
}

struct CoverageArgs {
  std::string method = "split";
  std::string alg = "ridge:lambda=1";
  std::string dist = "sine:d=5";
  double alpha = 0.2;
  double gamma = 0.0;
  std::size_t n = 100;
  std::size_t n_test = 2000;
  std::size_t trials = 100;
  std::int64_t seed = 1;
  std::string out;
  std::string compare_bound;  // "", split, jplus, jplus_uninflated, full_conformal
  double delta = 0.05;
  std::size_t m = 0;
  std::size_t stability_trials = 500;
  std::vector<double> tail_thresholds;
  std::size_t grid_count = 1001;
  std::size_t workers = 0;
};

int run_coverage(const CoverageArgs& args) {
  CoverageConfig config;
  config.method = parse_method(args.method);
  config.alg = parse_algorithm(args.alg);
  config.dist = parse_distribution(args.dist);
  config.alpha = args.alpha;
  config.gamma = args.gamma;
  config.n = args.n;
  config.n_test = args.n_test;
  config.trials = args.trials;
  config.seed = args.seed;
  config.grid_count = args.grid_count;
  config.workers = args.workers;

  std::optional<BoundReport> bound;
  if (!args.compare_bound.empty()) {
    const Theorem theorem = parse_theorem(args.compare_bound);
    if (theorem == Theorem::split) {
      const std::size_t n1 = config.n - config.n / 2;
      bound = bound_split_conformal(config.alpha, args.delta, n1);
    } else {
      if (args.m < 1) throw ConfigError("--compare-bound needs --m >= 1");
      // The theorems take the stability level at shifted indices:
      // beta^out_{m, n-1} for jackknife+, beta^in_{m-1, n+1} for full
      // conformal. The estimator runs on a dedicated stream next to the
      // coverage trials.
      BoundInputs inputs;
      inputs.alpha = config.alpha;
      inputs.delta = args.delta;
      inputs.n = config.n;
      inputs.m = args.m;
      inputs.gamma = config.gamma;
      inputs.b_dens = config.dist->bound_density();
      const std::int64_t stability_seed = mix_seed(config.seed, 0x7374616221ULL);
      if (theorem == Theorem::jplus || theorem == Theorem::jplus_uninflated) {
        const StabilityVariant variant{StabilitySide::out_of_sample,
                                       StabilityPerturbation::add_remove};
        inputs.beta = estimate_stability(*config.alg, *config.dist, variant, config.n - 1, args.m,
                                         args.stability_trials, stability_seed, args.workers)
                          .mean;
      } else if (theorem == Theorem::full_conformal) {
        const StabilityVariant variant{StabilitySide::in_sample, StabilityPerturbation::add_remove};
        inputs.beta = estimate_stability(*config.alg, *config.dist, variant, config.n + 1,
                                         args.m - 1, args.stability_trials, stability_seed,
                                         args.workers)
                          .mean;
      } else {
        throw ConfigError("--compare-bound supports split, jplus, jplus_uninflated, full_conformal");
      }
      bound = evaluate_bound(theorem, inputs);
    }
  }

  const auto samples = miscoverage_distribution(config);
  std::vector<double> thresholds = args.tail_thresholds;
  if (bound) thresholds.push_back(bound->threshold);
  const CoverageSummary summary = summarize_coverage(samples, thresholds, bound);

  if (args.out.empty()) throw ConfigError("--out is required");
  write_coverage_csv(args.out, samples);
  write_coverage_summary_json(args.out + ".summary.json", summary);
  std::cout << "wrote " << samples.size() << " trials to " << args.out << " (mean alpha_hat "
            << format_g17(summary.mean) << ")\n";
  if (bound) {
    std::cout << "bound threshold " << format_g17(bound->threshold) << ", failure prob "
              << format_g17(bound->failure_prob) << (bound->vacuous ? " [vacuous]" : "") << "\n";
  }
  return 0;
}

struct BoundsArgs {
  std::string theorem = "jplus";
  double alpha = 0.1;
  double delta = 0.05;
  std::size_t n = 1;
  std::size_t m = 1;
  double beta = -1.0;
  double gamma = -1.0;
  double b_dens = -1.0;
  double epsilon = -1.0;
  double nu = -1.0;
  std::size_t n1 = 0;
  std::string out;
};

int run_bounds(const BoundsArgs& args) {
  const Theorem theorem = parse_theorem(args.theorem);
  BoundReport report;
  if (theorem == Theorem::split) {
    const std::size_t n1 = args.n1 > 0 ? args.n1 : args.n;
    report = bound_split_conformal(args.alpha, args.delta, n1);
  } else {
    BoundInputs inputs;
    inputs.alpha = args.alpha;
    inputs.delta = args.delta;
    inputs.n = args.n;
    inputs.m = args.m;
    if (args.beta >= 0) inputs.beta = args.beta;
    if (args.gamma >= 0) inputs.gamma = args.gamma;
    if (args.b_dens >= 0) inputs.b_dens = args.b_dens;
    if (args.epsilon >= 0) inputs.epsilon = args.epsilon;
    if (args.nu >= 0) inputs.nu = args.nu;
    try {
      report = evaluate_bound(theorem, inputs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  const std::string text = bound_report_json(report).dump(2) + "\n";
  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + args.out);
    out << text;
  }
  std::cout << text;
  return 0;
}

struct Figure1Args {
  std::size_t n = 500;
  std::size_t d = 40;
  std::size_t trials = 1000;
  std::size_t m_max = 25;
  std::int64_t seed = 1;
  std::string outdir = ".";
  std::vector<std::string> algs;
  std::size_t workers = 0;
};

int run_figure1(const Figure1Args& args) {
  Figure1Config config;
  config.n = args.n;
  config.d = args.d;
  config.trials = args.trials;
  config.m_max = args.m_max;
  config.seed = args.seed;
  config.workers = args.workers;
  if (!args.algs.empty()) config.algorithms = args.algs;
  std::filesystem::create_directories(args.outdir);
  const auto curves = run_figure1(config);
  for (const auto& [tag, rows] : curves) {
    const std::string path = args.outdir + "/figure1_" + tag + ".csv";
    write_stability_csv(path, rows);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

struct PredictArgs {
  std::string train_file;
  std::string method = "jplus";
  std::string alg = "knn:k=20";
  double alpha = 0.1;
  double gamma = 0.0;
  std::string x;
  std::size_t grid_count = 2001;
};

int run_predict(const PredictArgs& args) {
  const Dataset data = read_dataset_csv(args.train_file);
  const AlgorithmPtr alg = parse_algorithm(args.alg);
  const Method method = parse_method(args.method);
  const std::vector<double> x = parse_vector(args.x);
  if (x.size() != data.dim()) {
    throw ConfigError("--x has dimension " + std::to_string(x.size()) + " but data has " +
                      std::to_string(data.dim()));
  }
  std::size_t grid_count = args.grid_count;
  const PredictionRule rule = build_rule(method, *alg, data, args.alpha, args.gamma, grid_count);
  const PredictionSet set = rule(x);

  nlohmann::json j;
  j["method"] = method_name(set.method());
  j["alpha"] = set.alpha();
  j["gamma"] = set.gamma();
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : set.intervals()) {
    nlohmann::json pair = nlohmann::json::array();
    pair.push_back(iv.lo().is_neg_inf() ? nlohmann::json("-inf") : nlohmann::json(iv.lo().value()));
    pair.push_back(iv.hi().is_pos_inf() ? nlohmann::json("inf") : nlohmann::json(iv.hi().value()));
    intervals.push_back(pair);
  }
  j["intervals"] = intervals;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distribution-free prediction intervals and algorithmic stability toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a TOML file (flags override file values)");

  StabilityArgs stability_args;
  auto* stability_cmd = app.add_subcommand("stability", "Monte Carlo m-stability estimates");
  stability_cmd->add_option("--alg", stability_args.alg, "algorithm spec, e.g. knn:k=20");
  stability_cmd->add_option("--dist", stability_args.dist, "distribution spec, e.g. sine:d=40");
  stability_cmd->add_option("--variant", stability_args.variant,
                            "out-add, in-add, out-swap or in-swap");
  stability_cmd->add_option("--n", stability_args.n, "training size");
  stability_cmd->add_option("--m-list", stability_args.m_list, "comma-separated m values");
  stability_cmd->add_option("--trials", stability_args.trials, "Monte Carlo trials");
  stability_cmd->add_option("--seed", stability_args.seed, "root seed");
  stability_cmd->add_option("--out", stability_args.out, "output CSV path")->required();
  stability_cmd->add_option("--workers", stability_args.workers, "worker threads (0 = auto)");

  CoverageArgs coverage_args;
  auto* coverage_cmd = app.add_subcommand("coverage", "training-conditional miscoverage experiment");
  coverage_cmd->add_option("--method", coverage_args.method, "split, jplus or full_cp");
  coverage_cmd->add_option("--alg", coverage_args.alg, "algorithm spec");
  coverage_cmd->add_option("--dist", coverage_args.dist, "distribution spec");
  coverage_cmd->add_option("--alpha", coverage_args.alpha, "target miscoverage level");
  coverage_cmd->add_option("--gamma", coverage_args.gamma, "inflation (jplus/full_cp)");
  coverage_cmd->add_option("--n", coverage_args.n, "training size per trial");
  coverage_cmd->add_option("--n-test", coverage_args.n_test, "test points per trial");
  coverage_cmd->add_option("--trials", coverage_args.trials, "training-set draws");
  coverage_cmd->add_option("--seed", coverage_args.seed, "root seed");
  coverage_cmd->add_option("--out", coverage_args.out, "output CSV path")->required();
  coverage_cmd->add_option("--compare-bound", coverage_args.compare_bound,
                           "evaluate a coverage bound alongside: split, jplus, jplus_uninflated "
                           "or full_conformal");
  coverage_cmd->add_option("--delta", coverage_args.delta, "bound failure parameter");
  coverage_cmd->add_option("--m", coverage_args.m, "stability perturbation size for the bound");
  coverage_cmd->add_option("--stability-trials", coverage_args.stability_trials,
                           "trials for the bound's stability estimate");
  coverage_cmd->add_option("--tail-threshold", coverage_args.tail_thresholds,
                           "extra thresholds for the summary tail frequencies");
  coverage_cmd->add_option("--grid-count", coverage_args.grid_count,
                           "grid resolution for full_cp");
  coverage_cmd->add_option("--workers", coverage_args.workers, "worker threads (0 = auto)");

  BoundsArgs bounds_args;
  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate a coverage bound");
  bounds_cmd->add_option("--theorem", bounds_args.theorem,
                         "split, jplus, jplus_uninflated, full_conformal, alt_jplus, "
                         "alt_jplus_uninflated or alt_full_conformal");
  bounds_cmd->add_option("--alpha", bounds_args.alpha, "target miscoverage level");
  bounds_cmd->add_option("--delta", bounds_args.delta, "failure parameter");
  bounds_cmd->add_option("--n", bounds_args.n, "training size");
  bounds_cmd->add_option("--m", bounds_args.m, "stability perturbation size");
  bounds_cmd->add_option("--beta", bounds_args.beta, "stability level");
  bounds_cmd->add_option("--gamma", bounds_args.gamma, "inflation");
  bounds_cmd->add_option("--b-dens", bounds_args.b_dens, "conditional density bound");
  bounds_cmd->add_option("--epsilon", bounds_args.epsilon, "tail stability epsilon");
  bounds_cmd->add_option("--nu", bounds_args.nu, "tail stability nu");
  bounds_cmd->add_option("--n1", bounds_args.n1, "calibration size (split)");
  bounds_cmd->add_option("--out", bounds_args.out, "also write the JSON report here");

  Figure1Args figure1_args;
  auto* figure1_cmd = app.add_subcommand("figure1", "stability-curve simulation");
  figure1_cmd->add_option("--n", figure1_args.n, "training size");
  figure1_cmd->add_option("--d", figure1_args.d, "feature dimension");
  figure1_cmd->add_option("--trials", figure1_args.trials, "Monte Carlo trials");
  figure1_cmd->add_option("--m-max", figure1_args.m_max, "largest perturbation size");
  figure1_cmd->add_option("--seed", figure1_args.seed, "root seed");
  figure1_cmd->add_option("--outdir", figure1_args.outdir, "output directory")->required();
  figure1_cmd->add_option("--algs", figure1_args.algs,
                          "subset of knn, ridge, tree, subbag_tree (default: all)");
  figure1_cmd->add_option("--workers", figure1_args.workers, "worker threads (0 = auto)");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "prediction set for one query point");
  predict_cmd->add_option("--train-file", predict_args.train_file, "CSV with header x_1,...,x_d,y")
      ->required();
  predict_cmd->add_option("--method", predict_args.method, "split, jplus or full_cp");
  predict_cmd->add_option("--alg", predict_args.alg, "algorithm spec");
  predict_cmd->add_option("--alpha", predict_args.alpha, "target miscoverage level");
  predict_cmd->add_option("--gamma", predict_args.gamma, "inflation (jplus/full_cp)");
  predict_cmd->add_option("--x", predict_args.x, "query point, comma-separated")->required();
  predict_cmd->add_option("--grid-count", predict_args.grid_count, "grid resolution for full_cp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (stability_cmd->parsed()) return run_stability(stability_args);
    if (coverage_cmd->parsed()) return run_coverage(coverage_args);
    if (bounds_cmd->parsed()) return run_bounds(bounds_args);
    if (figure1_cmd->parsed()) return run_figure1(figure1_args);
    if (predict_cmd->parsed()) return run_predict(predict_args);
  } catch (const stabcp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
