// Python bindings for the main operations: fitting, the three prediction-set
// constructions, stability estimation, and the coverage-bound evaluators.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stabcp/experiments.hpp"
#include "stabcp/factory.hpp"
#include "stabcp/regressors.hpp"

namespace py = pybind11;
using namespace stabcp;

namespace {

// pybind11 holders must be non-const shared_ptr; the library hands out
// shared_ptr<const T>, so the boundary casts const away. Python only ever
// calls const members.
using PyAlgorithm = std::shared_ptr<RegressionAlgorithm>;
using PyPredictor = std::shared_ptr<Predictor>;
using PyDistribution = std::shared_ptr<Distribution>;

PyAlgorithm unconst(AlgorithmPtr p) { return std::const_pointer_cast<RegressionAlgorithm>(std::move(p)); }
PyPredictor unconst(PredictorPtr p) { return std::const_pointer_cast<Predictor>(std::move(p)); }
PyDistribution unconst(DistributionPtr p) { return std::const_pointer_cast<Distribution>(std::move(p)); }

Dataset make_dataset(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  if (X.size() != y.size()) throw std::invalid_argument("X and y must have the same length");
  Dataset out;
  for (std::size_t i = 0; i < X.size(); ++i) out.add(X[i], y[i]);
  return out;
}

std::vector<std::pair<double, double>> interval_pairs(const PredictionSet& set) {
  std::vector<std::pair<double, double>> out;
  out.reserve(set.intervals().size());
  for (const auto& iv : set.intervals()) {
    out.emplace_back(iv.lo().as_double(), iv.hi().as_double());
  }
  return out;
}

py::dict stability_dict(const StabilityEstimate& e) {
  py::dict d;
  d["variant"] = variant_name(e.variant);
  d["m"] = e.m;
  d["n"] = e.n;
  d["trials"] = e.trials;
  d["mean"] = e.mean;
  d["std_error"] = e.std_error;
  return d;
}

py::dict bound_dict(const BoundReport& r) {
  py::dict d;
  d["threshold"] = r.threshold;
  d["failure_prob"] = r.failure_prob;
  d["vacuous"] = r.vacuous;
  if (r.implied_inflation) d["implied_inflation"] = *r.implied_inflation;
  return d;
}

std::pair<std::vector<std::vector<double>>, std::vector<double>> dataset_pair(const Dataset& data) {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  X.reserve(data.size());
  y.reserve(data.size());
  for (const auto& p : data.points()) {
    X.push_back(p.x);
    y.push_back(p.y);
  }
  return {std::move(X), std::move(y)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "distribution-free prediction intervals and algorithmic stability";

  py::class_<RegressionAlgorithm, PyAlgorithm>(m, "Algorithm")
      .def("name", &RegressionAlgorithm::name)
      .def("__repr__", [](const RegressionAlgorithm& a) { return "<Algorithm " + a.name() + ">"; });

  py::class_<Predictor, PyPredictor>(m, "Predictor")
      .def("predict",
           [](const Predictor& p, const std::vector<double>& x) { return p.predict(x); })
      .def("train_size", &Predictor::train_size)
      .def("algorithm", &Predictor::algorithm);

  py::class_<Distribution, PyDistribution>(m, "Distribution")
      .def("name", &Distribution::name)
      .def("dim", &Distribution::dim)
      .def("bound_y", &Distribution::bound_y)
      .def("bound_x", &Distribution::bound_x)
      .def("bound_density", &Distribution::bound_density)
      .def("sample",
           [](const Distribution& dist, std::size_t count, std::int64_t seed,
              std::uint64_t stream) {
             RngStream rng = derive_stream(seed, stream);
             return dataset_pair(dist.sample(count, rng));
           },
           py::arg("count"), py::arg("seed"), py::arg("stream") = 0);

  m.def("knn", [](std::size_t k) -> PyAlgorithm { return std::make_shared<KnnAlgorithm>(KnnParams{k}); },
        py::arg("k"));
  m.def("ridge",
        [](double lam) -> PyAlgorithm { return std::make_shared<RidgeAlgorithm>(RidgeParams{lam}); },
        py::arg("lam"));
  m.def("tree",
        [](std::size_t max_depth, std::size_t min_leaf) -> PyAlgorithm {
          return std::make_shared<TreeAlgorithm>(TreeParams{max_depth, min_leaf});
        },
        py::arg("max_depth") = 8, py::arg("min_leaf") = 1);
  m.def("subbag",
        [](PyAlgorithm base, std::size_t bag_size, std::size_t bag_count,
           std::int64_t bag_seed) -> PyAlgorithm {
          SubbagParams params;
          params.base = std::move(base);
          params.bag_size = bag_size;
          params.bag_count = bag_count;
          params.bag_seed = bag_seed;
          return std::make_shared<SubbagAlgorithm>(std::move(params));
        },
        py::arg("base"), py::arg("bag_size"), py::arg("bag_count"), py::arg("bag_seed") = 0);
  m.def("constant",
        [](double value) -> PyAlgorithm { return std::make_shared<ConstantAlgorithm>(value); },
        py::arg("value") = 0.0);
  m.def("mean", []() -> PyAlgorithm { return std::make_shared<MeanAlgorithm>(); });
  m.def("clipped",
        [](PyAlgorithm base, double lo, double hi) -> PyAlgorithm {
          return std::make_shared<ClippedAlgorithm>(std::move(base), lo, hi);
        },
        py::arg("base"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  m.def("algorithm", [](const std::string& spec) { return unconst(parse_algorithm(spec)); }, py::arg("spec"),
        "Algorithm from a CLI-style spec string, e.g. 'knn:k=20'.");

  m.def("sine_mixture",
        [](std::size_t d) -> PyDistribution { return std::make_shared<SineMixtureDistribution>(d); },
        py::arg("d"));
  m.def("linear_gaussian",
        [](std::size_t d, double noise_sd, std::int64_t weight_seed) -> PyDistribution {
          return std::make_shared<LinearGaussianDistribution>(d, noise_sd, weight_seed);
        },
        py::arg("d"), py::arg("noise_sd"), py::arg("weight_seed") = 0);
  m.def("bounded_uniform",
        [](std::size_t d) -> PyDistribution { return std::make_shared<BoundedUniformDistribution>(d); },
        py::arg("d"));
  m.def("distribution", [](const std::string& spec) { return unconst(parse_distribution(spec)); }, py::arg("spec"),
        "Distribution from a CLI-style spec string, e.g. 'sine:d=40'.");

  m.def("conformal_quantile",
        [](const std::vector<double>& values, double tau) {
          return conformal_quantile(values, tau).as_double();
        },
        py::arg("values"), py::arg("tau"),
        "ceil(tau*n)-th smallest value; +inf when the index overflows.");

  m.def("fit",
        [](const PyAlgorithm& alg, const std::vector<std::vector<double>>& X,
           const std::vector<double>& y) { return unconst(alg->fit(make_dataset(X, y))); },
        py::arg("alg"), py::arg("X"), py::arg("y"));

  m.def("split_conformal",
        [](const PyAlgorithm& alg, const std::vector<std::vector<double>>& X_train,
           const std::vector<double>& y_train, const std::vector<std::vector<double>>& X_calib,
           const std::vector<double>& y_calib, double alpha, const std::vector<double>& x) {
          return interval_pairs(split_conformal(make_dataset(X_train, y_train),
                                                make_dataset(X_calib, y_calib), *alg, alpha, x));
        },
        py::arg("alg"), py::arg("X_train"), py::arg("y_train"), py::arg("X_calib"),
        py::arg("y_calib"), py::arg("alpha"), py::arg("x"));

  m.def("jackknife_plus",
        [](const PyAlgorithm& alg, const std::vector<std::vector<double>>& X,
           const std::vector<double>& y, double alpha, double gamma, const std::vector<double>& x) {
          return interval_pairs(jackknife_plus(make_dataset(X, y), *alg, alpha, gamma, x));
        },
        py::arg("alg"), py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("gamma"),
        py::arg("x"));

  m.def("full_conformal",
        [](const PyAlgorithm& alg, const std::vector<std::vector<double>>& X,
           const std::vector<double>& y, double alpha, double gamma, const std::vector<double>& x,
           std::optional<double> grid_lo, std::optional<double> grid_hi, std::size_t grid_count) {
          const Dataset data = make_dataset(X, y);
          GridSpec grid;
          if (grid_lo && grid_hi) {
            grid = GridSpec{*grid_lo, *grid_hi, grid_count};
          } else {
            grid = default_grid(data, grid_count);
          }
          return interval_pairs(full_conformal(data, *alg, alpha, gamma, x, grid));
        },
        py::arg("alg"), py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("gamma"),
        py::arg("x"), py::arg("grid_lo") = std::nullopt, py::arg("grid_hi") = std::nullopt,
        py::arg("grid_count") = 2001);

  m.def("estimate_stability",
        [](const PyAlgorithm& alg, const PyDistribution& dist, const std::string& variant,
           std::size_t n, std::size_t m, std::size_t trials, std::int64_t seed,
           std::size_t workers) {
          return stability_dict(estimate_stability(*alg, *dist, parse_variant(variant), n, m,
                                                   trials, seed, workers));
        },
        py::arg("alg"), py::arg("dist"), py::arg("variant"), py::arg("n"), py::arg("m"),
        py::arg("trials"), py::arg("seed"), py::arg("workers") = 0);

  m.def("stability_curve",
        [](const PyAlgorithm& alg, const PyDistribution& dist, const std::string& variant,
           std::size_t n, const std::vector<std::size_t>& m_list, std::size_t trials,
           std::int64_t seed, std::size_t workers) {
          py::list out;
          for (const auto& point :
               stability_curve(*alg, *dist, parse_variant(variant), n, m_list, trials, seed,
                               workers)) {
            py::dict d = stability_dict(point.estimate);
            if (point.lemma_bound) {
              d["lemma_bound"] = *point.lemma_bound;
              d["lemma_std_error"] = *point.lemma_std_error;
            }
            out.append(d);
          }
          return out;
        },
        py::arg("alg"), py::arg("dist"), py::arg("variant"), py::arg("n"), py::arg("m_list"),
        py::arg("trials"), py::arg("seed"), py::arg("workers") = 0);

  m.def("estimate_tail_stability",
        [](const PyAlgorithm& alg, const PyDistribution& dist, std::size_t n, std::size_t m,
           double epsilon, std::size_t trials, std::int64_t seed, std::size_t workers) {
          const TailStabilityEstimate e =
              estimate_tail_stability(*alg, *dist, n, m, epsilon, trials, seed, workers);
          py::dict d;
          d["m"] = e.m;
          d["n"] = e.n;
          d["epsilon"] = e.epsilon;
          d["nu_hat"] = e.nu_hat;
          d["trials"] = e.trials;
          return d;
        },
        py::arg("alg"), py::arg("dist"), py::arg("n"), py::arg("m"), py::arg("epsilon"),
        py::arg("trials"), py::arg("seed"), py::arg("workers") = 0);

  m.def("knn_stability_bound", &knn_stability_bound, py::arg("bound_y"), py::arg("m"),
        py::arg("n"));
  m.def("ridge_stability_bound", &ridge_stability_bound, py::arg("bound_x"), py::arg("bound_y"),
        py::arg("lam"), py::arg("m"), py::arg("n"));
  m.def("bagging_stability_bound", &bagging_stability_bound, py::arg("n"), py::arg("bag_size"),
        py::arg("m"), py::arg("bag_count"));

  m.def("bound_split_conformal",
        [](double alpha, double delta, std::size_t n1) {
          return bound_dict(bound_split_conformal(alpha, delta, n1));
        },
        py::arg("alpha"), py::arg("delta"), py::arg("n1"));

  m.def("evaluate_bound",
        [](const std::string& theorem, double alpha, double delta, std::size_t n, std::size_t m,
           std::optional<double> beta, std::optional<double> gamma, std::optional<double> b_dens,
           std::optional<double> epsilon, std::optional<double> nu) {
          BoundInputs in;
          in.alpha = alpha;
          in.delta = delta;
          in.n = n;
          in.m = m;
          in.beta = beta;
          in.gamma = gamma;
          in.b_dens = b_dens;
          in.epsilon = epsilon;
          in.nu = nu;
          return bound_dict(evaluate_bound(parse_theorem(theorem), in));
        },
        py::arg("theorem"), py::arg("alpha"), py::arg("delta"), py::arg("n"), py::arg("m"),
        py::arg("beta") = std::nullopt, py::arg("gamma") = std::nullopt,
        py::arg("b_dens") = std::nullopt, py::arg("epsilon") = std::nullopt,
        py::arg("nu") = std::nullopt);

  m.def("miscoverage_distribution",
        [](const std::string& method, const PyAlgorithm& alg, const PyDistribution& dist,
           double alpha, double gamma, std::size_t n, std::size_t n_test, std::size_t trials,
           std::int64_t seed, std::size_t grid_count, std::size_t workers) {
          CoverageConfig config;
          if (method == "split") config.method = Method::split_conformal;
          else if (method == "jplus") config.method = Method::jackknife_plus;
          else if (method == "full_cp") config.method = Method::full_conformal;
          else throw std::invalid_argument("method must be split, jplus or full_cp");
          config.alg = alg;
          config.dist = dist;
          config.alpha = alpha;
          config.gamma = gamma;
          config.n = n;
          config.n_test = n_test;
          config.trials = trials;
          config.seed = seed;
          config.grid_count = grid_count;
          config.workers = workers;
          std::vector<double> out;
          for (const auto& s : miscoverage_distribution(config)) out.push_back(s.alpha_hat);
          return out;
        },
        py::arg("method"), py::arg("alg"), py::arg("dist"), py::arg("alpha"), py::arg("gamma"),
        py::arg("n"), py::arg("n_test"), py::arg("trials"), py::arg("seed"),
        py::arg("grid_count") = 1001, py::arg("workers") = 0);

  m.def("derive_stream_probe",
        [](std::int64_t seed, std::uint64_t stream, std::size_t count) {
          RngStream rng = derive_stream(seed, stream);
          std::vector<double> out(count);
          for (auto& v : out) v = rng.next_unit();
          return out;
        },
        py::arg("seed"), py::arg("stream"), py::arg("count") = 8,
        "First uniform draws of a derived stream; handy for reproducibility checks.");
}
