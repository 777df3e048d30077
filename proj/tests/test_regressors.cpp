#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stabcp/distributions.hpp"
#include "stabcp/regressors.hpp"

using namespace stabcp;

namespace {

Dataset d1(std::initializer_list<std::pair<double, double>> pairs) {
  Dataset out(1);
  for (const auto& [x, y] : pairs) out.add({x}, y);
  return out;
}

Dataset shuffled(const Dataset& data, RngStream& rng) {
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  Dataset out(data.dim());
  for (std::size_t i : idx) out.add(data[i].x, data[i].y);
  return out;
}

// Exhaustive SSE over all axis-aligned single splits; the oracle for the
// depth-1 tree examples.
std::pair<std::size_t, double> best_single_split_oracle(const Dataset& data) {
  double best_sse = std::numeric_limits<double>::infinity();
  std::size_t best_feature = 0;
  double best_threshold = 0.0;
  for (std::size_t f = 0; f < data.dim(); ++f) {
    std::vector<double> xs;
    for (const auto& p : data.points()) xs.push_back(p.x[f]);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (xs[i - 1] == xs[i]) continue;
      const double threshold = 0.5 * (xs[i - 1] + xs[i]);
      double suml = 0, sumr = 0, nl = 0, nr = 0;
      for (const auto& p : data.points()) {
        if (p.x[f] <= threshold) {
          suml += p.y;
          nl += 1;
        } else {
          sumr += p.y;
          nr += 1;
        }
      }
      double sse = 0;
      for (const auto& p : data.points()) {
        const double mean = p.x[f] <= threshold ? suml / nl : sumr / nr;
        sse += (p.y - mean) * (p.y - mean);
      }
      if (sse < best_sse) {
        best_sse = sse;
        best_feature = f;
        best_threshold = threshold;
      }
    }
  }
  return {best_feature, best_threshold};
}

}  // namespace

TEST_CASE("knn examples") {
  const Dataset two = d1({{0.0, 1.0}, {1.0, 3.0}});
  CHECK(fit_knn(two, {2})->predict({0.2}) == doctest::Approx(2.0));
  CHECK(fit_knn(two, {1})->predict({0.2}) == doctest::Approx(1.0));

  const Dataset three = d1({{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}});
  // neighbors of 1.6 by exhaustive distance sort: x=2 (0.4) and x=1 (0.6)
  CHECK(fit_knn(three, {2})->predict({1.6}) == doctest::Approx(2.5));

  CHECK_THROWS_WITH_AS(fit_knn(two, {3}), "knn: k exceeds sample size", std::invalid_argument);
}

TEST_CASE("knn distance ties break to the smaller canonical index") {
  // both training points are equidistant from the query; the canonical sort
  // puts x=-1 first, so k=1 must pick its response
  const Dataset data = d1({{1.0, 10.0}, {-1.0, 5.0}});
  CHECK(fit_knn(data, {1})->predict({0.0}) == doctest::Approx(5.0));
}

TEST_CASE("ridge examples") {
  // n=1, d=1: theta = (x^2 + lambda)^{-1} x y
  const Dataset one = d1({{1.0, 2.0}});
  CHECK(fit_ridge(one, {1.0})->predict({3.0}) == doctest::Approx(3.0));
  CHECK(fit_ridge(one, {1e-10})->predict({1.0}) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(fit_ridge(one, {1e9})->predict({1.0})) <= 1.0 / 1e9 * 2.0);
}

TEST_CASE("ridge predictor is linear in x") {
  RngStream rng = derive_stream(5, 0);
  Dataset data(3);
  for (int i = 0; i < 20; ++i) {
    data.add({rng.normal(), rng.normal(), rng.normal()}, rng.normal());
  }
  const auto model = fit_ridge(data, {0.5});
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
    const double a = rng.uniform(-3.0, 3.0);
    const std::vector<double> ax{a * x[0], a * x[1], a * x[2]};
    CHECK(model->predict(ax) == doctest::Approx(a * model->predict(x)).epsilon(1e-9));
  }
}

TEST_CASE("tree examples") {
  // constant response collapses to a single leaf at any depth
  const Dataset flat = d1({{0.0, 3.0}, {0.5, 3.0}, {1.0, 3.0}});
  CHECK(fit_tree(flat, {8, 1})->predict({0.7}) == doctest::Approx(3.0));

  const Dataset pair = d1({{0.0, 0.0}, {1.0, 1.0}});
  const auto stump = fit_tree(pair, {1, 1});
  CHECK(stump->predict({0.0}) == doctest::Approx(0.0));
  CHECK(stump->predict({1.0}) == doctest::Approx(1.0));
  CHECK(best_single_split_oracle(pair).second == doctest::Approx(0.5));

  const Dataset spread = d1({{0.0, 0.0}, {0.4, 0.0}, {1.0, 10.0}});
  const auto isolating = fit_tree(spread, {1, 1});
  CHECK(isolating->predict({1.0}) == doctest::Approx(10.0));
  CHECK(isolating->predict({0.0}) == doctest::Approx(0.0));
  CHECK(best_single_split_oracle(spread).second == doctest::Approx(0.7));

  CHECK_THROWS_AS(TreeAlgorithm({0, 1}), std::invalid_argument);
}

TEST_CASE("tree respects min_leaf") {
  const Dataset data = d1({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 10.0}});
  // min_leaf=2 forbids isolating x=3; the only legal split is 2|2
  const auto model = fit_tree(data, {1, 2});
  CHECK(model->predict({3.0}) == doctest::Approx(6.0));
  CHECK(model->predict({0.0}) == doctest::Approx(0.5));
}

TEST_CASE("subbag examples") {
  SubbagParams zero;
  zero.base = std::make_shared<ConstantAlgorithm>(0.0);
  zero.bag_size = 2;
  zero.bag_count = 5;
  const Dataset data = d1({{0.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}});
  CHECK(fit_subbag(data, zero)->predict({1.0}) == doctest::Approx(0.0));

  SubbagParams single;
  single.base = std::make_shared<MeanAlgorithm>();
  single.bag_size = 2;
  single.bag_count = 1;
  single.bag_seed = 9;
  // B=1: the ensemble equals the base fit on that one bag, whose prediction
  // is the mean of a 2-subset of {1,2,3}
  const double p = fit_subbag(data, single)->predict({0.5});
  CHECK((p == doctest::Approx(1.5) || p == doctest::Approx(2.0) || p == doctest::Approx(2.5)));

  SubbagParams bad = zero;
  bad.bag_size = 3;
  CHECK_THROWS_WITH_AS(fit_subbag(data, bad), "subbag: bag size must be < n",
                       std::invalid_argument);
}

TEST_CASE("subbag empirical average tracks the exact all-subsets average") {
  // n=3, N=2: only C(3,2)=3 possible bags; enumerate them exactly.
  const Dataset data = d1({{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}});
  const std::vector<double> query{1.0};
  const KnnAlgorithm base({1});
  std::vector<double> bag_values;
  for (std::size_t skip = 0; skip < 3; ++skip) {
    bag_values.push_back(base.fit(data.without(skip))->predict(query));
  }
  double exact = 0.0, var = 0.0;
  for (double v : bag_values) exact += v;
  exact /= 3.0;
  for (double v : bag_values) var += (v - exact) * (v - exact);
  var /= 3.0;

  SubbagParams params;
  params.base = std::make_shared<KnnAlgorithm>(KnnParams{1});
  params.bag_size = 2;
  params.bag_count = 200;
  params.bag_seed = 17;
  const double estimate = fit_subbag(data, params)->predict(query);
  CHECK(std::abs(estimate - exact) <= 3.0 * std::sqrt(var / 200.0) + 1e-12);

  // doubling B moves the prediction by O(1/sqrt(B))
  params.bag_count = 400;
  const double estimate2 = fit_subbag(data, params)->predict(query);
  CHECK(std::abs(estimate - estimate2) <= 6.0 * std::sqrt(var / 200.0) + 1e-12);
}

TEST_CASE("all four learners are exactly symmetric under permutation") {
  RngStream rng = derive_stream(99, 0);
  const SineMixtureDistribution dist(3);

  std::vector<AlgorithmPtr> algorithms;
  algorithms.push_back(std::make_shared<KnnAlgorithm>(KnnParams{3}));
  algorithms.push_back(std::make_shared<RidgeAlgorithm>(RidgeParams{0.1}));
  algorithms.push_back(std::make_shared<TreeAlgorithm>(TreeParams{4, 1}));
  SubbagParams bag;
  bag.base = std::make_shared<TreeAlgorithm>(TreeParams{3, 1});
  bag.bag_size = 8;
  bag.bag_count = 7;
  bag.bag_seed = 3;
  algorithms.push_back(std::make_shared<SubbagAlgorithm>(bag));

  for (int rep = 0; rep < 25; ++rep) {
    const Dataset data = dist.sample(16, rng);
    const Dataset permuted = shuffled(data, rng);
    std::vector<std::vector<double>> queries;
    for (int q = 0; q < 10; ++q) queries.push_back(dist.sample_point(rng).x);
    for (const auto& alg : algorithms) {
      const auto a = alg->fit(data);
      const auto b = alg->fit(permuted);
      for (const auto& x : queries) {
        // bitwise identity, not approximate equality
        CHECK(a->predict(x) == b->predict(x));
      }
    }
  }
}

TEST_CASE("knn and tree predictions stay inside the response range") {
  RngStream rng = derive_stream(123, 1);
  const SineMixtureDistribution dist(2);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset data = dist.sample(12, rng);
    double lo = data[0].y, hi = data[0].y;
    for (const auto& p : data.points()) {
      lo = std::min(lo, p.y);
      hi = std::max(hi, p.y);
    }
    const auto knn = fit_knn(data, {3});
    const auto tree = fit_tree(data, {4, 1});
    for (int q = 0; q < 10; ++q) {
      const auto x = dist.sample_point(rng).x;
      for (double value : {knn->predict(x), tree->predict(x)}) {
        CHECK(value >= lo - 1e-12);
        CHECK(value <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("clipped learner clamps into range") {
  const Dataset data = d1({{0.0, -3.0}, {1.0, 5.0}});
  const ClippedAlgorithm clipped(std::make_shared<KnnAlgorithm>(KnnParams{1}), 0.0, 1.0);
  const auto model = clipped.fit(data);
  CHECK(model->predict({0.0}) == doctest::Approx(0.0));
  CHECK(model->predict({1.0}) == doctest::Approx(1.0));
}

TEST_CASE("mean algorithm matches hand computation") {
  const Dataset data = d1({{0.0, 2.0}, {1.0, 4.0}});
  CHECK(MeanAlgorithm().fit(data)->predict({9.0}) == doctest::Approx(3.0));
}
