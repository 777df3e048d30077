#ifndef STABCP_REGRESSORS_HPP
#define STABCP_REGRESSORS_HPP

#include <cstdint>
#include <memory>

#include "stabcp/core.hpp"

// The base learners used by the simulation harness and the stability
// estimators: k-nearest neighbors, ridge regression, a CART-style regression
// tree grown by variance reduction, and a subbagging ensemble wrapper.
//
// Every learner first puts its training data into canonical (lexicographic)
// order and breaks all internal ties by canonical index. Nominally
// order-sensitive steps therefore produce bitwise-identical predictors under
// any permutation of the training set, which is the symmetry requirement all
// downstream theory relies on.

namespace stabcp {

struct KnnParams {
  std::size_t k = 1;  // 1 <= k <= training size at fit time
};

struct RidgeParams {
  double lambda = 1.0;  // > 0; penalty on the 1/n-scaled least-squares objective
};

struct TreeParams {
  std::size_t max_depth = 8;  // >= 1
  std::size_t min_leaf = 1;   // >= 1, minimum samples per leaf
};

class KnnAlgorithm final : public RegressionAlgorithm {
 public:
  explicit KnnAlgorithm(KnnParams params);
  PredictorPtr fit(const Dataset& train) const override;
  std::string name() const override;
  const KnnParams& params() const { return params_; }

 private:
  KnnParams params_;
};

class RidgeAlgorithm final : public RegressionAlgorithm {
 public:
  explicit RidgeAlgorithm(RidgeParams params);
  PredictorPtr fit(const Dataset& train) const override;
  std::string name() const override;
  const RidgeParams& params() const { return params_; }

 private:
  RidgeParams params_;
};

class TreeAlgorithm final : public RegressionAlgorithm {
 public:
  explicit TreeAlgorithm(TreeParams params);
  PredictorPtr fit(const Dataset& train) const override;
  std::string name() const override;
  const TreeParams& params() const { return params_; }

 private:
  TreeParams params_;
};

struct SubbagParams {
  AlgorithmPtr base;             // learner fitted on each bag
  std::size_t bag_size = 1;      // N, 1 <= N < training size at fit time
  std::size_t bag_count = 1;     // B >= 1
  std::int64_t bag_seed = 0;
};

// Averages `bag_count` base fits over bags of size `bag_size` drawn without
// replacement. Bags are sampled from a stream keyed on (bag_seed, dataset
// digest), so the same multiset of training points always produces the same
// bags regardless of input order.
class SubbagAlgorithm final : public RegressionAlgorithm {
 public:
  explicit SubbagAlgorithm(SubbagParams params);
  PredictorPtr fit(const Dataset& train) const override;
  std::string name() const override;
  const SubbagParams& params() const { return params_; }

 private:
  SubbagParams params_;
};

// Ignores the data and always predicts `value`. Degenerate but load-bearing:
// it is the exact-zero-stability reference in many tests.
class ConstantAlgorithm final : public RegressionAlgorithm {
 public:
  explicit ConstantAlgorithm(double value = 0.0) : value_(value) {}
  PredictorPtr fit(const Dataset& train) const override;
  std::string name() const override;

 private:
  double value_;
};

// Predicts the mean response of the training sample everywhere.
class MeanAlgorithm final : public RegressionAlgorithm {
 public:
  PredictorPtr fit(const Dataset& train) const override;
  std::string name() const override;
};

// Clamps another learner's predictions into [lo, hi]; used where theory
// assumes outputs in a bounded range (e.g. the subbagging bound).
class ClippedAlgorithm final : public RegressionAlgorithm {
 public:
  ClippedAlgorithm(AlgorithmPtr base, double lo, double hi);
  PredictorPtr fit(const Dataset& train) const override;
  std::string name() const override;

 private:
  AlgorithmPtr base_;
  double lo_, hi_;
};

PredictorPtr fit_knn(const Dataset& train, const KnnParams& params);
PredictorPtr fit_ridge(const Dataset& train, const RidgeParams& params);
PredictorPtr fit_tree(const Dataset& train, const TreeParams& params);
PredictorPtr fit_subbag(const Dataset& train, const SubbagParams& params);

}  // namespace stabcp

#endif  // STABCP_REGRESSORS_HPP
