#include "stabcp/regressors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stabcp {

namespace {

// Training data in canonical order; shared by the fitted predictors.
struct CanonicalData {
  std::vector<DataPoint> points;
  std::size_t dim;

  explicit CanonicalData(const Dataset& train) : dim(train.dim()) {
    const auto order = train.canonical_order();
    points.reserve(order.size());
    for (std::size_t i : order) points.push_back(train[i]);
  }
};

double squared_distance(std::span<const double> a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

void check_query_dim(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) throw std::invalid_argument("predict: query dimension mismatch");
}

class KnnPredictor final : public Predictor {
 public:
  KnnPredictor(std::shared_ptr<const CanonicalData> data, std::size_t k, std::string name)
      : Predictor(data->points.size(), std::move(name)), data_(std::move(data)), k_(k) {}

  double predict(std::span<const double> x) const override {
    check_query_dim(x, data_->dim);
    const auto& pts = data_->points;
    std::vector<std::pair<double, std::size_t>> dist(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      dist[i] = {squared_distance(x, pts[i].x), i};
    }
    // Ties in distance resolve to the smaller canonical index.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) sum += pts[dist[i].second].y;
    return sum / static_cast<double>(k_);
  }

 private:
  std::shared_ptr<const CanonicalData> data_;
  std::size_t k_;
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(std::vector<double> theta, std::size_t train_size, std::string name)
      : Predictor(train_size, std::move(name)), theta_(std::move(theta)) {}

  double predict(std::span<const double> x) const override {
    check_query_dim(x, theta_.size());
    double s = 0.0;
    for (std::size_t j = 0; j < theta_.size(); ++j) s += theta_[j] * x[j];
    return s;
  }

 private:
  std::vector<double> theta_;
};

struct TreeNode {
  // leaf: feature == npos
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t feature = npos;
  double threshold = 0.0;
  double leaf_value = 0.0;
  std::size_t left = 0, right = 0;  // child slots in the node pool
};

class TreePredictor final : public Predictor {
 public:
  TreePredictor(std::vector<TreeNode> nodes, std::size_t dim, std::size_t train_size, std::string name)
      : Predictor(train_size, std::move(name)), nodes_(std::move(nodes)), dim_(dim) {}

  double predict(std::span<const double> x) const override {
    check_query_dim(x, dim_);
    std::size_t at = 0;
    while (nodes_[at].feature != TreeNode::npos) {
      at = x[nodes_[at].feature] <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
    }
    return nodes_[at].leaf_value;
  }

 private:
  std::vector<TreeNode> nodes_;
  std::size_t dim_;
};

class AveragePredictor final : public Predictor {
 public:
  AveragePredictor(std::vector<PredictorPtr> members, std::size_t dim, std::size_t train_size,
                   std::string name)
      : Predictor(train_size, std::move(name)), members_(std::move(members)), dim_(dim) {}

  double predict(std::span<const double> x) const override {
    check_query_dim(x, dim_);
    double s = 0.0;
    for (const auto& m : members_) s += m->predict(x);
    return s / static_cast<double>(members_.size());
  }

 private:
  std::vector<PredictorPtr> members_;
  std::size_t dim_;
};

class ConstantPredictor final : public Predictor {
 public:
  ConstantPredictor(double value, std::size_t train_size, std::string name)
      : Predictor(train_size, std::move(name)), value_(value) {}
  double predict(std::span<const double>) const override { return value_; }

 private:
  double value_;
};

class ClippedPredictor final : public Predictor {
 public:
  ClippedPredictor(PredictorPtr inner, double lo, double hi, std::string name)
      : Predictor(inner->train_size(), std::move(name)), inner_(std::move(inner)), lo_(lo), hi_(hi) {}
  double predict(std::span<const double> x) const override {
    return std::clamp(inner_->predict(x), lo_, hi_);
  }

 private:
  PredictorPtr inner_;
  double lo_, hi_;
};

// Greedy variance-reduction split search over one node. Candidate thresholds
// are midpoints between consecutive distinct sorted feature values; the best
// (sse, feature, threshold) is chosen with ties resolved to the first
// candidate in scan order, so the result does not depend on input order.
struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

SplitChoice best_split(const std::vector<DataPoint>& pts, const std::vector<std::size_t>& node,
                       std::size_t dim, std::size_t min_leaf) {
  SplitChoice best;
  const std::size_t sz = node.size();
  std::vector<std::size_t> order(node);
  for (std::size_t feature = 0; feature < dim; ++feature) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (pts[a].x[feature] != pts[b].x[feature]) return pts[a].x[feature] < pts[b].x[feature];
      return a < b;
    });
    double left_sum = 0.0, left_sumsq = 0.0;
    double total_sum = 0.0, total_sumsq = 0.0;
    for (std::size_t i : order) {
      total_sum += pts[i].y;
      total_sumsq += pts[i].y * pts[i].y;
    }
    for (std::size_t p = 1; p < sz; ++p) {
      const double yv = pts[order[p - 1]].y;
      left_sum += yv;
      left_sumsq += yv * yv;
      const double xl = pts[order[p - 1]].x[feature];
      const double xr = pts[order[p]].x[feature];
      if (xl == xr) continue;  // not a valid cut point
      if (p < min_leaf || sz - p < min_leaf) continue;
      const double nl = static_cast<double>(p);
      const double nr = static_cast<double>(sz - p);
      const double right_sum = total_sum - left_sum;
      const double right_sumsq = total_sumsq - left_sumsq;
      const double sse = (left_sumsq - left_sum * left_sum / nl) +
                         (right_sumsq - right_sum * right_sum / nr);
      if (sse < best.sse) {
        best.found = true;
        best.feature = feature;
        best.threshold = xl + 0.5 * (xr - xl);
        best.sse = sse;
      }
    }
  }
  return best;
}

std::size_t grow_tree(const std::vector<DataPoint>& pts, std::vector<std::size_t> node,
                      std::size_t dim, const TreeParams& params, std::size_t depth,
                      std::vector<TreeNode>& pool) {
  double sum = 0.0;
  for (std::size_t i : node) sum += pts[i].y;
  const double mean = sum / static_cast<double>(node.size());

  const std::size_t slot = pool.size();
  pool.emplace_back();
  pool[slot].leaf_value = mean;

  if (depth >= params.max_depth || node.size() < 2 * params.min_leaf) return slot;
  const SplitChoice split = best_split(pts, node, dim, params.min_leaf);
  if (!split.found) return slot;

  std::vector<std::size_t> left, right;
  for (std::size_t i : node) {
    (pts[i].x[split.feature] <= split.threshold ? left : right).push_back(i);
  }
  const std::size_t l = grow_tree(pts, std::move(left), dim, params, depth + 1, pool);
  const std::size_t r = grow_tree(pts, std::move(right), dim, params, depth + 1, pool);
  pool[slot].feature = split.feature;
  pool[slot].threshold = split.threshold;
  pool[slot].left = l;
  pool[slot].right = r;
  return slot;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

KnnAlgorithm::KnnAlgorithm(KnnParams params) : params_(params) {
  if (params_.k < 1) throw std::invalid_argument("knn: k must be >= 1");
}

PredictorPtr KnnAlgorithm::fit(const Dataset& train) const {
  if (train.empty()) throw std::invalid_argument("knn: training set is empty");
  if (params_.k > train.size()) throw std::invalid_argument("knn: k exceeds sample size");
  auto data = std::make_shared<CanonicalData>(train);
  return std::make_shared<KnnPredictor>(std::move(data), params_.k, name());
}

std::string KnnAlgorithm::name() const {
  return "knn(k=" + std::to_string(params_.k) + ")";
}

RidgeAlgorithm::RidgeAlgorithm(RidgeParams params) : params_(params) {
  if (!(params_.lambda > 0)) throw std::invalid_argument("ridge: lambda must be > 0");
}

PredictorPtr RidgeAlgorithm::fit(const Dataset& train) const {
  if (train.empty()) throw std::invalid_argument("ridge: training set is empty");
  const CanonicalData data(train);
  const auto d = static_cast<Eigen::Index>(data.dim);
  const double n = static_cast<double>(data.points.size());

  // theta = (Sigma_n + lambda I)^{-1} S_n with the 1/n-scaled moments
  // Sigma_n = (1/n) sum x x^T and S_n = (1/n) sum x y.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(d);
  for (const auto& p : data.points) {
    const Eigen::Map<const Eigen::VectorXd> x(p.x.data(), d);
    gram.noalias() += x * x.transpose();
    moment.noalias() += x * p.y;
  }
  gram /= n;
  moment /= n;
  gram.diagonal().array() += params_.lambda;

  const Eigen::VectorXd theta = Eigen::LLT<Eigen::MatrixXd>(gram).solve(moment);
  return std::make_shared<LinearPredictor>(
      std::vector<double>(theta.data(), theta.data() + d), data.points.size(), name());
}

std::string RidgeAlgorithm::name() const {
  return "ridge(lambda=" + format_double(params_.lambda) + ")";
}

TreeAlgorithm::TreeAlgorithm(TreeParams params) : params_(params) {
  if (params_.max_depth < 1) throw std::invalid_argument("tree: max_depth must be >= 1");
  if (params_.min_leaf < 1) throw std::invalid_argument("tree: min_leaf must be >= 1");
}

PredictorPtr TreeAlgorithm::fit(const Dataset& train) const {
  if (train.empty()) throw std::invalid_argument("tree: training set is empty");
  const CanonicalData data(train);
  std::vector<std::size_t> root(data.points.size());
  for (std::size_t i = 0; i < root.size(); ++i) root[i] = i;
  std::vector<TreeNode> pool;
  grow_tree(data.points, std::move(root), data.dim, params_, 0, pool);
  return std::make_shared<TreePredictor>(std::move(pool), data.dim, data.points.size(), name());
}

std::string TreeAlgorithm::name() const {
  return "tree(max_depth=" + std::to_string(params_.max_depth) +
         ",min_leaf=" + std::to_string(params_.min_leaf) + ")";
}

SubbagAlgorithm::SubbagAlgorithm(SubbagParams params) : params_(std::move(params)) {
  if (!params_.base) throw std::invalid_argument("subbag: base algorithm is required");
  if (params_.bag_size < 1) throw std::invalid_argument("subbag: bag size must be >= 1");
  if (params_.bag_count < 1) throw std::invalid_argument("subbag: bag count must be >= 1");
}

PredictorPtr SubbagAlgorithm::fit(const Dataset& train) const {
  const std::size_t n = train.size();
  if (params_.bag_size >= n) throw std::invalid_argument("subbag: bag size must be < n");
  const CanonicalData data(train);

  // Bags are drawn from streams keyed on (bag_seed, canonical digest), so
  // permuting the input changes nothing.
  const std::int64_t root = mix_seed(params_.bag_seed, train.digest());
  std::vector<PredictorPtr> members;
  members.reserve(params_.bag_count);
  std::vector<std::size_t> idx(n);
  for (std::size_t b = 0; b < params_.bag_count; ++b) {
    RngStream rng = derive_stream(root, b);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    // partial Fisher-Yates: first bag_size slots are the sample
    for (std::size_t i = 0; i < params_.bag_size; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(idx[i], idx[j]);
    }
    Dataset bag(train.dim());
    for (std::size_t i = 0; i < params_.bag_size; ++i) {
      const DataPoint& p = data.points[idx[i]];
      bag.add(p.x, p.y);
    }
    members.push_back(params_.base->fit(bag));
  }
  return std::make_shared<AveragePredictor>(std::move(members), train.dim(), n, name());
}

std::string SubbagAlgorithm::name() const {
  return "subbag(base=" + params_.base->name() + ",N=" + std::to_string(params_.bag_size) +
         ",B=" + std::to_string(params_.bag_count) + ")";
}

PredictorPtr ConstantAlgorithm::fit(const Dataset& train) const {
  return std::make_shared<ConstantPredictor>(value_, train.size(), name());
}

std::string ConstantAlgorithm::name() const { return "constant(" + format_double(value_) + ")"; }

PredictorPtr MeanAlgorithm::fit(const Dataset& train) const {
  if (train.empty()) throw std::invalid_argument("mean: training set is empty");
  const CanonicalData data(train);
  double sum = 0.0;
  for (const auto& p : data.points) sum += p.y;
  return std::make_shared<ConstantPredictor>(sum / static_cast<double>(train.size()),
                                             train.size(), name());
}

std::string MeanAlgorithm::name() const { return "mean"; }

ClippedAlgorithm::ClippedAlgorithm(AlgorithmPtr base, double lo, double hi)
    : base_(std::move(base)), lo_(lo), hi_(hi) {
  if (!base_) throw std::invalid_argument("clip: base algorithm is required");
  if (!(lo_ <= hi_)) throw std::invalid_argument("clip: lo must be <= hi");
}

PredictorPtr ClippedAlgorithm::fit(const Dataset& train) const {
  return std::make_shared<ClippedPredictor>(base_->fit(train), lo_, hi_, name());
}

std::string ClippedAlgorithm::name() const {
  return "clip(" + base_->name() + "," + format_double(lo_) + "," + format_double(hi_) + ")";
}

PredictorPtr fit_knn(const Dataset& train, const KnnParams& params) {
  return KnnAlgorithm(params).fit(train);
}

PredictorPtr fit_ridge(const Dataset& train, const RidgeParams& params) {
  return RidgeAlgorithm(params).fit(train);
}

PredictorPtr fit_tree(const Dataset& train, const TreeParams& params) {
  return TreeAlgorithm(params).fit(train);
}

PredictorPtr fit_subbag(const Dataset& train, const SubbagParams& params) {
  return SubbagAlgorithm(params).fit(train);
}

}  // namespace stabcp
