#ifndef STABCP_CORE_HPP
#define STABCP_CORE_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Foundational types shared by every other component: datasets, fitted
// predictors, the finite-sample conformal quantile, extended reals for
// quantile overflow, and the per-trial RNG streams used by all Monte Carlo
// estimators.

namespace stabcp {

// ---------------------------------------------------------------------------
// RNG streams
// ---------------------------------------------------------------------------

// Deterministic stream derived from (root seed, stream index). Distinct
// indices give independent streams, so a parallel map over trials produces
// the same numbers no matter how trials are scheduled across workers.
//
// Generator: xoshiro256++ seeded through SplitMix64. Distribution sampling
// (uniform, normal, integer ranges) is implemented here rather than through
// <random> adaptors because std::*_distribution output is not pinned by the
// standard and results must be byte-identical.
class RngStream {
 public:
  RngStream(std::int64_t root_seed, std::uint64_t stream_index);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit();

  // Uniform on (0, 1]; never zero, safe under log().
  double next_unit_open();

  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (cosine branch only, so each call
  // consumes exactly two u64 draws).
  double normal();

  // Uniform integer in [0, bound). bound >= 1.
  std::uint64_t below(std::uint64_t bound);

  std::int64_t root_seed() const { return root_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

 private:
  std::array<std::uint64_t, 4> state_;
  std::int64_t root_seed_;
  std::uint64_t stream_index_;
};

// Pure function of (seed, trial_index): the single entry point every trial
// uses to obtain its stream.
RngStream derive_stream(std::int64_t seed, std::uint64_t trial_index);

// Mixes a dataset digest (or any other 64-bit tag) into a seed.  Used by the
// subbagging learner to key its bag draws off the data rather than off input
// order.
std::int64_t mix_seed(std::int64_t seed, std::uint64_t tag);

// ---------------------------------------------------------------------------
// Extended reals and intervals
// ---------------------------------------------------------------------------

// The real line plus {-inf, +inf}, kept as an explicit tagged value rather
// than IEEE sentinel floats so that interval arithmetic stays total.
class ExtendedReal {
 public:
  constexpr ExtendedReal() : kind_(Kind::finite), value_(0.0) {}
  ExtendedReal(double v);  // requires finite v

  static constexpr ExtendedReal neg_inf() { return ExtendedReal(Kind::neg, 0.0); }
  static constexpr ExtendedReal pos_inf() { return ExtendedReal(Kind::pos, 0.0); }

  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_neg_inf() const { return kind_ == Kind::neg; }
  bool is_pos_inf() const { return kind_ == Kind::pos; }

  // Finite value; throws on +-inf.
  double value() const;

  // Lossy view: +-HUGE_VAL for the infinities. Handy for printing and the
  // Python bindings, where IEEE infinities are the natural representation.
  double as_double() const;

  ExtendedReal operator-() const;
  // Shift by a finite amount; infinities absorb.
  ExtendedReal shifted(double delta) const;

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b);
  friend std::strong_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b);

 private:
  enum class Kind { neg, finite, pos };
  constexpr ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

// Closed interval [lo, hi] over the extended reals, or the canonical empty
// interval.
class Interval {
 public:
  Interval(ExtendedReal lo, ExtendedReal hi);  // requires lo <= hi
  static Interval empty();
  static Interval whole_line() { return Interval(ExtendedReal::neg_inf(), ExtendedReal::pos_inf()); }

  bool is_empty() const { return empty_; }
  ExtendedReal lo() const;
  ExtendedReal hi() const;

  bool contains(double y) const;

  // Lebesgue measure; +inf for unbounded intervals, 0 for empty ones
  // (single points have measure 0 too, but the closed interval still
  // contains them).
  ExtendedReal length() const;

 private:
  Interval() : empty_(true) {}
  bool empty_;
  ExtendedReal lo_, hi_;
};

// ---------------------------------------------------------------------------
// Data and regression algorithms
// ---------------------------------------------------------------------------

struct DataPoint {
  std::vector<double> x;
  double y = 0.0;
};

// Ordered multiset of (x, y) pairs with a shared feature dimension.
// Duplicates are permitted; every entry must be finite.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim) : dim_(dim) {}
  Dataset(std::size_t dim, std::vector<DataPoint> points);

  void add(DataPoint p);
  void add(std::vector<double> x, double y);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::size_t dim() const { return dim_; }

  const DataPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<DataPoint>& points() const { return points_; }

  // First `count` points as a new dataset (prefixes are how the stability
  // estimators realize nested samples).
  Dataset prefix(std::size_t count) const;

  // Copy with point i removed; used for leave-one-out fits.
  Dataset without(std::size_t i) const;

  // Copy with one extra point appended.
  Dataset with_appended(std::vector<double> x, double y) const;

  // Indices of the points sorted lexicographically by (x, y). This is a
  // total order on finite points, so it is invariant under permutation of
  // the input -- the hook all learners use to satisfy exact symmetry.
  std::vector<std::size_t> canonical_order() const;

  // Order-invariant 64-bit digest of the multiset contents.
  std::uint64_t digest() const;

 private:
  std::vector<DataPoint> points_;
  std::size_t dim_ = 0;
};

// Immutable fitted regression function.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(std::span<const double> x) const = 0;

  double predict(const std::vector<double>& x) const {
    return predict(std::span<const double>(x.data(), x.size()));
  }

  // Metadata: size of the training sample and the id of the algorithm that
  // produced this predictor.
  std::size_t train_size() const { return train_size_; }
  const std::string& algorithm() const { return algorithm_; }

 protected:
  Predictor(std::size_t train_size, std::string algorithm)
      : train_size_(train_size), algorithm_(std::move(algorithm)) {}

 private:
  std::size_t train_size_;
  std::string algorithm_;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

// A symmetric, deterministic fitting rule: permuting the training data must
// yield a predictor with bitwise-identical outputs at every query point.
class RegressionAlgorithm {
 public:
  virtual ~RegressionAlgorithm() = default;
  virtual PredictorPtr fit(const Dataset& train) const = 0;
  virtual std::string name() const = 0;
};

using AlgorithmPtr = std::shared_ptr<const RegressionAlgorithm>;

// ---------------------------------------------------------------------------
// Conformal quantile
// ---------------------------------------------------------------------------

// Quantile(V; tau) = the ceil(tau * |V|)-th smallest element of V.
// Index overflow (ceil(tau*n) > n) returns +inf; tau = 0 clamps the index
// to 1 and returns the minimum. This is the convention under which level
// (1-alpha)(1+1/n) picks the ceil((1-alpha)(n+1))-th order statistic.
ExtendedReal conformal_quantile(std::span<const double> values, double tau);
ExtendedReal conformal_quantile(const std::vector<double>& values, double tau);

}  // namespace stabcp

#endif  // STABCP_CORE_HPP
