#include "stabcp/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stabcp {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::int64_t root_seed, std::uint64_t stream_index)
    : root_seed_(root_seed), stream_index_(stream_index) {
  // Mix seed and index through two SplitMix64 passes before expanding the
  // xoshiro state, so that nearby (seed, index) pairs land far apart.
  std::uint64_t s = static_cast<std::uint64_t>(root_seed);
  std::uint64_t mixer = splitmix64(s) ^ (stream_index + 0x9e3779b97f4a7c15ULL);
  std::uint64_t m2 = mixer;
  mixer = splitmix64(m2);
  for (auto& word : state_) word = splitmix64(mixer);
  if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
    state_[0] = 1;  // all-zero state is the one forbidden xoshiro state
  }
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_unit_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

double RngStream::normal() {
  const double u1 = next_unit_open();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("RngStream::below: bound must be >= 1");
  // Lemire's rejection method: unbiased and cheap.
  std::uint64_t x = next_u64();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  std::uint64_t l = static_cast<std::uint64_t>(m);
  if (l < bound) {
    const std::uint64_t t = (0 - bound) % bound;
    while (l < t) {
      x = next_u64();
      m = static_cast<unsigned __int128>(x) * bound;
      l = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RngStream derive_stream(std::int64_t seed, std::uint64_t trial_index) {
  return RngStream(seed, trial_index);
}

std::int64_t mix_seed(std::int64_t seed, std::uint64_t tag) {
  std::uint64_t s = static_cast<std::uint64_t>(seed) ^ (tag * 0xd1342543de82ef95ULL);
  return static_cast<std::int64_t>(splitmix64(s));
}

// ---------------------------------------------------------------------------

ExtendedReal::ExtendedReal(double v) : kind_(Kind::finite), value_(v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("ExtendedReal: finite constructor given non-finite value");
  }
}

double ExtendedReal::value() const {
  if (kind_ != Kind::finite) throw std::domain_error("ExtendedReal::value on infinity");
  return value_;
}

double ExtendedReal::as_double() const {
  switch (kind_) {
    case Kind::neg: return -std::numeric_limits<double>::infinity();
    case Kind::pos: return std::numeric_limits<double>::infinity();
    default: return value_;
  }
}

ExtendedReal ExtendedReal::operator-() const {
  switch (kind_) {
    case Kind::neg: return pos_inf();
    case Kind::pos: return neg_inf();
    default: return ExtendedReal(-value_);
  }
}

ExtendedReal ExtendedReal::shifted(double delta) const {
  if (!std::isfinite(delta)) throw std::invalid_argument("ExtendedReal::shifted: delta must be finite");
  if (kind_ == Kind::finite) return ExtendedReal(value_ + delta);
  return *this;
}

bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
  if (a.kind_ != b.kind_) return false;
  return a.kind_ != ExtendedReal::Kind::finite || a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
  auto rank = [](const ExtendedReal& e) {
    return e.kind_ == ExtendedReal::Kind::neg ? 0 : e.kind_ == ExtendedReal::Kind::finite ? 1 : 2;
  };
  if (rank(a) != rank(b)) return rank(a) <=> rank(b);
  if (a.kind_ != ExtendedReal::Kind::finite) return std::strong_ordering::equal;
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (a.value_ > b.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Interval::Interval(ExtendedReal lo, ExtendedReal hi) : empty_(false), lo_(lo), hi_(hi) {
  if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
}

Interval Interval::empty() { return Interval(); }

ExtendedReal Interval::lo() const {
  if (empty_) throw std::domain_error("Interval::lo on empty interval");
  return lo_;
}

ExtendedReal Interval::hi() const {
  if (empty_) throw std::domain_error("Interval::hi on empty interval");
  return hi_;
}

bool Interval::contains(double y) const {
  if (empty_) return false;
  const ExtendedReal e(y);
  return lo_ <= e && e <= hi_;
}

ExtendedReal Interval::length() const {
  if (empty_) return ExtendedReal(0.0);
  if (!lo_.is_finite() || !hi_.is_finite()) return ExtendedReal::pos_inf();
  return ExtendedReal(hi_.value() - lo_.value());
}

// ---------------------------------------------------------------------------

Dataset::Dataset(std::size_t dim, std::vector<DataPoint> points) : dim_(dim) {
  points_.reserve(points.size());
  for (auto& p : points) add(std::move(p));
}

void Dataset::add(DataPoint p) {
  if (p.x.empty()) throw std::invalid_argument("Dataset: feature dimension must be >= 1");
  if (points_.empty() && dim_ == 0) dim_ = p.x.size();
  if (p.x.size() != dim_) throw std::invalid_argument("Dataset: inconsistent feature dimension");
  for (double v : p.x) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite feature");
  }
  if (!std::isfinite(p.y)) throw std::invalid_argument("Dataset: non-finite response");
  points_.push_back(std::move(p));
}

void Dataset::add(std::vector<double> x, double y) { add(DataPoint{std::move(x), y}); }

Dataset Dataset::prefix(std::size_t count) const {
  if (count > size()) throw std::out_of_range("Dataset::prefix: count > size");
  Dataset out(dim_);
  out.points_.assign(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

Dataset Dataset::without(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("Dataset::without: index out of range");
  Dataset out(dim_);
  out.points_.reserve(size() - 1);
  for (std::size_t j = 0; j < size(); ++j) {
    if (j != i) out.points_.push_back(points_[j]);
  }
  return out;
}

Dataset Dataset::with_appended(std::vector<double> x, double y) const {
  Dataset out = *this;
  if (out.dim_ == 0) out.dim_ = x.size();
  out.add(std::move(x), y);
  return out;
}

std::vector<std::size_t> Dataset::canonical_order() const {
  std::vector<std::size_t> idx(size());
  for (std::size_t i = 0; i < size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [this](std::size_t a, std::size_t b) {
    const DataPoint& pa = points_[a];
    const DataPoint& pb = points_[b];
    for (std::size_t j = 0; j < dim_; ++j) {
      if (pa.x[j] != pb.x[j]) return pa.x[j] < pb.x[j];
    }
    return pa.y < pb.y;
  });
  return idx;
}

std::uint64_t Dataset::digest() const {
  // FNV-1a over the canonically ordered bit patterns; exact duplicates may
  // appear in any relative order without changing the hash.
  const auto order = canonical_order();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto absorb = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    __builtin_memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  absorb(static_cast<double>(dim_));
  for (std::size_t i : order) {
    for (double v : points_[i].x) absorb(v);
    absorb(points_[i].y);
  }
  return h;
}

// ---------------------------------------------------------------------------

ExtendedReal conformal_quantile(std::span<const double> values, double tau) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("conformal_quantile: empty sample");
  if (tau < 0) throw std::invalid_argument("conformal_quantile: tau must be >= 0");
  double raw = std::ceil(tau * static_cast<double>(n));
  if (raw > static_cast<double>(n)) return ExtendedReal::pos_inf();
  std::size_t k = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  std::vector<double> work(values.begin(), values.end());
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k - 1), work.end());
  return ExtendedReal(work[k - 1]);
}

ExtendedReal conformal_quantile(const std::vector<double>& values, double tau) {
  return conformal_quantile(std::span<const double>(values.data(), values.size()), tau);
}

}  // namespace stabcp
