#include "stabcp/distributions.hpp"

#include <cmath>

namespace stabcp {

Dataset Distribution::sample(std::size_t count, RngStream& rng) const {
  Dataset out(dim());
  for (std::size_t i = 0; i < count; ++i) out.add(sample_point(rng));
  return out;
}

namespace {

void check_dim(std::size_t d) {
  if (d < 1) throw std::invalid_argument("distribution: dimension must be >= 1");
}

DataPoint draw_sine_mixture(std::size_t d, RngStream& rng) {
  DataPoint p;
  p.x.resize(d);
  double signal = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    p.x[j] = rng.next_unit();
    signal += std::sin(p.x[j] / static_cast<double>(j + 1));
  }
  // eps ~ Unif[-1,1] w.p. 1/3, else Unif[-0.1, 0.1]; both branches consume
  // exactly one draw after the selector.
  const double pick = rng.next_unit();
  const double eps = pick < 1.0 / 3.0 ? rng.uniform(-1.0, 1.0) : rng.uniform(-0.1, 0.1);
  p.y = signal + eps;
  return p;
}

std::vector<double> draw_weights(std::size_t d, RngStream& rng) {
  std::vector<double> w(d);
  for (auto& v : w) v = rng.normal();
  return w;
}

DataPoint draw_linear_gaussian(const std::vector<double>& w, double noise_sd, RngStream& rng) {
  DataPoint p;
  p.x.resize(w.size());
  double signal = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    p.x[j] = rng.normal();
    signal += w[j] * p.x[j];
  }
  p.y = signal + noise_sd * rng.normal();
  return p;
}

}  // namespace

SineMixtureDistribution::SineMixtureDistribution(std::size_t d)
    : d_(d), bound_y_(sine_mixture_bound_y(d)) {
  check_dim(d);
}

DataPoint SineMixtureDistribution::sample_point(RngStream& rng) const {
  return draw_sine_mixture(d_, rng);
}

std::string SineMixtureDistribution::name() const {
  return "sine_mixture(d=" + std::to_string(d_) + ")";
}

LinearGaussianDistribution::LinearGaussianDistribution(std::size_t d, double noise_sd,
                                                       std::int64_t weight_seed)
    : d_(d), noise_sd_(noise_sd) {
  check_dim(d);
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("linear_gaussian: noise_sd must be >= 0");
  RngStream rng = derive_stream(weight_seed, 0);
  weights_ = draw_weights(d, rng);
}

DataPoint LinearGaussianDistribution::sample_point(RngStream& rng) const {
  return draw_linear_gaussian(weights_, noise_sd_, rng);
}

std::string LinearGaussianDistribution::name() const {
  return "linear_gaussian(d=" + std::to_string(d_) + ")";
}

BoundedUniformDistribution::BoundedUniformDistribution(std::size_t d) : d_(d) { check_dim(d); }

DataPoint BoundedUniformDistribution::sample_point(RngStream& rng) const {
  DataPoint p;
  p.x.resize(d_);
  double mean = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    p.x[j] = rng.next_unit();
    mean += p.x[j];
  }
  mean /= static_cast<double>(d_);
  p.y = 0.25 + 0.5 * mean + rng.uniform(-0.25, 0.25);
  return p;
}

std::string BoundedUniformDistribution::name() const {
  return "custom_bounded(d=" + std::to_string(d_) + ")";
}

Dataset sample_sine_mixture(std::size_t d, std::size_t count, RngStream& rng) {
  check_dim(d);
  Dataset out(d);
  for (std::size_t i = 0; i < count; ++i) out.add(draw_sine_mixture(d, rng));
  return out;
}

Dataset sample_linear_gaussian(std::size_t d, std::size_t count, double noise_sd, RngStream& rng) {
  check_dim(d);
  const std::vector<double> w = draw_weights(d, rng);
  Dataset out(d);
  for (std::size_t i = 0; i < count; ++i) out.add(draw_linear_gaussian(w, noise_sd, rng));
  return out;
}

double sine_mixture_bound_y(std::size_t d) {
  double s = 1.0;
  for (std::size_t j = 1; j <= d; ++j) s += std::min(1.0, 1.0 / static_cast<double>(j));
  return s;
}

}  // namespace stabcp
