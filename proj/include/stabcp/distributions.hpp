#ifndef STABCP_DISTRIBUTIONS_HPP
#define STABCP_DISTRIBUTIONS_HPP

#include <cmath>
#include <memory>
#include <optional>

#include "stabcp/core.hpp"

// Synthetic data-generating distributions. Sampling is a pure function of
// the supplied stream, and each distribution declares the analytic bounds
// (|Y| <= B_Y, ||X|| <= B_X, expected sup of the conditional response
// density B_dens) it can certify; estimators skip bound checks when a bound
// is not declared.

namespace stabcp {

class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual std::size_t dim() const = 0;
  virtual DataPoint sample_point(RngStream& rng) const = 0;
  virtual std::string name() const = 0;

  virtual std::optional<double> bound_y() const { return std::nullopt; }
  virtual std::optional<double> bound_x() const { return std::nullopt; }
  virtual std::optional<double> bound_density() const { return std::nullopt; }

  Dataset sample(std::size_t count, RngStream& rng) const;
};

using DistributionPtr = std::shared_ptr<const Distribution>;

// X ~ Unif([0,1]^d), Y = sum_j sin(X_j / j) + eps, where eps is drawn from
// Unif[-1,1] with probability 1/3 and Unif[-0.1,0.1] otherwise.
// Bounds: B_Y = 1 + sum_j min(1, 1/j), B_X = sqrt(d), B_dens = 3.5 (the
// mixture density peaks at 1/6 + 10/3).
class SineMixtureDistribution final : public Distribution {
 public:
  explicit SineMixtureDistribution(std::size_t d);

  std::size_t dim() const override { return d_; }
  DataPoint sample_point(RngStream& rng) const override;
  std::string name() const override;

  std::optional<double> bound_y() const override { return bound_y_; }
  std::optional<double> bound_x() const override { return std::sqrt(static_cast<double>(d_)); }
  std::optional<double> bound_density() const override { return 3.5; }

 private:
  std::size_t d_;
  double bound_y_;
};

// X ~ N(0, I_d), Y = X'w + N(0, noise_sd^2). The weight vector is fixed by
// `weight_seed` at construction, so every draw comes from one distribution
// no matter which stream samples it. Unbounded; declares no bounds.
class LinearGaussianDistribution final : public Distribution {
 public:
  LinearGaussianDistribution(std::size_t d, double noise_sd, std::int64_t weight_seed = 0);

  std::size_t dim() const override { return d_; }
  DataPoint sample_point(RngStream& rng) const override;
  std::string name() const override;

  const std::vector<double>& weights() const { return weights_; }
  double noise_sd() const { return noise_sd_; }

 private:
  std::size_t d_;
  double noise_sd_;
  std::vector<double> weights_;
};

// X ~ Unif([0,1]^d), Y = 1/4 + (1/2) mean(X) + Unif[-1/4, 1/4], so that
// Y lies in [0, 1] exactly. Bounds: B_Y = 1, B_X = sqrt(d), B_dens = 2.
// Useful wherever theory assumes responses (or predictions) in [0, 1].
class BoundedUniformDistribution final : public Distribution {
 public:
  explicit BoundedUniformDistribution(std::size_t d);

  std::size_t dim() const override { return d_; }
  DataPoint sample_point(RngStream& rng) const override;
  std::string name() const override;

  std::optional<double> bound_y() const override { return 1.0; }
  std::optional<double> bound_x() const override { return std::sqrt(static_cast<double>(d_)); }
  std::optional<double> bound_density() const override { return 2.0; }

 private:
  std::size_t d_;
};

// One-call samplers. The linear-Gaussian variant draws its weight vector
// from `rng` before the points, so repeated calls on one stream give
// different (but reproducible) regression vectors.
Dataset sample_sine_mixture(std::size_t d, std::size_t count, RngStream& rng);
Dataset sample_linear_gaussian(std::size_t d, std::size_t count, double noise_sd, RngStream& rng);

// B_Y of the sine mixture: 1 + sum_{j=1}^{d} min(1, 1/j).
double sine_mixture_bound_y(std::size_t d);

}  // namespace stabcp

#endif  // STABCP_DISTRIBUTIONS_HPP
