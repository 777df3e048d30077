#ifndef STABCP_FACTORY_HPP
#define STABCP_FACTORY_HPP

#include <stdexcept>
#include <string>

#include "stabcp/distributions.hpp"
#include "stabcp/regressors.hpp"

// Textual constructors used by the CLI and config files. Specs look like
// "name" or "name:key=value,key=value", e.g. "knn:k=20",
// "ridge:lambda=0.01", "subbag_tree:N=50,B=50,max_depth=8" or "sine:d=40".

namespace stabcp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Algorithms: knn (k), ridge (lambda), tree (max_depth, min_leaf),
// subbag_tree (N, B, max_depth, min_leaf, bag_seed), constant (value), mean.
AlgorithmPtr parse_algorithm(const std::string& spec);

// Distributions: sine (d), linear (d, noise, weight_seed), bounded (d).
DistributionPtr parse_distribution(const std::string& spec);

}  // namespace stabcp

#endif  // STABCP_FACTORY_HPP
