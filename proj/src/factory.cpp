#include "stabcp/factory.hpp"

#include <cmath>
#include <map>
#include <set>

namespace stabcp {

namespace {

struct ParsedSpec {
  std::string name;
  std::map<std::string, std::string> options;
};

ParsedSpec parse_spec(const std::string& spec) {
  ParsedSpec out;
  const std::size_t colon = spec.find(':');
  out.name = spec.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::string rest = spec.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item = rest.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("bad option '" + item + "' in spec '" + spec + "'");
    }
    out.options[item.substr(0, eq)] = item.substr(eq + 1);
    pos = comma + 1;
  }
  return out;
}

class OptionReader {
 public:
  OptionReader(ParsedSpec spec) : spec_(std::move(spec)) {}

  double number(const std::string& key, double fallback) {
    auto it = spec_.options.find(key);
    if (it == spec_.options.end()) return fallback;
    seen_.insert(key);
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ConfigError("bad numeric value for '" + key + "' in spec '" + spec_.name + "'");
    }
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const double v = number(key, static_cast<double>(fallback));
    if (v < 0 || v != std::floor(v)) {
      throw ConfigError("option '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw ConfigError("option '" + key + "' must be an integer");
    return static_cast<std::int64_t>(v);
  }

  void finish() const {
    for (const auto& [key, value] : spec_.options) {
      (void)value;
      if (!seen_.count(key)) {
        throw ConfigError("unknown option '" + key + "' for '" + spec_.name + "'");
      }
    }
  }

 private:
  ParsedSpec spec_;
  std::set<std::string> seen_;
};

}  // namespace

AlgorithmPtr parse_algorithm(const std::string& spec) {
  ParsedSpec parsed = parse_spec(spec);
  const std::string name = parsed.name;
  OptionReader opts(std::move(parsed));
  AlgorithmPtr out;
  try {
    if (name == "knn") {
      out = std::make_shared<KnnAlgorithm>(KnnParams{opts.count("k", 20)});
    } else if (name == "ridge") {
      out = std::make_shared<RidgeAlgorithm>(RidgeParams{opts.number("lambda", 0.01)});
    } else if (name == "tree") {
      out = std::make_shared<TreeAlgorithm>(
          TreeParams{opts.count("max_depth", 8), opts.count("min_leaf", 1)});
    } else if (name == "subbag_tree") {
      SubbagParams params;
      params.base = std::make_shared<TreeAlgorithm>(
          TreeParams{opts.count("max_depth", 8), opts.count("min_leaf", 1)});
      params.bag_size = opts.count("N", 50);
      params.bag_count = opts.count("B", 50);
      params.bag_seed = opts.integer("bag_seed", 0);
      out = std::make_shared<SubbagAlgorithm>(std::move(params));
    } else if (name == "constant") {
      out = std::make_shared<ConstantAlgorithm>(opts.number("value", 0.0));
    } else if (name == "mean") {
      out = std::make_shared<MeanAlgorithm>();
    } else {
      throw ConfigError("unknown algorithm '" + name +
                        "' (expected knn, ridge, tree, subbag_tree, constant or mean)");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  opts.finish();
  return out;
}

DistributionPtr parse_distribution(const std::string& spec) {
  ParsedSpec parsed = parse_spec(spec);
  const std::string name = parsed.name;
  OptionReader opts(std::move(parsed));
  DistributionPtr out;
  try {
    if (name == "sine") {
      out = std::make_shared<SineMixtureDistribution>(opts.count("d", 40));
    } else if (name == "linear") {
      out = std::make_shared<LinearGaussianDistribution>(
          opts.count("d", 10), opts.number("noise", 1.0), opts.integer("weight_seed", 0));
    } else if (name == "bounded") {
      out = std::make_shared<BoundedUniformDistribution>(opts.count("d", 3));
    } else {
      throw ConfigError("unknown distribution '" + name + "' (expected sine, linear or bounded)");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  opts.finish();
  return out;
}

}  // namespace stabcp
