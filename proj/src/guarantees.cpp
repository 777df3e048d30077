#include "stabcp/guarantees.hpp"

#include <cmath>

namespace stabcp {

namespace {

void check_common(const BoundInputs& in) {
  if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw std::invalid_argument("bound: alpha must be in (0,1)");
  if (!(in.delta > 0.0 && in.delta <= 1.0)) throw std::invalid_argument("bound: delta must be in (0,1]");
  if (in.n < 1 || in.m < 1) throw std::invalid_argument("bound: n and m must be >= 1");
}

double require(const std::optional<double>& field, const char* what, bool strictly_positive) {
  if (!field.has_value()) {
    throw std::invalid_argument(std::string("bound: missing required input ") + what);
  }
  const double v = *field;
  if (strictly_positive ? !(v > 0.0) : !(v >= 0.0)) {
    throw std::invalid_argument(std::string("bound: ") + what +
                                (strictly_positive ? " must be > 0" : " must be >= 0"));
  }
  return v;
}

// 3 sqrt(log(1/delta) / (2 min{n, m}))
double sampling_term(const BoundInputs& in) {
  const double nm = static_cast<double>(std::min(in.n, in.m));
  return 3.0 * std::sqrt(std::log(1.0 / in.delta) / (2.0 * nm));
}

BoundReport finish(double threshold, double failure, const BoundInputs& in,
                   std::optional<double> implied_inflation = std::nullopt) {
  BoundReport r;
  r.threshold = threshold;
  r.failure_prob = failure;
  r.vacuous = threshold >= 1.0 || failure >= 1.0;
  r.implied_inflation = implied_inflation;
  r.inputs = in;
  return r;
}

}  // namespace

const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::split: return "split";
    case Theorem::jplus: return "jplus";
    case Theorem::jplus_uninflated: return "jplus_uninflated";
    case Theorem::full_conformal: return "full_conformal";
    case Theorem::alt_jplus: return "alt_jplus";
    case Theorem::alt_jplus_uninflated: return "alt_jplus_uninflated";
    case Theorem::alt_full_conformal: return "alt_full_conformal";
  }
  return "?";
}

Theorem parse_theorem(const std::string& text) {
  for (Theorem t : {Theorem::split, Theorem::jplus, Theorem::jplus_uninflated,
                    Theorem::full_conformal, Theorem::alt_jplus, Theorem::alt_jplus_uninflated,
                    Theorem::alt_full_conformal}) {
    if (text == theorem_name(t)) return t;
  }
  throw std::invalid_argument("unknown theorem '" + text + "'");
}

BoundReport bound_split_conformal(double alpha, double delta, std::size_t n1) {
  BoundInputs in;
  in.alpha = alpha;
  in.delta = delta;
  in.n = n1;
  in.m = 1;
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bound: alpha must be in (0,1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("bound: delta must be in (0,1]");
  if (n1 < 1) throw std::invalid_argument("bound: n1 must be >= 1");
  const double threshold = alpha + std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n1)));
  return finish(threshold, delta, in);
}

BoundReport bound_jplus_inflated(const BoundInputs& in) {
  check_common(in);
  const double beta = require(in.beta, "beta", /*strictly_positive=*/false);
  const double gamma = require(in.gamma, "gamma", /*strictly_positive=*/true);
  const double stability = std::cbrt(2.0 * beta / gamma);
  return finish(in.alpha + sampling_term(in) + 2.0 * stability, 3.0 * in.delta + stability, in);
}

BoundReport bound_jplus_uninflated(const BoundInputs& in) {
  check_common(in);
  const double beta = require(in.beta, "beta", /*strictly_positive=*/false);
  const double dens = require(in.b_dens, "b_dens", /*strictly_positive=*/true);
  const double stability = std::pow(2.0 * dens * beta, 0.25);
  return finish(in.alpha + sampling_term(in) + 4.0 * stability, 3.0 * in.delta + stability, in);
}

BoundReport bound_full_conformal(const BoundInputs& in) {
  check_common(in);
  const double beta = require(in.beta, "beta", /*strictly_positive=*/false);
  const double gamma = require(in.gamma, "gamma", /*strictly_positive=*/true);
  const double stability = std::cbrt(2.0 * beta / gamma);
  return finish(in.alpha + sampling_term(in) + 2.0 * stability, 3.0 * in.delta + stability, in);
}

BoundReport bound_alternative(const BoundInputs& in, AlternativeKind which) {
  check_common(in);
  const double epsilon = require(in.epsilon, "epsilon", /*strictly_positive=*/false);
  const double nu = require(in.nu, "nu", /*strictly_positive=*/false);
  const double stability = std::cbrt(2.0 * nu);
  const double base = in.alpha + sampling_term(in) + 2.0 * stability;
  const double failure = 3.0 * in.delta + stability;
  switch (which) {
    case AlternativeKind::jplus:
    case AlternativeKind::full_conformal:
      return finish(base, failure, in, 2.0 * epsilon);
    case AlternativeKind::jplus_uninflated: {
      const double dens = require(in.b_dens, "b_dens", /*strictly_positive=*/true);
      return finish(base + 4.0 * dens * epsilon, failure, in);
    }
  }
  throw std::logic_error("bound_alternative: unreachable");
}

BoundReport evaluate_bound(Theorem theorem, const BoundInputs& in) {
  switch (theorem) {
    case Theorem::split: return bound_split_conformal(in.alpha, in.delta, in.n);
    case Theorem::jplus: return bound_jplus_inflated(in);
    case Theorem::jplus_uninflated: return bound_jplus_uninflated(in);
    case Theorem::full_conformal: return bound_full_conformal(in);
    case Theorem::alt_jplus: return bound_alternative(in, AlternativeKind::jplus);
    case Theorem::alt_jplus_uninflated:
      return bound_alternative(in, AlternativeKind::jplus_uninflated);
    case Theorem::alt_full_conformal:
      return bound_alternative(in, AlternativeKind::full_conformal);
  }
  throw std::logic_error("evaluate_bound: unreachable");
}

AsymptoticPoint asymptotic_jplus_schedule(std::size_t n, double b_n, double gamma_n) {
  if (n < 1) throw std::invalid_argument("asymptotic schedule: n must be >= 1");
  if (!(b_n > 0) || !(gamma_n > 0)) throw std::invalid_argument("asymptotic schedule: b_n and gamma_n must be > 0");
  AsymptoticPoint p;
  p.n = n;
  p.m = static_cast<std::size_t>(std::ceil(std::sqrt(gamma_n / b_n)));
  if (p.m < 1) p.m = 1;
  const double nm = static_cast<double>(std::min(n, p.m));
  const double ratio = 2.0 * static_cast<double>(p.m) * b_n / gamma_n;
  p.epsilon = 3.0 / std::pow(4.0 * nm, 0.25) + 2.0 * std::cbrt(ratio);
  p.delta = 3.0 * std::exp(-std::sqrt(nm)) + std::cbrt(ratio);
  return p;
}

AsymptoticPoint asymptotic_jplus_uninflated_schedule(std::size_t n, double b_n, double dens_n) {
  if (n < 1) throw std::invalid_argument("asymptotic schedule: n must be >= 1");
  if (!(b_n > 0) || !(dens_n > 0)) throw std::invalid_argument("asymptotic schedule: b_n and dens_n must be > 0");
  AsymptoticPoint p;
  p.n = n;
  p.m = static_cast<std::size_t>(std::ceil(1.0 / std::sqrt(b_n * dens_n)));
  if (p.m < 1) p.m = 1;
  const double nm = static_cast<double>(std::min(n, p.m));
  const double level = 2.0 * dens_n * static_cast<double>(p.m) * b_n;
  p.epsilon = 3.0 / std::pow(4.0 * nm, 0.25) + 4.0 * std::pow(level, 0.25);
  p.delta = 3.0 * std::exp(-std::sqrt(nm)) + std::pow(level, 0.25);
  return p;
}

std::size_t best_bound_index(Theorem theorem, const std::vector<BoundInputs>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("best_bound_index: no candidates");
  std::size_t best = 0;
  BoundReport best_report = evaluate_bound(theorem, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const BoundReport r = evaluate_bound(theorem, candidates[i]);
    const bool better =
        (r.vacuous != best_report.vacuous)
            ? !r.vacuous
            : (r.threshold != best_report.threshold ? r.threshold < best_report.threshold
                                                    : r.failure_prob < best_report.failure_prob);
    if (better) {
      best = i;
      best_report = r;
    }
  }
  return best;
}

}  // namespace stabcp
