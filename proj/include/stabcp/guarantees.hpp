#ifndef STABCP_GUARANTEES_HPP
#define STABCP_GUARANTEES_HPP

#include <optional>
#include <string>
#include <vector>

#include "stabcp/core.hpp"

// Pure evaluators of the finite-sample training-conditional coverage bounds.
// Each returns the pair (threshold T, failure probability F) such that the
// conditional miscoverage satisfies P{ alpha_P(D_n) < T } >= 1 - F.
//
// The caller supplies the stability level at the index shift each statement
// requires: the jackknife+ bounds take beta^out_{m,n-1} (or epsilon/nu at
// (m, n-1)), the full-conformal bounds take beta^in_{m-1,n+1} (or epsilon/nu
// at (m-1, n+1)). Failure probabilities above 1 are reported, not clamped;
// the vacuous flag marks regimes where the statement carries no content.

namespace stabcp {

struct BoundInputs {
  double alpha = 0.1;
  double delta = 0.05;
  std::size_t n = 1;
  std::size_t m = 1;
  std::optional<double> beta;     // relevant beta or beta-bar level
  std::optional<double> gamma;    // inflation, > 0 where required
  std::optional<double> b_dens;   // expected sup of the conditional density
  std::optional<double> epsilon;  // tail-stability pair
  std::optional<double> nu;
};

struct BoundReport {
  double threshold = 0.0;
  double failure_prob = 0.0;
  bool vacuous = false;  // threshold >= 1 or failure_prob >= 1
  // For the tail-stability variants at inflation 2*epsilon: the inflation
  // the guarantee applies to.
  std::optional<double> implied_inflation;
  BoundInputs inputs;
};

enum class Theorem {
  split,
  jplus,
  jplus_uninflated,
  full_conformal,
  alt_jplus,
  alt_jplus_uninflated,
  alt_full_conformal,
};

const char* theorem_name(Theorem t);
Theorem parse_theorem(const std::string& text);

// alpha + sqrt(log(1/delta) / (2 n1)), failing with probability delta.
BoundReport bound_split_conformal(double alpha, double delta, std::size_t n1);

// Inflated jackknife+: threshold adds 3 sqrt(log(1/delta)/(2 min{n,m})) and
// 2 (2 beta / gamma)^{1/3}; failure is 3 delta + (2 beta / gamma)^{1/3}.
BoundReport bound_jplus_inflated(const BoundInputs& in);

// Uninflated jackknife+ under a bounded conditional density: the stability
// term becomes 4 (2 B_dens beta)^{1/4} and failure 3 delta + (...)^{1/4}.
BoundReport bound_jplus_uninflated(const BoundInputs& in);

// Inflated full conformal; formula identical to the inflated jackknife+,
// evaluated at beta^in_{m-1,n+1}.
BoundReport bound_full_conformal(const BoundInputs& in);

enum class AlternativeKind { jplus, jplus_uninflated, full_conformal };

// Tail-stability ((epsilon, nu)) versions. The inflated variants hold at
// inflation 2*epsilon with stability term 2 (2 nu)^{1/3}; the uninflated
// jackknife+ variant adds 4 B_dens epsilon to the threshold.
BoundReport bound_alternative(const BoundInputs& in, AlternativeKind which);

BoundReport evaluate_bound(Theorem theorem, const BoundInputs& in);

// Finite-n schedule along the asymptotic constructions: given a 1-stability
// level b_n and inflation gamma_n (or density level B_n for the uninflated
// variant), reports the m_n, epsilon_n, delta_n the proofs choose. No limit
// is computed; this just evaluates the explicit finite-n expressions.
struct AsymptoticPoint {
  std::size_t n = 0;
  std::size_t m = 0;
  double epsilon = 0.0;
  double delta = 0.0;
};

AsymptoticPoint asymptotic_jplus_schedule(std::size_t n, double b_n, double gamma_n);
AsymptoticPoint asymptotic_jplus_uninflated_schedule(std::size_t n, double b_n, double dens_n);

// Plumbing: evaluates `theorem` on each candidate and returns the index of
// the non-vacuous report with the smallest threshold (ties: smaller failure
// probability, then earlier candidate). Falls back to the smallest threshold
// overall when every candidate is vacuous.
std::size_t best_bound_index(Theorem theorem, const std::vector<BoundInputs>& candidates);

}  // namespace stabcp

#endif  // STABCP_GUARANTEES_HPP
