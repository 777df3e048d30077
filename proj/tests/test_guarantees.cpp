#include <doctest.h>

#include <cmath>

#include "stabcp/guarantees.hpp"

using namespace stabcp;

namespace {

BoundInputs reference_inputs() {
  BoundInputs in;
  in.alpha = 0.1;
  in.delta = 0.05;
  in.n = 10000;
  in.m = 10000;
  in.beta = 1e-6;
  return in;
}

}  // namespace

TEST_CASE("inflated jackknife+ bound arithmetic") {
  BoundInputs in = reference_inputs();
  in.gamma = 0.1;
  const BoundReport r = bound_jplus_inflated(in);
  // 0.1 + 3 sqrt(log(20)/20000) + 2 (2e-5)^{1/3}
  CHECK(r.threshold == doctest::Approx(0.1 + 3 * 0.0122385 + 2 * 0.0271442).epsilon(1e-4));
  CHECK(r.failure_prob == doctest::Approx(0.15 + 0.0271442).epsilon(1e-4));
  CHECK(!r.vacuous);

  in.beta = 0.0;
  const BoundReport zero = bound_jplus_inflated(in);
  CHECK(zero.threshold == doctest::Approx(0.1 + 3 * std::sqrt(std::log(20.0) / 20000.0)));
  CHECK(zero.failure_prob == doctest::Approx(0.15));

  in.beta = 1e-6;
  in.gamma = 1e30;  // huge inflation removes the stability term
  CHECK(bound_jplus_inflated(in).threshold ==
        doctest::Approx(zero.threshold).epsilon(1e-6));

  in.gamma.reset();
  CHECK_THROWS_AS(bound_jplus_inflated(in), std::invalid_argument);
}

TEST_CASE("uninflated jackknife+ bound arithmetic") {
  BoundInputs in = reference_inputs();
  in.b_dens = 3.5;
  const BoundReport r = bound_jplus_uninflated(in);
  const double term = std::pow(7e-6, 0.25);
  CHECK(term == doctest::Approx(0.051437).epsilon(1e-4));
  CHECK(r.threshold == doctest::Approx(0.1 + 0.0367156 + 4 * term).epsilon(1e-4));
  CHECK(r.failure_prob == doctest::Approx(0.15 + term).epsilon(1e-4));

  // quadrupling B_dens scales the stability term by sqrt(2)
  BoundInputs in4 = in;
  in4.b_dens = 14.0;
  const double t1 = bound_jplus_uninflated(in).threshold - 0.1 - 0.0367156;
  const double t4 = bound_jplus_uninflated(in4).threshold - 0.1 - 0.0367156;
  CHECK(t4 / t1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));

  in.beta = 0.0;
  CHECK(bound_jplus_uninflated(in).threshold ==
        doctest::Approx(0.1 + 3 * std::sqrt(std::log(20.0) / 20000.0)));
}

TEST_CASE("full conformal bound is arithmetically identical to inflated jackknife+") {
  BoundInputs in = reference_inputs();
  in.gamma = 0.1;
  const BoundReport a = bound_jplus_inflated(in);
  const BoundReport b = bound_full_conformal(in);
  CHECK(a.threshold == b.threshold);
  CHECK(a.failure_prob == b.failure_prob);
}

TEST_CASE("alternative (tail-stability) bounds") {
  BoundInputs in = reference_inputs();
  in.epsilon = 0.01;
  in.nu = 0.0;
  const BoundReport stable = bound_alternative(in, AlternativeKind::jplus);
  CHECK(stable.threshold == doctest::Approx(0.1 + 0.0367156).epsilon(1e-4));
  CHECK(stable.implied_inflation == doctest::Approx(0.02));

  in.nu = 1.0 / 16.0;  // (2 nu)^{1/3} = 1/2 exactly
  const BoundReport vacuous = bound_alternative(in, AlternativeKind::jplus);
  CHECK(vacuous.threshold == doctest::Approx(0.1 + 0.0367156 + 1.0).epsilon(1e-4));
  CHECK(vacuous.vacuous);

  in.nu = 0.001;
  in.b_dens = 2.0;
  const BoundReport with_dens = bound_alternative(in, AlternativeKind::jplus_uninflated);
  const BoundReport without = bound_alternative(in, AlternativeKind::jplus);
  CHECK(with_dens.threshold ==
        doctest::Approx(without.threshold + 4.0 * 2.0 * 0.01).epsilon(1e-6));

  const BoundReport full = bound_alternative(in, AlternativeKind::full_conformal);
  CHECK(full.threshold == without.threshold);

  in.epsilon.reset();
  CHECK_THROWS_AS(bound_alternative(in, AlternativeKind::jplus), std::invalid_argument);
}

TEST_CASE("split conformal bound arithmetic") {
  const BoundReport r = bound_split_conformal(0.1, 0.05, 1000);
  CHECK(r.threshold == doctest::Approx(0.1 + std::sqrt(std::log(20.0) / 2000.0)).epsilon(1e-6));
  CHECK(r.threshold == doctest::Approx(0.13870).epsilon(1e-3));
  CHECK(r.failure_prob == doctest::Approx(0.05));

  // delta = 1 collapses the margin entirely
  CHECK(bound_split_conformal(0.1, 1.0, 1000).threshold == doctest::Approx(0.1));

  CHECK(bound_split_conformal(0.1, 0.05, 2000).threshold <
        bound_split_conformal(0.1, 0.05, 1000).threshold);
}

TEST_CASE("bound evaluators are monotone as the formulas dictate") {
  RngStream rng = derive_stream(55, 0);
  for (int rep = 0; rep < 200; ++rep) {
    BoundInputs in;
    in.alpha = rng.uniform(0.01, 0.5);
    in.delta = rng.uniform(0.01, 0.5);
    in.n = 10 + rng.below(1000);
    in.m = 10 + rng.below(1000);
    in.beta = rng.uniform(0.0, 0.01);
    in.gamma = rng.uniform(0.01, 1.0);
    in.b_dens = rng.uniform(0.1, 5.0);

    BoundInputs larger = in;
    larger.n = in.n * 2;
    larger.m = in.m * 2;
    CHECK(bound_jplus_inflated(larger).threshold <= bound_jplus_inflated(in).threshold);

    BoundInputs more_stable = in;
    more_stable.beta = *in.beta * 0.5;
    CHECK(bound_jplus_inflated(more_stable).threshold <= bound_jplus_inflated(in).threshold);
    CHECK(bound_jplus_uninflated(more_stable).threshold <=
          bound_jplus_uninflated(in).threshold);

    BoundInputs more_inflation = in;
    more_inflation.gamma = *in.gamma * 2.0;
    CHECK(bound_jplus_inflated(more_inflation).threshold <= bound_jplus_inflated(in).threshold);

    BoundInputs thinner = in;
    thinner.b_dens = *in.b_dens * 0.5;
    CHECK(bound_jplus_uninflated(thinner).threshold <= bound_jplus_uninflated(in).threshold);

    BoundInputs tail = in;
    tail.epsilon = rng.uniform(0.0, 0.1);
    tail.nu = rng.uniform(0.0, 0.1);
    BoundInputs tail_worse = tail;
    tail_worse.nu = *tail.nu * 2.0;
    tail_worse.epsilon = *tail.epsilon * 2.0;
    CHECK(bound_alternative(tail, AlternativeKind::jplus).threshold <=
          bound_alternative(tail_worse, AlternativeKind::jplus).threshold);
    CHECK(bound_alternative(tail, AlternativeKind::jplus_uninflated).threshold <=
          bound_alternative(tail_worse, AlternativeKind::jplus_uninflated).threshold);
  }
}

TEST_CASE("vacuity flag fires exactly at the stated conditions") {
  BoundInputs in = reference_inputs();
  in.gamma = 0.1;
  in.delta = 0.34;  // failure 3*0.34 > 1
  CHECK(bound_jplus_inflated(in).vacuous);
  in.delta = 0.05;
  in.beta = 10.0;  // enormous instability
  CHECK(bound_jplus_inflated(in).vacuous);
}

TEST_CASE("asymptotic schedules evaluate the explicit finite-n choices") {
  const AsymptoticPoint p = asymptotic_jplus_schedule(1000, 1e-4, 0.1);
  CHECK(p.m == 32);  // ceil(sqrt(0.1 / 1e-4))
  CHECK(p.epsilon == doctest::Approx(3.0 / std::pow(128.0, 0.25) + 0.8).epsilon(1e-6));
  CHECK(p.delta == doctest::Approx(3.0 * std::exp(-std::sqrt(32.0)) + 0.4).epsilon(1e-6));

  const AsymptoticPoint q = asymptotic_jplus_uninflated_schedule(1000, 1e-4, 4.0);
  CHECK(q.m == 50);  // ceil(1 / sqrt(4e-4))
  const double level = 2.0 * 4.0 * 50.0 * 1e-4;
  CHECK(q.epsilon ==
        doctest::Approx(3.0 / std::pow(4.0 * 50.0, 0.25) + 4.0 * std::pow(level, 0.25)));
  CHECK(q.delta == doctest::Approx(3.0 * std::exp(-std::sqrt(50.0)) + std::pow(level, 0.25)));
}

TEST_CASE("best_bound_index prefers non-vacuous reports with low thresholds") {
  std::vector<BoundInputs> candidates;
  for (double gamma : {1e-9, 0.05, 0.2, 0.8}) {
    BoundInputs in = reference_inputs();
    in.beta = 1e-3;
    in.gamma = gamma;
    candidates.push_back(in);
  }
  // tiny gamma blows up the stability term; enormous gamma is fine for the
  // threshold (the report does not model interval width), so the largest
  // gamma wins
  CHECK(best_bound_index(Theorem::jplus, candidates) == 3);
  CHECK_THROWS_AS(best_bound_index(Theorem::jplus, {}), std::invalid_argument);
}

TEST_CASE("theorem names round-trip") {
  for (Theorem t : {Theorem::split, Theorem::jplus, Theorem::jplus_uninflated,
                    Theorem::full_conformal, Theorem::alt_jplus, Theorem::alt_jplus_uninflated,
                    Theorem::alt_full_conformal}) {
    CHECK(parse_theorem(theorem_name(t)) == t);
  }
  CHECK_THROWS_AS(parse_theorem("bogus"), std::invalid_argument);
}
