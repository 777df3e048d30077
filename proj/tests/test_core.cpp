#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "stabcp/core.hpp"

using namespace stabcp;

namespace {

// Independent oracle: full sort, then the ceil(tau*n)-th smallest (clamped
// to the minimum at tau = 0), +inf past the end.
ExtendedReal quantile_oracle(std::vector<double> values, double tau) {
  std::sort(values.begin(), values.end());
  const double raw = std::ceil(tau * static_cast<double>(values.size()));
  if (raw > static_cast<double>(values.size())) return ExtendedReal::pos_inf();
  const std::size_t k = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  return ExtendedReal(values[k - 1]);
}

}  // namespace

TEST_CASE("conformal quantile matches the worked examples") {
  CHECK(conformal_quantile(std::vector<double>{5.0}, 1.0) == ExtendedReal(5.0));
  CHECK(conformal_quantile(std::vector<double>{1, 2, 3, 4}, 0.5) == ExtendedReal(2.0));
  CHECK(conformal_quantile(std::vector<double>{1, 2, 3}, 1.2).is_pos_inf());
  // (1-alpha)(1+1/n) with alpha=0.1, n=3 is exactly the overflow regime
  CHECK(conformal_quantile(std::vector<double>{1, 2, 3}, 0.9 * (1.0 + 1.0 / 3.0)).is_pos_inf());
  // tau = 0 clamps to the minimum
  CHECK(conformal_quantile(std::vector<double>{4, 2, 9}, 0.0) == ExtendedReal(2.0));
  CHECK_THROWS_AS(conformal_quantile(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(conformal_quantile(std::vector<double>{1.0}, -0.1), std::invalid_argument);
}

TEST_CASE("conformal quantile agrees with the sort oracle on random multisets") {
  RngStream rng = derive_stream(20240101, 0);
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(50));
    std::vector<double> values(n);
    for (auto& v : values) v = rng.uniform(-10.0, 10.0);
    if (rng.next_unit() < 0.2 && n >= 2) values[1] = values[0];  // force duplicates sometimes
    const double tau = rng.uniform(0.0, 1.5);
    CHECK(conformal_quantile(values, tau) == quantile_oracle(values, tau));
  }
}

TEST_CASE("conformal quantile is monotone in tau and permutation invariant") {
  RngStream rng = derive_stream(7, 0);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(30));
    std::vector<double> values(n);
    for (auto& v : values) v = rng.uniform(-5.0, 5.0);
    const double t1 = rng.uniform(0.0, 1.5);
    const double t2 = rng.uniform(0.0, 1.5);
    const double lo = std::min(t1, t2), hi = std::max(t1, t2);
    CHECK(conformal_quantile(values, lo) <= conformal_quantile(values, hi));

    std::vector<double> shuffled = values;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    }
    CHECK(conformal_quantile(values, t1) == conformal_quantile(shuffled, t1));
  }
}

TEST_CASE("derived streams are deterministic and distinct") {
  RngStream a = derive_stream(42, 7);
  RngStream b = derive_stream(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream s0 = derive_stream(42, 0);
  RngStream s1 = derive_stream(42, 1);
  bool differs = false;
  for (int i = 0; i < 4 && !differs; ++i) differs = s0.next_u64() != s1.next_u64();
  CHECK(differs);
}

TEST_CASE("first draws collide for no pair of 10^4 adjacent seeds") {
  std::set<std::uint64_t> seen;
  for (std::int64_t seed = 0; seed < 10000; ++seed) {
    seen.insert(derive_stream(seed, 0).next_u64());
  }
  CHECK(seen.size() == 10000);
}

TEST_CASE("stream draws look uniform enough for the estimators") {
  RngStream rng = derive_stream(3, 5);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += rng.next_unit();
  CHECK(std::abs(sum / n - 0.5) < 0.005);  // ~25 sigma headroom

  double nsum = 0.0, nsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    nsum += z;
    nsq += z * z;
  }
  CHECK(std::abs(nsum / n) < 0.01);
  CHECK(std::abs(nsq / n - 1.0) < 0.02);
}

TEST_CASE("below() respects its range and hits every residue") {
  RngStream rng = derive_stream(11, 2);
  std::array<int, 7> counts{};
  for (int i = 0; i < 7000; ++i) counts[rng.below(7)]++;
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("extended reals order totally and shift correctly") {
  const ExtendedReal neg = ExtendedReal::neg_inf();
  const ExtendedReal pos = ExtendedReal::pos_inf();
  CHECK(neg < ExtendedReal(-1e308));
  CHECK(ExtendedReal(1e308) < pos);
  CHECK(neg < pos);
  CHECK(ExtendedReal(2.0) < ExtendedReal(3.0));
  CHECK(pos.shifted(-5.0).is_pos_inf());
  CHECK(neg.shifted(5.0).is_neg_inf());
  CHECK((-pos).is_neg_inf());
  CHECK(ExtendedReal(2.0).shifted(0.5) == ExtendedReal(2.5));
  CHECK_THROWS_AS(ExtendedReal(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(pos.value(), std::domain_error);
}

TEST_CASE("intervals contain their endpoints and reject bad bounds") {
  const Interval iv(ExtendedReal(-1.0), ExtendedReal(2.0));
  CHECK(iv.contains(-1.0));
  CHECK(iv.contains(2.0));
  CHECK(!iv.contains(2.0000001));
  CHECK(iv.length() == ExtendedReal(3.0));
  CHECK(Interval::whole_line().contains(1e300));
  CHECK(Interval::whole_line().length().is_pos_inf());
  CHECK(!Interval::empty().contains(0.0));
  CHECK_THROWS_AS(Interval(ExtendedReal(1.0), ExtendedReal(0.0)), std::invalid_argument);
}

TEST_CASE("datasets enforce shape and finiteness") {
  Dataset data;
  data.add({0.0, 1.0}, 2.0);
  CHECK(data.dim() == 2);
  CHECK_THROWS_AS(data.add({0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(data.add({0.0, std::nan("")}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(data.add({0.0, 0.0}, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);

  data.add({0.0, 1.0}, 2.0);  // duplicates are fine
  CHECK(data.size() == 2);
}

TEST_CASE("dataset digest is permutation invariant and content sensitive") {
  Dataset a, b;
  a.add({1.0}, 2.0);
  a.add({3.0}, 4.0);
  a.add({5.0}, 6.0);
  b.add({5.0}, 6.0);
  b.add({1.0}, 2.0);
  b.add({3.0}, 4.0);
  CHECK(a.digest() == b.digest());
  b.add({1.0}, 2.0);
  CHECK(a.digest() != b.digest());
}
