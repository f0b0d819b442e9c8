#include <doctest.h>

#include <cmath>

#include "debias/random.hpp"

using namespace debias;

TEST_CASE("identical seed plans reproduce the same sequence") {
  SeedPlan plan{42, {1, 2, 3, 0}};
  RandomStream a(plan);
  RandomStream b(plan);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("stream components change the sequence") {
  SeedPlan plan{42, {}};
  RandomStream base(plan);
  RandomStream purpose(plan.purpose(1));
  RandomStream rep(plan.replicate(1));
  RandomStream draw(plan.draw(1));
  RandomStream salt(plan.salt(1));
  const double x = base.normal();
  CHECK(x != purpose.normal());
  CHECK(x != rep.normal());
  CHECK(x != draw.normal());
  CHECK(x != salt.normal());
}

TEST_CASE("uniform01 stays in (0, 1]") {
  RandomStream rs(SeedPlan{7, {}});
  for (int i = 0; i < 10000; ++i) {
    const double u = rs.uniform01();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("normal moments") {
  RandomStream rs(SeedPlan{11, {}});
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rs.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("chi-square mean and variance") {
  RandomStream rs(SeedPlan{13, {}});
  const double df = 10.0;
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rs.chi_square(df);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(df).epsilon(0.01));       // E = df
  CHECK(var == doctest::Approx(2.0 * df).epsilon(0.05));  // Var = 2 df
}

TEST_CASE("below covers the range without bias") {
  RandomStream rs(SeedPlan{17, {}});
  const std::uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++counts[rs.below(n)];
  for (std::uint64_t k = 0; k < n; ++k) {
    CHECK(counts[k] > draws / static_cast<int>(n) - 500);
    CHECK(counts[k] < draws / static_cast<int>(n) + 500);
  }
}
