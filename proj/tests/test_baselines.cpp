#include <doctest.h>

#include <cmath>

#include "debias/baselines.hpp"
#include "debias/errors.hpp"
#include "debias/random.hpp"

using namespace debias;

namespace {

EstimateVector estimates(std::initializer_list<double> values) {
  EstimateVector e;
  e.values.resize(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) e.values(i++) = v;
  return e;
}

EstimateVector normal_estimates(int p, double sd, std::uint64_t seed, double mean = 0.0) {
  RandomStream rs(SeedPlan{seed, {}});
  EstimateVector e;
  e.values.resize(p);
  for (int j = 0; j < p; ++j) e.values(j) = mean + sd * rs.normal();
  return e;
}

}  // namespace

TEST_CASE("james-stein on hand-checked vectors") {
  CHECK(james_stein(estimates({0, 0, 0, 0})).values == Eigen::VectorXd::Zero(4));

  const EstimateVector shrunk = james_stein(estimates({2, -2, 2, -2}));
  CHECK(shrunk.values(0) == 1.75);
  CHECK(shrunk.values(1) == -1.75);
  CHECK(shrunk.values(2) == 1.75);
  CHECK(shrunk.values(3) == -1.75);

  // sum of squares below p-2 clips the factor at zero: everything collapses to the mean
  const EstimateVector collapsed = james_stein(estimates({1.1, 0.9, 1.0, 1.0}));
  for (int j = 0; j < 4; ++j) CHECK(collapsed.values(j) == doctest::Approx(1.0));
}

TEST_CASE("james-stein needs at least three features") {
  CHECK_THROWS_AS(james_stein(estimates({1.0, 2.0})), TooFewFeatures);
}

TEST_CASE("james-stein shrinks spread and keeps the argmax") {
  RandomStream rs(SeedPlan{12, {}});
  for (int trial = 0; trial < 25; ++trial) {
    EstimateVector e;
    e.values.resize(40);
    for (int j = 0; j < 40; ++j) e.values(j) = 3.0 * rs.normal();
    const EstimateVector out = james_stein(e);
    const double mean = e.values.mean();
    const double spread_in = (e.values.array() - mean).matrix().norm();
    const double spread_out = (out.values.array() - out.values.mean()).matrix().norm();
    CHECK(spread_out <= spread_in);

    int argmax_in = 0, argmax_out = 0;
    e.values.maxCoeff(&argmax_in);
    out.values.maxCoeff(&argmax_out);
    const double factor = 1.0 - 38.0 / (e.values.array() - mean).square().sum();
    if (factor > 0.0) CHECK(argmax_in == argmax_out);
  }
}

TEST_CASE("density fit rejects degenerate input") {
  EstimateVector flat;
  flat.values = Eigen::VectorXd::Constant(100, 1.25);
  CHECK_THROWS_AS(fit_lindsey(flat), EmptyRange);
}

TEST_CASE("fitted density integrates to the total count") {
  const EstimateVector e = normal_estimates(20000, 1.0, 101);
  const MarginalDensityFit fit = fit_lindsey(e);
  const double width = fit.bin_edges(1) - fit.bin_edges(0);
  double integral = 0.0;
  for (int b = 0; b < fit.counts.size(); ++b) {
    const double center = 0.5 * (fit.bin_edges(b) + fit.bin_edges(b + 1));
    integral += std::exp(fit.log_density(center)) * width;
  }
  CHECK(integral == doctest::Approx(static_cast<double>(e.size()) * width).epsilon(0.01));
}

TEST_CASE("density derivative matches finite differences") {
  const EstimateVector e = normal_estimates(20000, 1.3, 102);
  const MarginalDensityFit fit = fit_lindsey(e);
  const double h = 1e-5;
  const double lo = fit.range_lo() + 0.1, hi = fit.range_hi() - 0.1;
  for (int i = 0; i <= 200; ++i) {
    const double x = lo + (hi - lo) * i / 200.0;
    const double fd = (fit.log_density(x + h) - fit.log_density(x - h)) / (2.0 * h);
    CHECK(std::abs(fit.derivative(x) - fd) < 1e-4);
  }
}

TEST_CASE("IRLS deviance trace is non-increasing") {
  const EstimateVector e = normal_estimates(5000, 1.0, 103, 0.4);
  const MarginalDensityFit fit = fit_lindsey(e);
  REQUIRE(fit.deviance_trace.size() >= 2);
  for (std::size_t i = 1; i < fit.deviance_trace.size(); ++i) {
    CHECK(fit.deviance_trace[i] <= fit.deviance_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("IRLS configuration is validated") {
  const EstimateVector e = normal_estimates(1000, 1.0, 104);
  IrlsConfig cfg;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(fit_lindsey(e, 120, 5, cfg), InvalidArgument);
  cfg = IrlsConfig{};
  cfg.max_iter = 1;  // one halving-guarded step cannot reach tolerance here
  CHECK_THROWS_AS(fit_lindsey(e, 120, 5, cfg), IrlsDiverged);
}

TEST_CASE("standard normal estimates give a flat log-density slope at zero") {
  const EstimateVector e = normal_estimates(100000, 1.0, 105);
  const MarginalDensityFit fit = fit_lindsey(e);
  CHECK(std::abs(fit.derivative(0.0)) < 0.05);
}

TEST_CASE("N(0,2) estimates give slope -x/2 in the bulk") {
  const EstimateVector e = normal_estimates(100000, std::sqrt(2.0), 106);
  const MarginalDensityFit fit = fit_lindsey(e);
  for (double x = -2.0; x <= 2.0; x += 0.25) {
    CHECK(std::abs(fit.derivative(x) - (-x / 2.0)) < 0.05);
  }
}

TEST_CASE("flat fit leaves tweedie a no-op and extremes fall out of range") {
  const EstimateVector e = normal_estimates(2000, 1.0, 107);
  MarginalDensityFit fit = fit_lindsey(e);
  fit.coefficients.tail(fit.coefficients.size() - 1).setZero();  // constant log-density
  const EstimateVector out = tweedie(e, fit);
  for (int j = 0; j < e.size(); ++j) CHECK(out.values(j) == e.values(j));

  EstimateVector shifted = e;
  shifted.values(0) = fit.range_hi() + 1.0;
  CHECK_THROWS_AS(tweedie(shifted, fit), OutOfFitRange);
}

TEST_CASE("tweedie recovers the conjugate posterior slope") {
  // true effects N(0,1), estimates N(effect,1): marginal N(0,2), posterior mean x/2
  RandomStream rs(SeedPlan{108, {}});
  const int p = 20000;
  EstimateVector e;
  e.values.resize(p);
  for (int j = 0; j < p; ++j) {
    const double effect = rs.normal();
    e.values(j) = effect + rs.normal();
  }
  const MarginalDensityFit fit = fit_lindsey(e);
  const EstimateVector adjusted = tweedie(e, fit);
  for (int j = 0; j < p; ++j) {
    if (std::abs(e.values(j)) <= 2.0) {
      CHECK(std::abs(adjusted.values(j) - e.values(j) / 2.0) < 0.1);
    }
  }
}
