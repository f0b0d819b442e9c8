#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "debias/errors.hpp"
#include "debias/eval.hpp"
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

Eigen::VectorXd vec(std::initializer_list<double> values) { return estimates(values).values; }

DataMatrix grouped_rows(int n_control, int n_case, int p, std::uint64_t seed) {
  RandomStream rs(SeedPlan{seed, {}});
  DataMatrix d;
  d.values.resize(n_control + n_case, p);
  for (Eigen::Index i = 0; i < d.values.size(); ++i) d.values.data()[i] = rs.normal();
  d.groups.assign(static_cast<std::size_t>(n_control), Group::Control);
  d.groups.insert(d.groups.end(), static_cast<std::size_t>(n_case), Group::Case);
  return d;
}

}  // namespace

TEST_CASE("select_extremes picks k smallest and k largest") {
  const ExtremeSelection all = select_extremes(estimates({4, 2, 3, 1}), 2);
  std::set<int> got(all.indices.begin(), all.indices.end());
  CHECK(got == std::set<int>{0, 1, 2, 3});

  const ExtremeSelection sel = select_extremes(estimates({3, -1, 0, 5}), 1);
  CHECK(sel.indices == std::vector<int>{1, 3});

  CHECK(select_extremes(estimates({1, 2}), 0).indices.empty());
  CHECK_THROWS_AS(select_extremes(estimates({1, 2, 3}), 2), KTooLarge);
}

TEST_CASE("rmse endpoints and the hand-evaluated case") {
  const ExtremeSelection sel = select_extremes(estimates({1, 2}), 1);
  CHECK(rmse(vec({0, 0}), vec({1, 2}), vec({0, 0}), sel) == 0.0);
  CHECK(rmse(vec({1, 2}), vec({1, 2}), vec({0, 0}), sel) == 1.0);
  CHECK(rmse(vec({0.5, 1}), vec({1, 2}), vec({0, 0}), sel) == doctest::Approx(0.25));
  CHECK_THROWS_AS(rmse(vec({0.5, 1}), vec({0, 0}), vec({0, 0}), sel), ZeroDenominator);
  CHECK_THROWS_AS(rmse(vec({0.5}), vec({1, 2}), vec({0, 0}), sel), LengthMismatch);
}

TEST_CASE("rmse is invariant under joint permutation") {
  RandomStream rs(SeedPlan{61, {}});
  const int p = 12;
  Eigen::VectorXd adj(p), unadj(p), truth(p);
  for (int j = 0; j < p; ++j) {
    truth(j) = rs.normal();
    unadj(j) = truth(j) + rs.normal();
    adj(j) = 0.5 * unadj(j);
  }
  EstimateVector ue;
  ue.values = unadj;
  const double base = rmse(adj, unadj, truth, select_extremes(ue, 3));

  // rotate everything by 5 positions
  Eigen::VectorXd adj2(p), unadj2(p), truth2(p);
  for (int j = 0; j < p; ++j) {
    adj2((j + 5) % p) = adj(j);
    unadj2((j + 5) % p) = unadj(j);
    truth2((j + 5) % p) = truth(j);
  }
  EstimateVector ue2;
  ue2.values = unadj2;
  CHECK(rmse(adj2, unadj2, truth2, select_extremes(ue2, 3)) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("split_train_test is a stratified partition") {
  const DataMatrix d = grouped_rows(4, 4, 3, 62);
  const auto [train, test] = split_train_test(d, SeedPlan{63, {}});
  CHECK(train.group_count(Group::Control) == 2);
  CHECK(train.group_count(Group::Case) == 2);
  CHECK(test.group_count(Group::Control) == 2);
  CHECK(test.group_count(Group::Case) == 2);
}

TEST_CASE("odd group counts put the extra row in training") {
  const DataMatrix d = grouped_rows(5, 4, 2, 64);
  const auto [train, test] = split_train_test(d, SeedPlan{65, {}});
  CHECK(train.group_count(Group::Control) == 3);
  CHECK(test.group_count(Group::Control) == 2);
}

TEST_CASE("split_train_test is deterministic and loses no rows") {
  const DataMatrix d = grouped_rows(9, 7, 2, 66);
  const SeedPlan plan{67, {3, 0, 0, 0}};
  const auto [train1, test1] = split_train_test(d, plan);
  const auto [train2, test2] = split_train_test(d, plan);
  CHECK(train1.values == train2.values);
  CHECK(test1.values == test2.values);
  CHECK(train1.n() + test1.n() == d.n());

  // every original row appears exactly once across the two halves
  std::multiset<double> original, recovered;
  for (int i = 0; i < d.n(); ++i) original.insert(d.values(i, 0));
  for (int i = 0; i < train1.n(); ++i) recovered.insert(train1.values(i, 0));
  for (int i = 0; i < test1.n(); ++i) recovered.insert(test1.values(i, 0));
  CHECK(original == recovered);
}

TEST_CASE("split_train_test rejects tiny groups") {
  const DataMatrix d = grouped_rows(3, 8, 2, 68);
  CHECK_THROWS_AS(split_train_test(d, SeedPlan{69, {}}), GroupTooSmall);
}

TEST_CASE("test_ssd hand cases") {
  ExtremeSelection sel;
  sel.k = 1;
  sel.indices = {0, 1};
  EstimateVector train = estimates({1, 2});
  EstimateVector test = estimates({0, 0});
  CHECK(test_ssd(train, test, sel) == 5.0);
  CHECK(test_ssd(train, train, sel) == 0.0);
  EstimateVector truncated = estimates({1});
  CHECK_THROWS_AS(test_ssd(train, truncated, sel), LengthMismatch);
}

TEST_CASE("test_ssd is nonnegative and zero only on agreement") {
  RandomStream rs(SeedPlan{70, {}});
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 30;
    EstimateVector a, b;
    a.values.resize(p);
    b.values.resize(p);
    for (int j = 0; j < p; ++j) {
      a.values(j) = rs.normal();
      b.values(j) = rs.normal();
    }
    const ExtremeSelection sel = select_extremes(a, 5);
    const double ssd = test_ssd(a, b, sel);
    CHECK(ssd >= 0.0);
    bool agrees = true;
    for (int j : sel.indices) agrees = agrees && a.values(j) == b.values(j);
    CHECK((ssd == 0.0) == agrees);
  }
}

TEST_CASE("aggregate computes the standard error of the mean") {
  const EvaluationReport r = aggregate("s", "m", "rmse", {1.0, 2.0, 3.0, 4.0});
  CHECK(r.mean == doctest::Approx(2.5));
  // sd = sqrt(5/3), se = sd / 2
  CHECK(r.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(r.replicates == 4);
}
