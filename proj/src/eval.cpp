#include "debias/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "debias/errors.hpp"

namespace debias {

ExtremeSelection select_extremes(const EstimateVector& unadjusted, int k) {
  const int p = unadjusted.size();
  if (k < 0 || 2 * k > p) throw KTooLarge("selection needs 2k <= p");
  ExtremeSelection sel;
  sel.k = k;
  if (k == 0) return sel;
  const RankedEstimates r = rank(unadjusted);
  sel.indices.reserve(static_cast<std::size_t>(2 * k));
  for (int i = 0; i < k; ++i) sel.indices.push_back(r.order[static_cast<std::size_t>(i)]);
  for (int i = p - k; i < p; ++i) sel.indices.push_back(r.order[static_cast<std::size_t>(i)]);
  return sel;
}

double rmse(const Eigen::VectorXd& adjusted, const Eigen::VectorXd& unadjusted, const Eigen::VectorXd& truth,
            const ExtremeSelection& sel) {
  if (adjusted.size() != unadjusted.size() || adjusted.size() != truth.size()) {
    throw LengthMismatch("rmse input lengths differ");
  }
  double num = 0.0, den = 0.0;
  for (int j : sel.indices) {
    if (j < 0 || j >= adjusted.size()) throw LengthMismatch("selection index out of range");
    num += (adjusted(j) - truth(j)) * (adjusted(j) - truth(j));
    den += (unadjusted(j) - truth(j)) * (unadjusted(j) - truth(j));
  }
  if (den == 0.0) throw ZeroDenominator("unadjusted estimates equal the truth on the selection");
  return num / den;
}

namespace {

void shuffled_split(const std::vector<int>& rows, RandomStream& rs, std::vector<int>& train,
                    std::vector<int>& test) {
  std::vector<int> shuffled = rows;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rs.below(i))]);
  }
  const std::size_t n_train = (shuffled.size() + 1) / 2;  // extra row to training
  train.insert(train.end(), shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
  test.insert(test.end(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
}

}  // namespace

std::pair<DataMatrix, DataMatrix> split_train_test(const DataMatrix& d, const SeedPlan& plan) {
  RandomStream rs(plan);
  std::vector<int> train, test;
  if (d.has_groups()) {
    const std::vector<int> control = d.rows_in_group(Group::Control);
    const std::vector<int> cases = d.rows_in_group(Group::Case);
    if (control.size() < 4 || cases.size() < 4) throw GroupTooSmall("each group needs at least 4 rows to split");
    shuffled_split(control, rs, train, test);
    shuffled_split(cases, rs, train, test);
  } else {
    if (d.n() < 4) throw GroupTooSmall("need at least 4 rows to split");
    std::vector<int> rows(static_cast<std::size_t>(d.n()));
    std::iota(rows.begin(), rows.end(), 0);
    shuffled_split(rows, rs, train, test);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {d.take_rows(train), d.take_rows(test)};
}

double test_ssd(const EstimateVector& train_adjusted, const EstimateVector& test_unadjusted,
                const ExtremeSelection& sel) {
  if (train_adjusted.size() != test_unadjusted.size()) throw LengthMismatch("train/test estimate lengths differ");
  double ssd = 0.0;
  for (int j : sel.indices) {
    if (j < 0 || j >= train_adjusted.size()) throw LengthMismatch("selection index out of range");
    const double diff = train_adjusted.values(j) - test_unadjusted.values(j);
    ssd += diff * diff;
  }
  return ssd;
}

EvaluationReport aggregate(const std::string& scenario, const std::string& method, const std::string& metric,
                           const std::vector<double>& per_replicate) {
  if (per_replicate.empty()) throw InvalidArgument("cannot aggregate zero replicates");
  EvaluationReport r;
  r.scenario = scenario;
  r.method = method;
  r.metric = metric;
  r.replicates = static_cast<int>(per_replicate.size());
  double sum = 0.0;
  for (double v : per_replicate) sum += v;
  r.mean = sum / r.replicates;
  if (r.replicates > 1) {
    double ss = 0.0;
    for (double v : per_replicate) ss += (v - r.mean) * (v - r.mean);
    r.standard_error = std::sqrt(ss / (r.replicates - 1)) / std::sqrt(static_cast<double>(r.replicates));
  }
  return r;
}

}  // namespace debias
