#include "debias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "debias/errors.hpp"

namespace debias {

namespace {

// degenerate when the spread is at floating-point noise level for the column
bool column_degenerate(double sd, double max_abs) { return sd <= 1e-12 * std::max(1.0, max_abs); }

void column_moments(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& sd) {
  const Eigen::Index n = x.rows();
  mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  sd = (centered.array().square().colwise().sum() / static_cast<double>(n - 1)).sqrt();
}

void require_group_rows(const DataMatrix& d, int min_rows) {
  if (!d.has_groups()) throw MissingGroup("data has no group labels");
  if (d.group_count(Group::Control) < min_rows || d.group_count(Group::Case) < min_rows) {
    throw MissingGroup("each group needs at least " + std::to_string(min_rows) + " rows");
  }
}

}  // namespace

SummaryStats summarize(const DataMatrix& d) {
  if (d.n() < 2) throw InvalidArgument("summary statistics need n >= 2");
  SummaryStats s;
  column_moments(d.values, s.mean, s.sd);
  if (d.has_groups()) {
    require_group_rows(d, 2);
    const Eigen::MatrixXd xc = d.group_values(Group::Control);
    const Eigen::MatrixXd xt = d.group_values(Group::Case);
    column_moments(xc, s.mean_control, s.sd_control);
    column_moments(xt, s.mean_case, s.sd_case);
    const double n1 = static_cast<double>(xc.rows());
    const double n2 = static_cast<double>(xt.rows());
    s.pooled_sd = (((n1 - 1.0) * s.sd_control.array().square() + (n2 - 1.0) * s.sd_case.array().square()) /
                   (n1 + n2 - 2.0))
                      .sqrt();
  }
  return s;
}

EstimateVector one_sample_t(const DataMatrix& d) {
  if (d.n() < 2) throw InvalidArgument("one-sample t needs n >= 2");
  Eigen::VectorXd mean, sd;
  column_moments(d.values, mean, sd);
  const double root_n = std::sqrt(static_cast<double>(d.n()));
  const Eigen::VectorXd max_abs = d.values.cwiseAbs().colwise().maxCoeff();
  EstimateVector e;
  e.statistic = StatisticKind::OneSampleT;
  e.values.resize(d.p());
  for (int j = 0; j < d.p(); ++j) {
    if (column_degenerate(sd(j), max_abs(j))) throw DegenerateVariance(j);
    e.values(j) = root_n * mean(j) / sd(j);
  }
  return e;
}

EstimateVector two_sample_t(const DataMatrix& d) {
  require_group_rows(d, 2);
  const Eigen::MatrixXd xc = d.group_values(Group::Control);
  const Eigen::MatrixXd xt = d.group_values(Group::Case);
  Eigen::VectorXd mean_c, sd_c, mean_t, sd_t;
  column_moments(xc, mean_c, sd_c);
  column_moments(xt, mean_t, sd_t);
  const double n1 = static_cast<double>(xc.rows());
  const double n2 = static_cast<double>(xt.rows());
  const double se_factor = std::sqrt(1.0 / n1 + 1.0 / n2);
  const Eigen::VectorXd max_abs = d.values.cwiseAbs().colwise().maxCoeff();
  EstimateVector e;
  e.statistic = StatisticKind::TwoSampleT;
  e.values.resize(d.p());
  for (int j = 0; j < d.p(); ++j) {
    const double pooled =
        std::sqrt(((n1 - 1.0) * sd_c(j) * sd_c(j) + (n2 - 1.0) * sd_t(j) * sd_t(j)) / (n1 + n2 - 2.0));
    if (column_degenerate(pooled, max_abs(j))) throw DegenerateVariance(j);
    e.values(j) = (mean_t(j) - mean_c(j)) / (pooled * se_factor);
  }
  return e;
}

EstimateVector one_sample_z(const DataMatrix& d, const Eigen::VectorXd& sigma) {
  if (sigma.size() != d.p()) throw LengthMismatch("sigma length does not match feature count");
  if ((sigma.array() <= 0.0).any()) throw NonPositiveSigma("sigma entries must be positive");
  const double root_n = std::sqrt(static_cast<double>(d.n()));
  EstimateVector e;
  e.statistic = StatisticKind::OneSampleZ;
  e.values = root_n * (d.values.colwise().mean().transpose().array() / sigma.array()).matrix();
  return e;
}

EstimateVector compute_statistic(const DataMatrix& d, const StatisticSpec& spec) {
  switch (spec.kind) {
    case StatisticKind::OneSampleT:
      return one_sample_t(d);
    case StatisticKind::TwoSampleT:
      return two_sample_t(d);
    case StatisticKind::OneSampleZ:
      return one_sample_z(d, spec.sigma);
  }
  throw InvalidArgument("unknown statistic");
}

RankedEstimates rank_values(const Eigen::VectorXd& values) {
  const int p = static_cast<int>(values.size());
  RankedEstimates r;
  r.order.resize(static_cast<std::size_t>(p));
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) { return values(a) < values(b); });
  r.sorted_values.resize(p);
  for (int k = 0; k < p; ++k) r.sorted_values(k) = values(r.order[static_cast<std::size_t>(k)]);
  return r;
}

RankedEstimates rank(const EstimateVector& e) { return rank_values(e.values); }

Eigen::MatrixXd sample_covariance(const DataMatrix& d, double ridge) {
  if (d.n() < 2) throw InvalidArgument("sample covariance needs n >= 2");
  if (ridge < 0.0) throw InvalidArgument("ridge must be nonnegative");
  const Eigen::MatrixXd centered = d.values.rowwise() - d.values.colwise().mean();
  Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(d.n() - 1);
  s.diagonal().array() += ridge;
  return s;
}

Eigen::MatrixXd pooled_covariance(const DataMatrix& d, double ridge) {
  require_group_rows(d, 2);
  if (ridge < 0.0) throw InvalidArgument("ridge must be nonnegative");
  const Eigen::MatrixXd xc = d.group_values(Group::Control);
  const Eigen::MatrixXd xt = d.group_values(Group::Case);
  const double n1 = static_cast<double>(xc.rows());
  const double n2 = static_cast<double>(xt.rows());
  const Eigen::MatrixXd cc = xc.rowwise() - xc.colwise().mean();
  const Eigen::MatrixXd ct = xt.rowwise() - xt.colwise().mean();
  Eigen::MatrixXd s = (cc.transpose() * cc + ct.transpose() * ct) / (n1 + n2 - 2.0);
  s.diagonal().array() += ridge;
  return s;
}

double scaled_ridge(const Eigen::MatrixXd& covariance) { return 1e-3 * covariance.diagonal().mean(); }

}  // namespace debias
