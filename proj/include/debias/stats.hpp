#pragma once

#include <Eigen/Dense>
#include <vector>

#include "debias/data.hpp"

namespace debias {

enum class EstimateKind { Unadjusted, Adjusted, OracleAdjusted };
enum class StatisticKind { OneSampleT, TwoSampleT, OneSampleZ };

/// p effect-size estimates with provenance.
struct EstimateVector {
  Eigen::VectorXd values;
  EstimateKind kind = EstimateKind::Unadjusted;
  StatisticKind statistic = StatisticKind::OneSampleT;

  int size() const { return static_cast<int>(values.size()); }
};

/// Ascending order statistics plus the permutation mapping rank to source
/// index: order[k] is the (0-based) index of the k-th smallest value.
struct RankedEstimates {
  std::vector<int> order;
  Eigen::VectorXd sorted_values;
};

struct SummaryStats {
  Eigen::VectorXd mean;  // whole matrix
  Eigen::VectorXd sd;    // n-1 denominator
  // grouped data only:
  Eigen::VectorXd mean_control, sd_control;
  Eigen::VectorXd mean_case, sd_case;
  Eigen::VectorXd pooled_sd;
};

/// Which statistic reduces a dataset to unadjusted estimates. sigma is the
/// known per-feature standard deviation, used by OneSampleZ only.
struct StatisticSpec {
  StatisticKind kind = StatisticKind::OneSampleT;
  Eigen::VectorXd sigma;

  static StatisticSpec one_sample_t() { return {StatisticKind::OneSampleT, {}}; }
  static StatisticSpec two_sample_t() { return {StatisticKind::TwoSampleT, {}}; }
  static StatisticSpec one_sample_z(Eigen::VectorXd sigma) {
    return {StatisticKind::OneSampleZ, std::move(sigma)};
  }
};

SummaryStats summarize(const DataMatrix& d);

/// sqrt(n) * mean / sd per feature (n-1 denominator sd).
EstimateVector one_sample_t(const DataMatrix& d);

/// (case mean - control mean) / (pooled sd * sqrt(1/n1 + 1/n2)).
EstimateVector two_sample_t(const DataMatrix& d);

/// sqrt(n) * mean / sigma with the true sigma supplied.
EstimateVector one_sample_z(const DataMatrix& d, const Eigen::VectorXd& sigma);

EstimateVector compute_statistic(const DataMatrix& d, const StatisticSpec& spec);

/// Stable ascending ranking; ties keep the smaller source index first.
RankedEstimates rank(const EstimateVector& e);
RankedEstimates rank_values(const Eigen::VectorXd& values);

/// Unbiased sample covariance plus ridge * I.
Eigen::MatrixXd sample_covariance(const DataMatrix& d, double ridge);

/// ((n1-1) S_control + (n2-1) S_case) / (n1+n2-2) + ridge * I.
Eigen::MatrixXd pooled_covariance(const DataMatrix& d, double ridge);

/// Scale-relative ridge default: 1e-3 * mean diagonal of a covariance.
double scaled_ridge(const Eigen::MatrixXd& covariance);

}  // namespace debias
