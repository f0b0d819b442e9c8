#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "debias/data.hpp"
#include "debias/random.hpp"
#include "debias/stats.hpp"

namespace debias {

/// Feature indices of the k smallest and k largest unadjusted estimates.
struct ExtremeSelection {
  int k = 0;
  std::vector<int> indices;  // k smallest (ascending rank) then k largest
};

ExtremeSelection select_extremes(const EstimateVector& unadjusted, int k);

/// Relative MSE over the selection: sum (adjusted - truth)^2 divided by
/// sum (unadjusted - truth)^2. Below one means the adjustment helped.
double rmse(const Eigen::VectorXd& adjusted, const Eigen::VectorXd& unadjusted, const Eigen::VectorXd& truth,
            const ExtremeSelection& sel);

/// Stratified 50/50 split within each group label (whole data when
/// unlabeled); odd counts leave the extra row in the training half.
std::pair<DataMatrix, DataMatrix> split_train_test(const DataMatrix& d, const SeedPlan& plan);

/// Sum of squared differences between train-adjusted and test-unadjusted
/// estimates over a selection chosen from the training data.
double test_ssd(const EstimateVector& train_adjusted, const EstimateVector& test_unadjusted,
                const ExtremeSelection& sel);

struct EvaluationReport {
  std::string scenario;
  std::string method;
  std::string metric;  // "rmse" or "test_ssd"
  double mean = 0.0;
  double standard_error = 0.0;
  int replicates = 0;
};

/// Mean and sd/sqrt(count) standard error of per-replicate metric values.
EvaluationReport aggregate(const std::string& scenario, const std::string& method, const std::string& metric,
                           const std::vector<double>& per_replicate);

}  // namespace debias
