#pragma once

#include <Eigen/Dense>

#include "debias/data.hpp"
#include "debias/random.hpp"
#include "debias/randgen.hpp"
#include "debias/stats.hpp"

namespace debias {

enum class BiasMethod { BootstrapParametric, BootstrapNonparametric, OracleCor, OracleUncor };

/// Per-rank selection bias: values(k) estimates the expected gap between the
/// (k+1)-th order statistic of the estimates and the true effect size of the
/// feature holding that rank. se holds the Monte Carlo standard error per rank.
struct BiasVector {
  Eigen::VectorXd values;
  Eigen::VectorXd se;
  BiasMethod method = BiasMethod::BootstrapParametric;
  int B = 0;

  int size() const { return static_cast<int>(values.size()); }
};

enum class BootstrapOrigin { Parametric, Nonparametric };

/// B resampled estimate vectors, one row per bootstrap dataset.
struct BootstrapEnsemble {
  Eigen::MatrixXd replicates;  // B x p
  BootstrapOrigin origin = BootstrapOrigin::Parametric;

  int B() const { return static_cast<int>(replicates.rows()); }
  int p() const { return static_cast<int>(replicates.cols()); }
};

/// Draws B datasets from the fitted generative model and reduces each to
/// unadjusted estimates. The model is fitted by the caller; per-group sample
/// sizes in the model must match the original data. A replicate whose
/// statistic degenerates (zero-variance feature) is redrawn once on a fresh
/// stream, then fails.
BootstrapEnsemble parametric_bootstrap(const DataMatrix& d, const DataModel& model,
                                       const StatisticSpec& statistic, int B, const SeedPlan& plan);

/// Resamples observation rows with replacement (within each group for grouped
/// data, preserving group sizes) and reduces each resample to estimates.
BootstrapEnsemble nonparametric_bootstrap(const DataMatrix& d, const StatisticSpec& statistic, int B,
                                          const SeedPlan& plan);

/// Per-rank bias from an ensemble: averages, over replicates, the difference
/// between the k-th order statistic of the replicate and the original
/// estimate of the feature holding rank k in that replicate.
BiasVector estimate_bias(const BootstrapEnsemble& ensemble, const EstimateVector& original);

/// Rank-wise bias subtraction, reported in original feature order: the
/// feature holding rank k receives sorted(original)[k] - bias[k].
EstimateVector adjust(const EstimateVector& original, const BiasVector& bias);

/// Monte Carlo selection bias under a known truth: draws fresh datasets from
/// the model, reduces each to estimates, and averages the per-rank gap to the
/// true effect sizes. Pass the independence version of the model (and the
/// OracleUncor tag) for the uncorrelated-oracle variant.
BiasVector oracle_bias(const Eigen::VectorXd& truth, const DataModel& model, const StatisticSpec& statistic,
                       int n_mc, const SeedPlan& plan, BiasMethod tag = BiasMethod::OracleCor);

}  // namespace debias
