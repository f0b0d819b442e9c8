#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "debias/data.hpp"
#include "debias/random.hpp"

namespace debias {

enum class CorrelationKind { Identity, Equicorrelation, BlockAR, NegativeBlockAR, Explicit };

struct CorrelationSpec {
  CorrelationKind kind = CorrelationKind::Identity;
  double rho = 0.0;
  int block_size = 0;                           // block kinds only
  std::optional<Eigen::MatrixXd> explicit_matrix;  // Explicit only
};

/// Materializes the p x p correlation matrix. The result is symmetric with
/// unit diagonal and verified positive definite (Cholesky).
/// Equicorrelation: constant rho off-diagonal. BlockAR: rho^|i-j| within each
/// block, zero across blocks. NegativeBlockAR: (-rho)^|i-j| within blocks.
Eigen::MatrixXd build_correlation(const CorrelationSpec& spec, int p);

enum class Family { MVN, MVT, IndependentNormal };

/// Data-generating distribution for one set of i.i.d. observation rows.
/// scale is a covariance matrix for MVN/IndependentNormal and the scale
/// matrix of a multivariate t for MVT (implied covariance df/(df-2) * scale).
struct GenerativeModel {
  Family family = Family::MVN;
  Eigen::VectorXd mean;
  Eigen::MatrixXd scale;
  double df = 0.0;  // MVT only

  static GenerativeModel mvn(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
  static GenerativeModel mvt(Eigen::VectorXd mean, Eigen::MatrixXd scale, double df);
  /// Diagonal covariance from a per-feature variance vector.
  static GenerativeModel independent(Eigen::VectorXd mean, const Eigen::VectorXd& variances);

  int p() const { return static_cast<int>(mean.size()); }
};

/// Validated and factorized sampler for one model. Construction performs the
/// Cholesky factorization once; sampling is then pure given a stream.
class PreparedModel {
 public:
  explicit PreparedModel(const GenerativeModel& model);

  int p() const { return static_cast<int>(mean_.size()); }

  /// Fills every row of `out` with an independent draw.
  void sample_rows(Eigen::Ref<Eigen::MatrixXd> out, RandomStream& rs) const;

 private:
  Family family_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_lower_;  // MVN / MVT
  Eigen::VectorXd sd_;          // IndependentNormal fast path
  double df_ = 0.0;
};

/// Blueprint for a full dataset: one part for ungrouped data, or a
/// control part followed by a case part. Row counts are fixed so grouped
/// statistics keep their per-group sample sizes.
struct DataModel {
  struct Part {
    GenerativeModel model;
    int rows = 0;
  };
  std::vector<Part> parts;

  static DataModel single(GenerativeModel model, int rows);
  static DataModel two_sample(GenerativeModel control, int n_control, GenerativeModel case_, int n_case);

  int total_rows() const;
  int p() const;
};

/// Factorized DataModel; reusable across many draws.
class PreparedDataModel {
 public:
  explicit PreparedDataModel(const DataModel& model);

  /// Draws a whole dataset. `out.values` must already have the right shape
  /// (total_rows x p); labels are written only when the model is grouped.
  void generate_into(DataMatrix& out, RandomStream& rs) const;

  /// Convenience allocating version.
  DataMatrix generate(RandomStream& rs) const;

  /// Allocates a correctly shaped destination (values + labels).
  DataMatrix make_empty() const;

  int total_rows() const { return total_rows_; }
  int p() const { return p_; }

 private:
  std::vector<std::pair<PreparedModel, int>> parts_;
  int total_rows_ = 0;
  int p_ = 0;
  bool grouped_ = false;
};

/// n i.i.d. rows from an MVN model, deterministic under the plan.
DataMatrix sample_mvn(const GenerativeModel& model, int n, const SeedPlan& plan);

/// n i.i.d. rows from a multivariate t model (Gaussian draw scaled by a
/// per-row sqrt(chi-square_df / df)); requires df > 2.
DataMatrix sample_mvt(const GenerativeModel& model, int n, const SeedPlan& plan);

}  // namespace debias
