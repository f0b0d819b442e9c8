#include "debias/randgen.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "debias/errors.hpp"

namespace debias {

namespace {

void check_positive_definite(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(std::string(what) + " is not positive definite");
}

Eigen::MatrixXd block_ar(int p, int block_size, double base) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  const int blocks = p / block_size;
  for (int b = 0; b < blocks; ++b) {
    const int off = b * block_size;
    for (int i = 0; i < block_size; ++i) {
      for (int j = 0; j < block_size; ++j) {
        m(off + i, off + j) = std::pow(base, std::abs(i - j));
      }
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXd build_correlation(const CorrelationSpec& spec, int p) {
  if (p < 1) throw InvalidArgument("correlation dimension must be positive");
  Eigen::MatrixXd m;
  switch (spec.kind) {
    case CorrelationKind::Identity:
      m = Eigen::MatrixXd::Identity(p, p);
      break;
    case CorrelationKind::Equicorrelation: {
      const double lo = p > 1 ? -1.0 / (p - 1) : -1.0;
      if (spec.rho <= lo || spec.rho >= 1.0) {
        throw InvalidRho("equicorrelation rho must lie in (-1/(p-1), 1)");
      }
      m = Eigen::MatrixXd::Constant(p, p, spec.rho);
      m.diagonal().setOnes();
      break;
    }
    case CorrelationKind::BlockAR:
    case CorrelationKind::NegativeBlockAR: {
      if (spec.rho <= -1.0 || spec.rho >= 1.0) throw InvalidRho("block AR rho must lie in (-1, 1)");
      if (spec.block_size < 1) throw BlockMismatch("block_size must be positive");
      if (p % spec.block_size != 0) {
        throw BlockMismatch("p = " + std::to_string(p) + " is not divisible by block_size = " +
                            std::to_string(spec.block_size));
      }
      const double base = spec.kind == CorrelationKind::BlockAR ? spec.rho : -spec.rho;
      m = block_ar(p, spec.block_size, base);
      break;
    }
    case CorrelationKind::Explicit: {
      if (!spec.explicit_matrix) throw InvalidArgument("explicit correlation matrix missing");
      m = *spec.explicit_matrix;
      if (m.rows() != p || m.cols() != p) throw InvalidArgument("explicit correlation matrix has wrong shape");
      if (!m.isApprox(m.transpose(), 1e-12)) throw InvalidArgument("explicit correlation matrix is not symmetric");
      for (int i = 0; i < p; ++i) {
        if (std::abs(m(i, i) - 1.0) > 1e-12) throw InvalidArgument("explicit correlation matrix diagonal must be 1");
      }
      break;
    }
  }
  check_positive_definite(m, "correlation matrix");
  return m;
}

GenerativeModel GenerativeModel::mvn(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  GenerativeModel m;
  m.family = Family::MVN;
  m.mean = std::move(mean);
  m.scale = std::move(covariance);
  return m;
}

GenerativeModel GenerativeModel::mvt(Eigen::VectorXd mean, Eigen::MatrixXd scale, double df) {
  GenerativeModel m;
  m.family = Family::MVT;
  m.mean = std::move(mean);
  m.scale = std::move(scale);
  m.df = df;
  return m;
}

GenerativeModel GenerativeModel::independent(Eigen::VectorXd mean, const Eigen::VectorXd& variances) {
  GenerativeModel m;
  m.family = Family::IndependentNormal;
  m.mean = std::move(mean);
  m.scale = variances.asDiagonal();
  return m;
}

PreparedModel::PreparedModel(const GenerativeModel& model)
    : family_(model.family), mean_(model.mean), df_(model.df) {
  if (model.scale.rows() != model.mean.size() || model.scale.cols() != model.mean.size()) {
    throw InvalidModel("scale matrix shape does not match mean length");
  }
  switch (family_) {
    case Family::IndependentNormal: {
      for (int i = 0; i < model.scale.rows(); ++i) {
        for (int j = 0; j < model.scale.cols(); ++j) {
          if (i != j && model.scale(i, j) != 0.0) {
            throw InvalidModel("independent-normal scale must be diagonal");
          }
        }
      }
      const Eigen::VectorXd var = model.scale.diagonal();
      if ((var.array() <= 0.0).any()) throw NotPositiveDefinite("independent-normal variances must be positive");
      sd_ = var.array().sqrt();
      break;
    }
    case Family::MVT:
      if (df_ <= 2.0) throw InvalidDf("multivariate t requires df > 2 so the covariance exists");
      [[fallthrough]];
    case Family::MVN: {
      Eigen::LLT<Eigen::MatrixXd> llt(model.scale);
      if (llt.info() != Eigen::Success) throw NotPositiveDefinite("scale matrix is not positive definite");
      chol_lower_ = llt.matrixL();
      break;
    }
  }
}

void PreparedModel::sample_rows(Eigen::Ref<Eigen::MatrixXd> out, RandomStream& rs) const {
  const Eigen::Index n = out.rows();
  const Eigen::Index p = out.cols();
  if (p != mean_.size()) throw LengthMismatch("sample buffer width does not match model");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) out(i, j) = rs.normal();
  }
  switch (family_) {
    case Family::IndependentNormal:
      out = out.array().rowwise() * sd_.transpose().array();
      break;
    case Family::MVN:
      out = out * chol_lower_.transpose();
      break;
    case Family::MVT: {
      out = out * chol_lower_.transpose();
      for (Eigen::Index i = 0; i < n; ++i) {
        out.row(i) /= std::sqrt(rs.chi_square(df_) / df_);
      }
      break;
    }
  }
  out.rowwise() += mean_.transpose();
}

DataModel DataModel::single(GenerativeModel model, int rows) {
  DataModel d;
  d.parts.push_back({std::move(model), rows});
  return d;
}

DataModel DataModel::two_sample(GenerativeModel control, int n_control, GenerativeModel case_, int n_case) {
  DataModel d;
  d.parts.push_back({std::move(control), n_control});
  d.parts.push_back({std::move(case_), n_case});
  return d;
}

int DataModel::total_rows() const {
  int t = 0;
  for (const Part& part : parts) t += part.rows;
  return t;
}

int DataModel::p() const { return parts.empty() ? 0 : parts.front().model.p(); }

PreparedDataModel::PreparedDataModel(const DataModel& model) {
  if (model.parts.empty() || model.parts.size() > 2) {
    throw InvalidModel("data model must have one part or control+case parts");
  }
  p_ = model.parts.front().model.p();
  for (const DataModel::Part& part : model.parts) {
    if (part.rows < 1) throw InvalidModel("data model part needs at least one row");
    if (part.model.p() != p_) throw InvalidModel("data model parts disagree on feature count");
    parts_.emplace_back(PreparedModel(part.model), part.rows);
    total_rows_ += part.rows;
  }
  grouped_ = parts_.size() == 2;
}

DataMatrix PreparedDataModel::make_empty() const {
  DataMatrix d;
  d.values.resize(total_rows_, p_);
  if (grouped_) {
    d.groups.assign(static_cast<std::size_t>(total_rows_), Group::Control);
    for (int i = parts_[0].second; i < total_rows_; ++i) d.groups[static_cast<std::size_t>(i)] = Group::Case;
  }
  return d;
}

void PreparedDataModel::generate_into(DataMatrix& out, RandomStream& rs) const {
  if (out.values.rows() != total_rows_ || out.values.cols() != p_) {
    throw LengthMismatch("destination shape does not match data model");
  }
  int row = 0;
  for (const auto& [model, rows] : parts_) {
    model.sample_rows(out.values.middleRows(row, rows), rs);
    row += rows;
  }
}

DataMatrix PreparedDataModel::generate(RandomStream& rs) const {
  DataMatrix d = make_empty();
  generate_into(d, rs);
  return d;
}

DataMatrix sample_mvn(const GenerativeModel& model, int n, const SeedPlan& plan) {
  if (model.family != Family::MVN) throw InvalidModel("sample_mvn requires an MVN model");
  if (n < 1) throw InvalidArgument("sample size must be positive");
  PreparedDataModel prepared(DataModel::single(model, n));
  RandomStream rs(plan);
  return prepared.generate(rs);
}

DataMatrix sample_mvt(const GenerativeModel& model, int n, const SeedPlan& plan) {
  if (model.family != Family::MVT) throw InvalidModel("sample_mvt requires an MVT model");
  if (n < 1) throw InvalidArgument("sample size must be positive");
  PreparedDataModel prepared(DataModel::single(model, n));
  RandomStream rs(plan);
  return prepared.generate(rs);
}

}  // namespace debias
