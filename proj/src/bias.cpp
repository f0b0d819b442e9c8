#include "debias/bias.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "debias/errors.hpp"

namespace debias {

namespace {

// Welford accumulator over vectors, one cell per rank.
struct RunningMoments {
  explicit RunningMoments(int p) : mean(Eigen::VectorXd::Zero(p)), m2(Eigen::VectorXd::Zero(p)) {}

  void add(const Eigen::VectorXd& x) {
    ++count;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(x - mean);
  }

  Eigen::VectorXd standard_error() const {
    if (count < 2) return Eigen::VectorXd::Zero(mean.size());
    return (m2 / static_cast<double>(count - 1)).cwiseSqrt() / std::sqrt(static_cast<double>(count));
  }

  Eigen::VectorXd mean, m2;
  long count = 0;
};

// rank-k gaps of one estimate draw against a reference vector indexed by the
// draw's own ranking permutation
void rank_gaps(const Eigen::VectorXd& draw, const Eigen::VectorXd& reference, Eigen::VectorXd& out) {
  const RankedEstimates r = rank_values(draw);
  const int p = static_cast<int>(draw.size());
  out.resize(p);
  for (int k = 0; k < p; ++k) out(k) = r.sorted_values(k) - reference(r.order[static_cast<std::size_t>(k)]);
}

EstimateVector statistic_with_redraw(const PreparedDataModel& prepared, DataMatrix& buffer,
                                     const StatisticSpec& statistic, const SeedPlan& draw_plan) {
  RandomStream rs(draw_plan);
  prepared.generate_into(buffer, rs);
  try {
    return compute_statistic(buffer, statistic);
  } catch (const DegenerateVariance&) {
    RandomStream retry(draw_plan.salt(1));
    prepared.generate_into(buffer, retry);
    return compute_statistic(buffer, statistic);  // second failure propagates
  }
}

std::vector<int> resample_rows(const std::vector<int>& pool, RandomStream& rs) {
  std::vector<int> rows(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    rows[i] = pool[static_cast<std::size_t>(rs.below(pool.size()))];
  }
  return rows;
}

}  // namespace

BootstrapEnsemble parametric_bootstrap(const DataMatrix& d, const DataModel& model,
                                       const StatisticSpec& statistic, int B, const SeedPlan& plan) {
  if (B < 1) throw InvalidArgument("bootstrap needs B >= 1");
  if (model.p() != d.p()) throw LengthMismatch("model feature count does not match data");
  const bool grouped = statistic.kind == StatisticKind::TwoSampleT;
  if (grouped) {
    if (model.parts.size() != 2) throw InvalidModel("two-sample statistic needs control+case model parts");
    if (model.parts[0].rows != d.group_count(Group::Control) ||
        model.parts[1].rows != d.group_count(Group::Case)) {
      throw InvalidModel("model group sizes must match the original data");
    }
  } else {
    if (model.parts.size() != 1) throw InvalidModel("one-sample statistic needs a single model part");
    if (model.parts[0].rows != d.n()) throw InvalidModel("model row count must match the original data");
  }

  PreparedDataModel prepared(model);
  DataMatrix buffer = prepared.make_empty();
  BootstrapEnsemble ens;
  ens.origin = BootstrapOrigin::Parametric;
  ens.replicates.resize(B, d.p());
  for (int b = 0; b < B; ++b) {
    try {
      const EstimateVector est = statistic_with_redraw(prepared, buffer, statistic, plan.draw(static_cast<std::uint64_t>(b)));
      ens.replicates.row(b) = est.values.transpose();
    } catch (const Error& e) {
      throw Error("parametric bootstrap replicate " + std::to_string(b) + ": " + e.what());
    }
  }
  return ens;
}

BootstrapEnsemble nonparametric_bootstrap(const DataMatrix& d, const StatisticSpec& statistic, int B,
                                          const SeedPlan& plan) {
  if (B < 1) throw InvalidArgument("bootstrap needs B >= 1");
  const bool grouped = statistic.kind == StatisticKind::TwoSampleT;
  std::vector<std::vector<int>> pools;
  if (grouped) {
    if (!d.has_groups()) throw MissingGroup("two-sample statistic needs group labels");
    pools.push_back(d.rows_in_group(Group::Control));
    pools.push_back(d.rows_in_group(Group::Case));
    for (const auto& pool : pools) {
      if (pool.size() < 2) throw InvalidArgument("nonparametric bootstrap needs at least 2 rows per group");
    }
  } else {
    pools.emplace_back(d.n());
    std::iota(pools.back().begin(), pools.back().end(), 0);
    if (pools.back().size() < 2) throw InvalidArgument("nonparametric bootstrap needs at least 2 rows");
  }

  auto resample = [&](const SeedPlan& draw_plan) {
    RandomStream rs(draw_plan);
    std::vector<int> rows;
    for (const auto& pool : pools) {
      std::vector<int> part = resample_rows(pool, rs);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    return d.take_rows(rows);
  };

  BootstrapEnsemble ens;
  ens.origin = BootstrapOrigin::Nonparametric;
  ens.replicates.resize(B, d.p());
  for (int b = 0; b < B; ++b) {
    const SeedPlan draw_plan = plan.draw(static_cast<std::uint64_t>(b));
    try {
      EstimateVector est;
      try {
        est = compute_statistic(resample(draw_plan), statistic);
      } catch (const DegenerateVariance&) {
        est = compute_statistic(resample(draw_plan.salt(1)), statistic);
      }
      ens.replicates.row(b) = est.values.transpose();
    } catch (const Error& e) {
      throw Error("nonparametric bootstrap replicate " + std::to_string(b) + ": " + e.what());
    }
  }
  return ens;
}

BiasVector estimate_bias(const BootstrapEnsemble& ensemble, const EstimateVector& original) {
  if (ensemble.p() != original.size()) throw LengthMismatch("ensemble and original estimate lengths differ");
  if (ensemble.B() < 1) throw InvalidArgument("empty ensemble");
  RunningMoments acc(ensemble.p());
  Eigen::VectorXd gaps;
  for (int b = 0; b < ensemble.B(); ++b) {
    rank_gaps(ensemble.replicates.row(b).transpose(), original.values, gaps);
    acc.add(gaps);
  }
  BiasVector bias;
  bias.values = acc.mean;
  bias.se = acc.standard_error();
  bias.method = ensemble.origin == BootstrapOrigin::Parametric ? BiasMethod::BootstrapParametric
                                                               : BiasMethod::BootstrapNonparametric;
  bias.B = ensemble.B();
  return bias;
}

EstimateVector adjust(const EstimateVector& original, const BiasVector& bias) {
  if (bias.size() != original.size()) throw LengthMismatch("bias and estimate lengths differ");
  const RankedEstimates r = rank(original);
  EstimateVector out;
  out.statistic = original.statistic;
  out.kind = (bias.method == BiasMethod::OracleCor || bias.method == BiasMethod::OracleUncor)
                 ? EstimateKind::OracleAdjusted
                 : EstimateKind::Adjusted;
  out.values.resize(original.size());
  for (int k = 0; k < original.size(); ++k) {
    out.values(r.order[static_cast<std::size_t>(k)]) = r.sorted_values(k) - bias.values(k);
  }
  return out;
}

BiasVector oracle_bias(const Eigen::VectorXd& truth, const DataModel& model, const StatisticSpec& statistic,
                       int n_mc, const SeedPlan& plan, BiasMethod tag) {
  if (n_mc < 2) throw InvalidArgument("oracle bias needs n_mc >= 2");
  if (model.p() != truth.size()) throw LengthMismatch("truth length does not match model");
  PreparedDataModel prepared(model);
  DataMatrix buffer = prepared.make_empty();
  RunningMoments acc(prepared.p());
  Eigen::VectorXd gaps;
  for (int m = 0; m < n_mc; ++m) {
    const EstimateVector est =
        statistic_with_redraw(prepared, buffer, statistic, plan.draw(static_cast<std::uint64_t>(m)));
    rank_gaps(est.values, truth, gaps);
    acc.add(gaps);
  }
  BiasVector bias;
  bias.values = acc.mean;
  bias.se = acc.standard_error();
  bias.method = tag;
  bias.B = n_mc;
  return bias;
}

}  // namespace debias
