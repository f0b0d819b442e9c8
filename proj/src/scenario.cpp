#include <cmath>
#include <cstdio>

#include "debias/baselines.hpp"
#include "debias/errors.hpp"
#include "debias/harness.hpp"
#include "debias/parallel.hpp"

namespace debias {

namespace {

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string correlation_label(CorrelationKind k) {
  switch (k) {
    case CorrelationKind::Identity: return "identity";
    case CorrelationKind::Equicorrelation: return "equicorrelation";
    case CorrelationKind::BlockAR: return "block-ar";
    case CorrelationKind::NegativeBlockAR: return "negative-block-ar";
    case CorrelationKind::Explicit: return "explicit";
  }
  return "?";
}

double resolve_ridge(const Eigen::MatrixXd& cov, const std::optional<double>& ridge) {
  return ridge ? *ridge : scaled_ridge(cov);
}

DataMatrix ungrouped(const Eigen::MatrixXd& values) {
  DataMatrix d;
  d.values = values;
  return d;
}

DataModel fit_independent_model(const DataMatrix& d, bool grouped) {
  const SummaryStats s = summarize(d);
  if (!grouped) {
    return DataModel::single(GenerativeModel::independent(s.mean, s.sd.array().square()), d.n());
  }
  return DataModel::two_sample(
      GenerativeModel::independent(s.mean_control, s.sd_control.array().square()),
      d.group_count(Group::Control),
      GenerativeModel::independent(s.mean_case, s.sd_case.array().square()), d.group_count(Group::Case));
}

GenerativeModel fitted_mvn(const Eigen::MatrixXd& values, const std::optional<double>& ridge) {
  Eigen::MatrixXd s = sample_covariance(ungrouped(values), 0.0);
  s.diagonal().array() += resolve_ridge(s, ridge);
  return GenerativeModel::mvn(values.colwise().mean(), std::move(s));
}

DataModel fit_mvn_model(const DataMatrix& d, bool grouped, const std::optional<double>& ridge) {
  if (!grouped) return DataModel::single(fitted_mvn(d.values, ridge), d.n());
  return DataModel::two_sample(fitted_mvn(d.group_values(Group::Control), ridge),
                               d.group_count(Group::Control),
                               fitted_mvn(d.group_values(Group::Case), ridge), d.group_count(Group::Case));
}

// Shared-covariance misspecification: one covariance for both groups,
// estimated from the stacked rows around the grand mean, so the group mean
// separation leaks into the fitted covariance.
DataModel fit_mvn_pooled_model(const DataMatrix& d, const std::optional<double>& ridge) {
  Eigen::MatrixXd s = sample_covariance(ungrouped(d.values), 0.0);
  s.diagonal().array() += resolve_ridge(s, ridge);
  const Eigen::VectorXd mean_control = d.group_values(Group::Control).colwise().mean();
  const Eigen::VectorXd mean_case = d.group_values(Group::Case).colwise().mean();
  return DataModel::two_sample(GenerativeModel::mvn(mean_control, s), d.group_count(Group::Control),
                               GenerativeModel::mvn(mean_case, s), d.group_count(Group::Case));
}

}  // namespace

EstimateVector apply_bootstrap_method(const std::string& method, const DataMatrix& d,
                                      const EstimateVector& unadjusted, const StatisticSpec& statistic,
                                      const ScenarioConfig& cfg, const SeedPlan& replicate_plan) {
  const bool grouped = statistic.kind == StatisticKind::TwoSampleT;
  if (method == "james-stein") return james_stein(unadjusted);
  if (method == "tweedie") {
    return tweedie(unadjusted, fit_lindsey(unadjusted, cfg.bins, cfg.spline_df, IrlsConfig{}));
  }
  if (method == "nonpara") {
    const BootstrapEnsemble ens =
        nonparametric_bootstrap(d, statistic, cfg.B, replicate_plan.purpose(streams::kNonpara));
    return adjust(unadjusted, estimate_bias(ens, unadjusted));
  }
  DataModel model;
  SeedPlan plan = replicate_plan;
  if (method == "para-uncor") {
    model = fit_independent_model(d, grouped);
    plan = plan.purpose(streams::kParaUncor);
  } else if (method == "para-cor" || method == "para-cor-right") {
    model = fit_mvn_model(d, grouped, cfg.ridge);
    plan = plan.purpose(streams::kParaCor);
  } else if (method == "para-cor-wrong") {
    if (!grouped) throw ConfigError("para-cor-wrong needs a two-sample statistic");
    model = fit_mvn_pooled_model(d, cfg.ridge);
    plan = plan.purpose(streams::kParaCorWrong);
  } else {
    throw ConfigError("method '" + method + "' is not a bootstrap or baseline method");
  }
  const BootstrapEnsemble ens = parametric_bootstrap(d, model, statistic, cfg.B, plan);
  return adjust(unadjusted, estimate_bias(ens, unadjusted));
}

namespace {

struct ReplicateResult {
  std::vector<double> rmse_by_method;
};

// Draws the non-null means, runs every requested method on one simulated
// dataset, and scores each against the replicate's truth.
ReplicateResult run_simulation_replicate(const ScenarioConfig& cfg, const Eigen::MatrixXd& r_control,
                                         const Eigen::MatrixXd* r_case, double marginal_sd, int rep,
                                         const SeedPlan& base) {
  const int p = cfg.p;
  const bool two_sample = r_case != nullptr;
  const SeedPlan rep_plan = base.replicate(static_cast<std::uint64_t>(rep));
  RandomStream truth_rs(rep_plan.purpose(streams::kTruth));

  Eigen::VectorXd delta(p);
  DataModel true_model, independence_model;
  StatisticSpec statistic;

  if (!two_sample) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    for (int j = p - cfg.k_nonnull; j < p; ++j) mu(j) = 0.1 * truth_rs.normal();
    delta = std::sqrt(static_cast<double>(cfg.n)) / marginal_sd * mu;
    const bool mvt = cfg.kind == ScenarioKind::OneSampleMvt;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    if (mvt) {
      true_model = DataModel::single(GenerativeModel::mvt(mu, r_control, cfg.nu), cfg.n);
      independence_model = DataModel::single(GenerativeModel::mvt(mu, identity, cfg.nu), cfg.n);
    } else {
      true_model = DataModel::single(GenerativeModel::mvn(mu, r_control), cfg.n);
      independence_model = DataModel::single(GenerativeModel::mvn(mu, identity), cfg.n);
    }
    statistic = cfg.statistic == StatisticKind::OneSampleZ
                    ? StatisticSpec::one_sample_z(Eigen::VectorXd::Constant(p, marginal_sd))
                    : StatisticSpec::one_sample_t();
  } else {
    Eigen::VectorXd mu_control(p), mu_case(p);
    for (int j = 0; j < p; ++j) mu_control(j) = 0.1 * truth_rs.normal();
    for (int j = 0; j < p; ++j) {
      const bool nonnull = j >= p - cfg.k_nonnull;
      mu_case(j) = (nonnull ? 0.5 : 0.0) + 0.1 * truth_rs.normal();
    }
    const double se_factor = std::sqrt(1.0 / cfg.n1 + 1.0 / cfg.n2);
    delta = (mu_case - mu_control) / se_factor;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    true_model = DataModel::two_sample(GenerativeModel::mvn(mu_control, r_control), cfg.n1,
                                       GenerativeModel::mvn(mu_case, *r_case), cfg.n2);
    independence_model = DataModel::two_sample(GenerativeModel::mvn(mu_control, identity), cfg.n1,
                                               GenerativeModel::mvn(mu_case, identity), cfg.n2);
    statistic = StatisticSpec::two_sample_t();
  }

  PreparedDataModel prepared(true_model);
  RandomStream data_rs(rep_plan.purpose(streams::kData));
  const DataMatrix d = prepared.generate(data_rs);
  const EstimateVector unadjusted = compute_statistic(d, statistic);
  const ExtremeSelection sel = select_extremes(unadjusted, cfg.selection_k);

  ReplicateResult result;
  result.rmse_by_method.reserve(cfg.methods.size());
  for (const std::string& method : cfg.methods) {
    EstimateVector adjusted;
    if (method == "oracle-cor") {
      adjusted = adjust(unadjusted, oracle_bias(delta, true_model, statistic, cfg.oracle_n_mc,
                                                rep_plan.purpose(streams::kOracleCor), BiasMethod::OracleCor));
    } else if (method == "oracle-uncor") {
      adjusted = adjust(unadjusted,
                        oracle_bias(delta, independence_model, statistic, cfg.oracle_n_mc,
                                    rep_plan.purpose(streams::kOracleUncor), BiasMethod::OracleUncor));
    } else {
      adjusted = apply_bootstrap_method(method, d, unadjusted, statistic, cfg, rep_plan);
    }
    result.rmse_by_method.push_back(rmse(adjusted.values, unadjusted.values, delta, sel));
  }
  return result;
}

std::vector<EvaluationReport> aggregate_methods(const ScenarioConfig& cfg, const std::string& label,
                                                const std::vector<ReplicateResult>& results) {
  std::vector<EvaluationReport> rows;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    std::vector<double> values(results.size());
    for (std::size_t r = 0; r < results.size(); ++r) values[r] = results[r].rmse_by_method[m];
    rows.push_back(aggregate(label, cfg.methods[m], "rmse", values));
  }
  return rows;
}

void run_replicates(const ScenarioConfig& cfg, const Eigen::MatrixXd& r_control, const Eigen::MatrixXd* r_case,
                    double marginal_sd, const SeedPlan& base, std::vector<ReplicateResult>& results) {
  const int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
  results.resize(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, threads, [&](int rep) {
    try {
      results[static_cast<std::size_t>(rep)] =
          run_simulation_replicate(cfg, r_control, r_case, marginal_sd, rep, base);
    } catch (const Error& e) {
      throw Error("replicate " + std::to_string(rep) + ": " + e.what());
    }
  });
}

}  // namespace

std::vector<EvaluationReport> run_one_sample_scenario(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::OneSampleGaussian && cfg.kind != ScenarioKind::OneSampleMvt) {
    throw ConfigError("run_one_sample_scenario needs a one-sample scenario config");
  }
  const bool mvt = cfg.kind == ScenarioKind::OneSampleMvt;
  const double marginal_sd = mvt ? std::sqrt(cfg.nu / (cfg.nu - 2.0)) : 1.0;
  const SeedPlan base{cfg.master_seed, {}};

  std::vector<EvaluationReport> rows;
  for (double rho : cfg.rho) {
    CorrelationSpec spec;
    spec.kind = cfg.correlation;
    spec.rho = rho;
    spec.block_size = cfg.block_size;
    const Eigen::MatrixXd r = build_correlation(spec, cfg.p);

    std::string label = std::string(mvt ? "one-sample-mvt" : "one-sample-gaussian") + "/" +
                        correlation_label(cfg.correlation);
    if (mvt) label += "/nu=" + format_param(cfg.nu);
    label += "/rho=" + format_param(rho);

    std::vector<ReplicateResult> results;
    run_replicates(cfg, r, nullptr, marginal_sd, base, results);
    const std::vector<EvaluationReport> batch = aggregate_methods(cfg, label, results);
    rows.insert(rows.end(), batch.begin(), batch.end());
  }
  return rows;
}

namespace {

// Case-group correlation: `within` inside the null block and inside the
// non-null block, `cross` between them, unit diagonal.
Eigen::MatrixXd two_block_correlation(int p, int k_nonnull, double within, double cross) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(p, p, cross);
  const int split = p - k_nonnull;
  m.topLeftCorner(split, split).setConstant(within);
  m.bottomRightCorner(k_nonnull, k_nonnull).setConstant(within);
  m.diagonal().setOnes();
  CorrelationSpec spec;
  spec.kind = CorrelationKind::Explicit;
  spec.explicit_matrix = std::move(m);
  return build_correlation(spec, p);  // runs the positive-definiteness gate
}

}  // namespace

std::vector<EvaluationReport> run_two_sample_scenario(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::TwoSample) throw ConfigError("run_two_sample_scenario needs a two-sample config");
  CorrelationSpec control_spec;
  control_spec.kind = CorrelationKind::Equicorrelation;
  control_spec.rho = cfg.control_rho;
  const Eigen::MatrixXd r_control = build_correlation(control_spec, cfg.p);
  const Eigen::MatrixXd r_case = two_block_correlation(cfg.p, cfg.k_nonnull, cfg.case_within, cfg.case_cross);
  const SeedPlan base{cfg.master_seed, {}};

  std::vector<ReplicateResult> results;
  run_replicates(cfg, r_control, &r_case, 1.0, base, results);
  return aggregate_methods(cfg, "two-sample", results);
}

}  // namespace debias
