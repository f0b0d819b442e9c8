#include <cmath>
#include <cstdio>

#include "debias/errors.hpp"
#include "debias/harness.hpp"

namespace debias {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Monte Carlo selection bias of estimates drawn directly as N(delta, sigma):
// one observation row and a known-sigma z reduce the dataset to the row itself.
BiasVector estimate_level_bias(const Eigen::VectorXd& delta, const Eigen::MatrixXd& sigma, int n_mc,
                               const SeedPlan& plan) {
  const DataModel model = DataModel::single(GenerativeModel::mvn(delta, sigma), 1);
  const StatisticSpec z = StatisticSpec::one_sample_z(Eigen::VectorXd::Ones(delta.size()));
  return oracle_bias(delta, model, z, n_mc, plan);
}

Eigen::MatrixXd equicorrelation(int p, double rho) {
  CorrelationSpec spec;
  spec.kind = CorrelationKind::Equicorrelation;
  spec.rho = rho;
  return build_correlation(spec, p);
}

// Two equicorrelated blocks with a constant cross-block correlation.
Eigen::MatrixXd clustered_correlation(int p, double rho, double cross) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(p, p, cross);
  const int half = p / 2;
  m.topLeftCorner(half, half).setConstant(rho);
  m.bottomRightCorner(half, half).setConstant(rho);
  m.diagonal().setOnes();
  CorrelationSpec spec;
  spec.kind = CorrelationKind::Explicit;
  spec.explicit_matrix = std::move(m);
  return build_correlation(spec, p);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// sum of squared biases with a delta-method standard error
MeanSe beta_squared_sum(const BiasVector& b) {
  MeanSe out;
  out.mean = b.values.squaredNorm();
  double var = 0.0;
  for (int k = 0; k < b.size(); ++k) {
    const double t = 2.0 * b.values(k) * b.se(k);
    var += t * t;
  }
  out.se = std::sqrt(var);
  return out;
}

// scalar Welford
struct Running {
  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  double se() const { return count > 1 ? std::sqrt(m2 / (count - 1) / count) : 0.0; }
  double mean = 0.0, m2 = 0.0;
  long count = 0;
};

// squared error of rank-wise bias subtraction against the truth, one draw
double adjusted_sse(const RankedEstimates& r, const Eigen::VectorXd& truth, const Eigen::VectorXd& beta) {
  double s = 0.0;
  for (int k = 0; k < truth.size(); ++k) {
    const double err = r.sorted_values(k) - beta(k) - truth(r.order[static_cast<std::size_t>(k)]);
    s += err * err;
  }
  return s;
}

LemmaRow make_row(std::string check, std::string params, double lhs, double rhs, double se) {
  LemmaRow row;
  row.check = std::move(check);
  row.params = std::move(params);
  row.lhs = lhs;
  row.rhs = rhs;
  row.combined_se = se;
  row.pass = std::abs(lhs - rhs) <= 3.0 * se;
  return row;
}

class LemmaRunner {
 public:
  LemmaRunner(const ScenarioConfig& cfg, std::vector<LemmaRow>& rows)
      : cfg_(cfg), rows_(rows), base_{cfg.master_seed, {}} {}

  // MSE decomposition: unadjusted MSE = sum of squared biases + MSE of the
  // rank-wise corrected estimates, for an arbitrary truth vector.
  void lemma1(double rho, int grid) {
    const int p = cfg_.p;
    const Eigen::VectorXd delta = random_delta(p);
    const Eigen::MatrixXd r = equicorrelation(p, rho);
    const BiasVector beta = estimate_level_bias(delta, r, cfg_.n_mc, side_plan(streams::kLemmaSideA, 1, grid));

    PreparedDataModel sampler(DataModel::single(GenerativeModel::mvn(delta, r), 1));
    RandomStream rs(side_plan(streams::kLemmaEval, 1, grid));
    DataMatrix buf = sampler.make_empty();
    Running unadj, oracle, diff;
    for (int i = 0; i < cfg_.n_mc; ++i) {
      sampler.generate_into(buf, rs);
      const Eigen::VectorXd draw = buf.values.row(0);
      const RankedEstimates ranked = rank_values(draw);
      const double u = (draw - delta).squaredNorm();
      const double o = adjusted_sse(ranked, delta, beta.values);
      unadj.add(u);
      oracle.add(o);
      diff.add(u - o);
    }
    const MeanSe bsq = beta_squared_sum(beta);
    const double se = std::sqrt(diff.se() * diff.se() + bsq.se * bsq.se);
    rows_.push_back(make_row("lemma1", "p=" + std::to_string(p) + " rho=" + fmt(rho), unadj.mean,
                             bsq.mean + oracle.mean, se));
  }

  // Equicorrelated biases equal independent biases at shrunken variance.
  void lemma2(double rho, int grid) {
    const int p = cfg_.p;
    const Eigen::VectorXd delta = random_delta(p);
    const BiasVector lhs =
        estimate_level_bias(delta, equicorrelation(p, rho), cfg_.n_mc, side_plan(streams::kLemmaSideA, 2, grid));
    const BiasVector rhs = estimate_level_bias(delta, (1.0 - rho) * Eigen::MatrixXd::Identity(p, p), cfg_.n_mc,
                                               side_plan(streams::kLemmaSideB, 2, grid));
    for (int k = 0; k < p; ++k) {
      const double se = std::hypot(lhs.se(k), rhs.se(k));
      rows_.push_back(make_row("lemma2", "p=" + std::to_string(p) + " rho=" + fmt(rho) + " k=" + std::to_string(k + 1),
                               lhs.values(k), rhs.values(k), se));
    }
  }

  // With a constant mean vector, equicorrelated biases are sqrt(1-rho) times
  // the independent ones; tested as a per-rank ratio away from zero bias.
  void lemma3(double rho, double a, int grid) {
    const int p = cfg_.p;
    const Eigen::VectorXd delta = Eigen::VectorXd::Constant(p, a);
    const BiasVector cor =
        estimate_level_bias(delta, equicorrelation(p, rho), cfg_.n_mc, side_plan(streams::kLemmaSideA, 3, grid));
    const BiasVector ind = estimate_level_bias(delta, Eigen::MatrixXd::Identity(p, p), cfg_.n_mc,
                                               side_plan(streams::kLemmaSideB, 3, grid));
    const double target = std::sqrt(1.0 - rho);
    for (int k = 0; k < p; ++k) {
      if (std::abs(ind.values(k)) <= 0.05) continue;
      const double ratio = cor.values(k) / ind.values(k);
      const double rel_a = cor.se(k) / std::abs(cor.values(k));
      const double rel_b = ind.se(k) / std::abs(ind.values(k));
      const double se = std::abs(ratio) * std::sqrt(rel_a * rel_a + rel_b * rel_b);
      rows_.push_back(make_row("lemma3",
                               "p=" + std::to_string(p) + " rho=" + fmt(rho) + " a=" + fmt(a) + " k=" +
                                   std::to_string(k + 1),
                               ratio, target, se));
    }
  }

  // Well-separated clusters: each half of the bias vector matches the bias of
  // its own cluster alone.
  void lemma4(double rho, int grid) {
    const int p = cfg_.p;
    const int half = p / 2;
    const Eigen::MatrixXd r = clustered_correlation(p, rho, rho / 2.0);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(p);
    delta.tail(half).setConstant(cfg_.cluster_b);
    const BiasVector full = estimate_level_bias(delta, r, cfg_.n_mc, side_plan(streams::kLemmaSideA, 4, grid));
    const BiasVector cluster = estimate_level_bias(Eigen::VectorXd::Zero(half), equicorrelation(half, rho),
                                                   cfg_.n_mc, side_plan(streams::kLemmaSideB, 4, grid));
    for (int k = 0; k < half; ++k) {
      const std::string tail = " rho=" + fmt(rho) + " k=" + std::to_string(k + 1);
      rows_.push_back(make_row("lemma4-lower", "p=" + std::to_string(p) + tail, full.values(k), cluster.values(k),
                               std::hypot(full.se(k), cluster.se(k))));
      rows_.push_back(make_row("lemma4-upper", "p=" + std::to_string(p) + tail, full.values(half + k),
                               cluster.values(k), std::hypot(full.se(half + k), cluster.se(k))));
    }
  }

  // Two equicorrelated clusters against the scaled independent bias.
  void corollary1(double rho, int grid) {
    const int p = cfg_.p;
    const int half = p / 2;
    const Eigen::MatrixXd r = clustered_correlation(p, rho, rho / 2.0);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(p);
    delta.tail(half).setConstant(cfg_.cluster_b);
    const BiasVector full = estimate_level_bias(delta, r, cfg_.n_mc, side_plan(streams::kLemmaSideA, 6, grid));
    const BiasVector ind = estimate_level_bias(Eigen::VectorXd::Zero(half), Eigen::MatrixXd::Identity(half, half),
                                               cfg_.n_mc, side_plan(streams::kLemmaSideC, 6, grid));
    const double scale = std::sqrt(1.0 - rho);
    for (int k = 0; k < half; ++k) {
      const std::string tail = " rho=" + fmt(rho) + " k=" + std::to_string(k + 1);
      rows_.push_back(make_row("corollary1-lower", "p=" + std::to_string(p) + tail, full.values(k),
                               scale * ind.values(k), std::hypot(full.se(k), scale * ind.se(k))));
      rows_.push_back(make_row("corollary1-upper", "p=" + std::to_string(p) + tail, full.values(half + k),
                               scale * ind.values(k), std::hypot(full.se(half + k), scale * ind.se(k))));
    }
  }

  // False-oracle penalty: using independence biases on equicorrelated
  // estimates costs (1 - sqrt(1-rho))^2 times the squared independent biases.
  void lemma5(double rho, int grid) {
    const int p = cfg_.p;
    const Eigen::VectorXd delta = Eigen::VectorXd::Zero(p);
    const Eigen::MatrixXd r = equicorrelation(p, rho);
    const BiasVector beta_ind = estimate_level_bias(delta, Eigen::MatrixXd::Identity(p, p), cfg_.n_mc,
                                                    side_plan(streams::kLemmaSideA, 5, grid));
    const BiasVector beta_cor = estimate_level_bias(delta, r, cfg_.n_mc, side_plan(streams::kLemmaSideB, 5, grid));

    PreparedDataModel sampler(DataModel::single(GenerativeModel::mvn(delta, r), 1));
    RandomStream rs(side_plan(streams::kLemmaEval, 5, grid));
    DataMatrix buf = sampler.make_empty();
    Running false_oracle, true_oracle, diff;
    for (int i = 0; i < cfg_.n_mc; ++i) {
      sampler.generate_into(buf, rs);
      const Eigen::VectorXd draw = buf.values.row(0);
      const RankedEstimates ranked = rank_values(draw);
      const double mse_ind = adjusted_sse(ranked, delta, beta_ind.values);
      const double mse_cor = adjusted_sse(ranked, delta, beta_cor.values);
      false_oracle.add(mse_ind);
      true_oracle.add(mse_cor);
      diff.add(mse_ind - mse_cor);
    }
    const double shrink = 1.0 - std::sqrt(1.0 - rho);
    const MeanSe bsq = beta_squared_sum(beta_ind);
    const double penalty = shrink * shrink * bsq.mean;
    const double se = std::sqrt(diff.se() * diff.se() + shrink * shrink * shrink * shrink * bsq.se * bsq.se);
    rows_.push_back(make_row("lemma5", "p=" + std::to_string(p) + " rho=" + fmt(rho), false_oracle.mean,
                             true_oracle.mean + penalty, se));
  }

 private:
  Eigen::VectorXd random_delta(int p) {
    RandomStream rs(base_.purpose(streams::kLemmaDelta));
    Eigen::VectorXd delta(p);
    for (int j = 0; j < p; ++j) delta(j) = rs.normal();
    return delta;
  }

  SeedPlan side_plan(std::uint64_t purpose, std::uint64_t lemma, int grid) const {
    return base_.purpose(purpose).replicate(lemma).draw(static_cast<std::uint64_t>(grid));
  }

  const ScenarioConfig& cfg_;
  std::vector<LemmaRow>& rows_;
  SeedPlan base_;
};

}  // namespace

std::vector<LemmaRow> run_lemma_checks(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::LemmaCheck) throw ConfigError("run_lemma_checks needs a lemma config");
  auto wants = [&](const char* name) {
    for (const auto& l : cfg.lemmas) {
      if (l == "all" || l == name) return true;
    }
    return false;
  };

  std::vector<LemmaRow> rows;
  LemmaRunner runner(cfg, rows);
  int grid = 0;
  for (double rho : cfg.rho) {
    if (wants("1")) runner.lemma1(rho, grid);
    if (wants("2")) runner.lemma2(rho, grid);
    if (wants("3")) {
      int a_index = 0;
      for (double a : cfg.a_values) runner.lemma3(rho, a, grid * 1000 + a_index++);
    }
    if (wants("4")) runner.lemma4(rho, grid);
    if (wants("corollary1")) runner.corollary1(rho, grid);
    if (wants("5")) runner.lemma5(rho, grid);
    ++grid;
  }
  return rows;
}

}  // namespace debias
