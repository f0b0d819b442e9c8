#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "debias/errors.hpp"
#include "debias/harness.hpp"
#include "debias/parallel.hpp"

using namespace debias;

namespace {

nlohmann::json tiny_one_sample_json() {
  return nlohmann::json{
      {"scenario", "one_sample_gaussian"},
      {"n", 20},
      {"p", 24},
      {"k_nonnull", 6},
      {"correlation", {{"kind", "equicorrelation"}, {"rho", {0.3}}}},
      {"B", 30},
      {"replications", 6},
      {"oracle_n_mc", 300},
      {"selection_k", 3},
      {"methods", {"james-stein", "para-uncor", "para-cor", "nonpara"}},
      {"master_seed", 777},
  };
}

std::string report_csv(const std::vector<EvaluationReport>& rows) {
  std::ostringstream out;
  write_report_csv(rows, out);
  return out.str();
}

double method_mean(const std::vector<EvaluationReport>& rows, const std::string& scenario,
                   const std::string& method) {
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.method == method) return r.mean;
  }
  FAIL("missing report row ", scenario, " / ", method);
  return 0.0;
}

}  // namespace

TEST_CASE("config parsing fills fields and validates") {
  const ScenarioConfig cfg = parse_config(tiny_one_sample_json());
  CHECK(cfg.kind == ScenarioKind::OneSampleGaussian);
  CHECK(cfg.n == 20);
  CHECK(cfg.p == 24);
  CHECK(cfg.rho == std::vector<double>{0.3});
  CHECK(cfg.methods.size() == 4);
  CHECK(cfg.master_seed == 777);
  CHECK(cfg.statistic == StatisticKind::OneSampleT);
}

TEST_CASE("config validation rejects bad documents") {
  auto j = tiny_one_sample_json();
  j.erase("scenario");
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = tiny_one_sample_json();
  j["scenario"] = "mystery";
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = tiny_one_sample_json();
  j["methods"] = {"para-cor-wrong"};  // two-sample only
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = tiny_one_sample_json();
  j["selection_k"] = 13;  // 2k > p
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = tiny_one_sample_json();
  j["scenario"] = "two_sample";
  j["statistic"] = "z";
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = tiny_one_sample_json();
  j["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = nlohmann::json{{"scenario", "lemma"}, {"p", 5}};  // odd p
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = nlohmann::json{{"scenario", "real_data"}, {"methods", {"oracle-cor"}}};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("correlation spec and generative model survive a JSON round trip") {
  CorrelationSpec spec;
  spec.kind = CorrelationKind::Explicit;
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.25, 0.25, 1.0;
  spec.explicit_matrix = m;
  nlohmann::json j = spec;
  const auto back = j.get<CorrelationSpec>();
  CHECK(back.kind == CorrelationKind::Explicit);
  CHECK(back.explicit_matrix->isApprox(m, 0.0));

  Eigen::VectorXd mean(2);
  mean << 0.5, -1.0;
  const GenerativeModel model = GenerativeModel::mvt(mean, m, 7.5);
  nlohmann::json jm = model;
  const auto model_back = jm.get<GenerativeModel>();
  CHECK(model_back.family == Family::MVT);
  CHECK(model_back.df == 7.5);
  CHECK(model_back.mean == mean);
  CHECK(model_back.scale.isApprox(m, 0.0));
}

TEST_CASE("one-sample scenario produces one row per method and rho") {
  auto j = tiny_one_sample_json();
  j["correlation"]["rho"] = {0.0, 0.5};
  const ScenarioConfig cfg = parse_config(j);
  const auto rows = run_one_sample_scenario(cfg);
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(r.metric == "rmse");
    CHECK(r.replicates == 6);
    CHECK(std::isfinite(r.mean));
    CHECK(r.mean >= 0.0);
    CHECK(std::isfinite(r.standard_error));
  }
  CHECK(rows.front().scenario == "one-sample-gaussian/equicorrelation/rho=0");
  CHECK(rows.back().scenario == "one-sample-gaussian/equicorrelation/rho=0.5");
}

TEST_CASE("identical configs give byte-identical reports at any thread count") {
  auto j = tiny_one_sample_json();
  ScenarioConfig cfg = parse_config(j);
  cfg.threads = 1;
  const std::string serial = report_csv(run_one_sample_scenario(cfg));
  cfg.threads = 4;
  const std::string threaded = report_csv(run_one_sample_scenario(cfg));
  CHECK(serial == threaded);
  cfg.threads = 3;
  CHECK(serial == report_csv(run_one_sample_scenario(cfg)));
}

TEST_CASE("oracle methods run in the one-sample scenario") {
  auto j = tiny_one_sample_json();
  j["methods"] = {"oracle-cor", "oracle-uncor"};
  j["replications"] = 3;
  const auto rows = run_one_sample_scenario(parse_config(j));
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.mean));
    CHECK(r.mean < 1.5);  // rank-wise oracle correction should not hurt badly
  }
}

TEST_CASE("z-statistic diagnostic mode runs") {
  auto j = tiny_one_sample_json();
  j["statistic"] = "z";
  j["methods"] = {"para-cor", "oracle-cor"};
  j["replications"] = 3;
  const auto rows = run_one_sample_scenario(parse_config(j));
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(std::isfinite(r.mean));
}

TEST_CASE("multivariate t scenario runs") {
  auto j = tiny_one_sample_json();
  j["scenario"] = "one_sample_mvt";
  j["nu"] = 10.0;
  j["methods"] = {"james-stein", "para-cor", "nonpara"};
  j["replications"] = 3;
  const auto rows = run_one_sample_scenario(parse_config(j));
  REQUIRE(rows.size() == 3);
  CHECK(rows.front().scenario == "one-sample-mvt/equicorrelation/nu=10/rho=0.3");
  for (const auto& r : rows) CHECK(std::isfinite(r.mean));
}

TEST_CASE("two-sample scenario covers the right and wrong parametric models") {
  const nlohmann::json j{
      {"scenario", "two_sample"},
      {"n1", 12},
      {"n2", 12},
      {"p", 40},
      {"k_nonnull", 16},
      {"B", 30},
      {"replications", 4},
      {"oracle_n_mc", 300},
      {"selection_k", 5},
      {"methods", {"para-uncor", "para-cor-right", "para-cor-wrong", "nonpara", "oracle-cor", "oracle-uncor"}},
      {"master_seed", 1234},
  };
  const auto rows = run_two_sample_scenario(parse_config(j));
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.scenario == "two-sample");
    CHECK(std::isfinite(r.mean));
  }
}

TEST_CASE("lemma checks pass at desk scale") {
  const nlohmann::json j{
      {"scenario", "lemma"},  {"lemmas", {"1", "3", "5"}}, {"p", 6},
      {"rho", {0.0, 0.5}},    {"a", {0.0}},                {"n_mc", 6000},
      {"master_seed", 2024},
  };
  const auto rows = run_lemma_checks(parse_config(j));
  REQUIRE(!rows.empty());
  for (const auto& r : rows) {
    INFO(r.check, " ", r.params, ": ", r.lhs, " vs ", r.rhs, " +- ", r.combined_se);
    CHECK(r.pass);
  }
}

TEST_CASE("cluster lemma checks pass at desk scale") {
  const nlohmann::json j{
      {"scenario", "lemma"}, {"lemmas", {"2", "4", "corollary1"}}, {"p", 6},
      {"rho", {0.4}},        {"n_mc", 8000},                       {"master_seed", 5150},
  };
  const auto rows = run_lemma_checks(parse_config(j));
  REQUIRE(!rows.empty());
  for (const auto& r : rows) {
    INFO(r.check, " ", r.params, ": ", r.lhs, " vs ", r.rhs, " +- ", r.combined_se);
    CHECK(r.pass);
  }
}

TEST_CASE("real-data protocol on a synthetic two-group CSV") {
  // strongly correlated two-group data with signal in the last 20 features
  const int p = 60, n1 = 16, n2 = 16;
  CorrelationSpec spec;
  spec.kind = CorrelationKind::Equicorrelation;
  spec.rho = 0.7;
  const Eigen::MatrixXd r = build_correlation(spec, p);
  Eigen::VectorXd mu_case = Eigen::VectorXd::Zero(p);
  mu_case.tail(20).setConstant(0.8);
  const DataMatrix control = sample_mvn(GenerativeModel::mvn(Eigen::VectorXd::Zero(p), r), n1, SeedPlan{31415, {}});
  const DataMatrix cases = sample_mvn(GenerativeModel::mvn(mu_case, r), n2, SeedPlan{27182, {}});
  DataMatrix d;
  d.values.resize(n1 + n2, p);
  d.values.topRows(n1) = control.values;
  d.values.bottomRows(n2) = cases.values;
  d.groups.assign(n1, Group::Control);
  d.groups.insert(d.groups.end(), n2, Group::Case);
  const std::string path = "synthetic_expression.csv";
  save_csv(d, path);

  const nlohmann::json j{
      {"scenario", "real_data"},
      {"methods", {"james-stein", "para-uncor", "para-cor", "nonpara"}},
      {"B", 60},
      {"splits", 6},
      {"k_list", {5, 10}},
      {"top_sd_features", 50},
      {"master_seed", 99},
  };
  const auto rows = run_real_data(parse_config(j), path);
  std::remove(path.c_str());

  // 4 methods + the unadjusted baseline, for each k
  REQUIRE(rows.size() == 10);
  for (const auto& r : rows) {
    CHECK(r.metric == "test_ssd");
    CHECK(r.mean >= 0.0);
    CHECK(std::isfinite(r.mean));
  }
  // adjusted estimates track the test-set estimates better than raw ones
  for (const std::string scen : {"real-data/k=5", "real-data/k=10"}) {
    const double raw = method_mean(rows, scen, "unadjusted");
    CHECK(method_mean(rows, scen, "para-cor") < raw);
    CHECK(method_mean(rows, scen, "nonpara") < raw);
    CHECK(method_mean(rows, scen, "james-stein") < raw);
  }
}

TEST_CASE("real data requires a group column") {
  const std::string path = "ungrouped.csv";
  {
    std::ofstream out(path);
    out << "a,b\n1,2\n3,4\n5,6\n7,8\n";
  }
  const nlohmann::json j{
      {"scenario", "real_data"}, {"methods", {"james-stein"}}, {"B", 10}, {"splits", 2}, {"k_list", {1}},
  };
  CHECK_THROWS_AS(run_real_data(parse_config(j), path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("standard errors shrink with more replications") {
  auto j = tiny_one_sample_json();
  j["methods"] = {"james-stein"};
  j["replications"] = 10;
  const auto few = run_one_sample_scenario(parse_config(j));
  j["replications"] = 40;
  const auto many = run_one_sample_scenario(parse_config(j));
  CHECK(many.front().standard_error < few.front().standard_error);
  const double ratio = few.front().standard_error / many.front().standard_error;
  CHECK(ratio > 1.2);  // expected 2 at four times the replicates
  CHECK(ratio < 3.6);
}

TEST_CASE("report writers emit stable text") {
  std::vector<EvaluationReport> rows{{"scen", "meth", "rmse", 0.12345, 0.01, 7}};
  std::ostringstream csv;
  write_report_csv(rows, csv);
  CHECK(csv.str() == "scenario,method,metric,mean,standard_error,replicates\nscen,meth,rmse,0.12345,0.01,7\n");
  std::ostringstream table;
  print_report_table(rows, table);
  CHECK(table.str().find("0.123") != std::string::npos);

  std::vector<LemmaRow> lrows{{"lemma3", "p=2 rho=0.5", 0.5, 0.5, 0.001, true}};
  std::ostringstream lcsv;
  write_lemma_csv(lrows, lcsv);
  CHECK(lcsv.str().find("lemma3,p=2 rho=0.5,0.5,0.5,0.001,0,pass") != std::string::npos);
}
