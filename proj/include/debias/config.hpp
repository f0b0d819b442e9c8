#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "debias/randgen.hpp"
#include "debias/stats.hpp"

namespace debias {

enum class ScenarioKind { OneSampleGaussian, OneSampleMvt, TwoSample, LemmaCheck, RealData };

/// Declarative harness scenario; parsed from a versioned JSON document.
struct ScenarioConfig {
  int schema_version = 1;
  ScenarioKind kind = ScenarioKind::OneSampleGaussian;

  // sample sizes and signal layout
  int n = 50;             // one-sample
  int n1 = 40, n2 = 40;   // two-sample
  int p = 500;
  int k_nonnull = 100;    // features with non-null means (last k columns)

  // correlation sweep (one-sample scenarios)
  CorrelationKind correlation = CorrelationKind::Equicorrelation;
  std::vector<double> rho{0.5};
  int block_size = 100;

  // two-sample correlation structure
  double control_rho = 0.5;
  double case_within = 0.8;
  double case_cross = 0.5;

  double nu = 10.0;  // multivariate t degrees of freedom

  StatisticKind statistic = StatisticKind::OneSampleT;  // OneSampleZ enables the known-sigma diagnostic

  int B = 1000;
  int replications = 100;
  int oracle_n_mc = 10000;
  int selection_k = 25;
  std::vector<std::string> methods;
  std::uint64_t master_seed = 1;
  std::optional<double> ridge;  // absent: 1e-3 * mean covariance diagonal

  // density-fit settings for the tweedie method
  int bins = 120;
  int spline_df = 5;

  // lemma checks
  std::vector<std::string> lemmas{"all"};
  std::vector<double> a_values{0.0, 1.0};
  int n_mc = 20000;
  double cluster_b = 10.0;

  // real-data protocol
  int splits = 100;
  std::vector<int> k_list{15, 25, 50};
  int top_sd_features = 0;  // 0 keeps every feature

  int threads = 0;  // 0: DEBIAS_THREADS env or hardware default
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

// Config-file serialization of the sampling building blocks.
void to_json(nlohmann::json& j, const CorrelationSpec& spec);
void from_json(const nlohmann::json& j, CorrelationSpec& spec);
void to_json(nlohmann::json& j, const GenerativeModel& model);
void from_json(const nlohmann::json& j, GenerativeModel& model);

}  // namespace debias
