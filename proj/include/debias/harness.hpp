#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "debias/bias.hpp"
#include "debias/config.hpp"
#include "debias/eval.hpp"

namespace debias {

// Stream purposes; every random draw in the harness belongs to exactly one,
// so results are independent of scheduling.
namespace streams {
inline constexpr std::uint64_t kTruth = 1;
inline constexpr std::uint64_t kData = 2;
inline constexpr std::uint64_t kParaUncor = 3;
inline constexpr std::uint64_t kParaCor = 4;
inline constexpr std::uint64_t kParaCorWrong = 5;
inline constexpr std::uint64_t kNonpara = 6;
inline constexpr std::uint64_t kOracleCor = 7;
inline constexpr std::uint64_t kOracleUncor = 8;
inline constexpr std::uint64_t kSplit = 9;
inline constexpr std::uint64_t kLemmaDelta = 10;
inline constexpr std::uint64_t kLemmaSideA = 11;
inline constexpr std::uint64_t kLemmaSideB = 12;
inline constexpr std::uint64_t kLemmaSideC = 13;
inline constexpr std::uint64_t kLemmaEval = 14;
}  // namespace streams

/// One line of a lemma validation report: both sides of an identity, the
/// combined Monte Carlo standard error, and a pass/fail at 3 combined SEs.
struct LemmaRow {
  std::string check;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  double combined_se = 0.0;
  bool pass = false;
};

std::vector<EvaluationReport> run_one_sample_scenario(const ScenarioConfig& cfg);
std::vector<EvaluationReport> run_two_sample_scenario(const ScenarioConfig& cfg);
std::vector<LemmaRow> run_lemma_checks(const ScenarioConfig& cfg);
std::vector<EvaluationReport> run_real_data(const ScenarioConfig& cfg, const std::string& csv_path);

/// Applies one named estimator to a dataset: baselines directly, bootstrap
/// methods through bias estimation and rank-wise adjustment. Oracle methods
/// are handled by the scenario runners (they need the truth).
EstimateVector apply_bootstrap_method(const std::string& method, const DataMatrix& d,
                                      const EstimateVector& unadjusted, const StatisticSpec& statistic,
                                      const ScenarioConfig& cfg, const SeedPlan& replicate_plan);

// Report emission. CSV output is stable byte-for-byte for identical results.
void write_report_csv(const std::vector<EvaluationReport>& rows, std::ostream& out);
void print_report_table(const std::vector<EvaluationReport>& rows, std::ostream& out);
void write_lemma_csv(const std::vector<LemmaRow>& rows, std::ostream& out);
void print_lemma_table(const std::vector<LemmaRow>& rows, std::ostream& out);
std::string format_number(double v);

}  // namespace debias
