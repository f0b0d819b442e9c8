#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>

#include "debias/harness.hpp"

namespace debias {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_report_csv(const std::vector<EvaluationReport>& rows, std::ostream& out) {
  out << "scenario,method,metric,mean,standard_error,replicates\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.method << ',' << r.metric << ',' << format_number(r.mean) << ','
        << format_number(r.standard_error) << ',' << r.replicates << '\n';
  }
}

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void print_report_table(const std::vector<EvaluationReport>& rows, std::ostream& out) {
  std::size_t w_scen = 8, w_method = 6;
  for (const auto& r : rows) {
    w_scen = std::max(w_scen, r.scenario.size());
    w_method = std::max(w_method, r.method.size());
  }
  out << std::left << std::setw(static_cast<int>(w_scen) + 2) << "scenario"
      << std::setw(static_cast<int>(w_method) + 2) << "method" << std::setw(10) << "metric" << std::right
      << std::setw(12) << "mean" << std::setw(12) << "se" << std::setw(8) << "reps" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(w_scen) + 2) << r.scenario
        << std::setw(static_cast<int>(w_method) + 2) << r.method << std::setw(10) << r.metric << std::right
        << std::setw(12) << fixed(r.mean, 4) << std::setw(12) << fixed(r.standard_error, 4) << std::setw(8)
        << r.replicates << '\n';
  }
}

void write_lemma_csv(const std::vector<LemmaRow>& rows, std::ostream& out) {
  out << "check,params,lhs,rhs,combined_se,z,pass\n";
  for (const auto& r : rows) {
    const double z = r.combined_se > 0.0 ? std::abs(r.lhs - r.rhs) / r.combined_se : 0.0;
    out << r.check << ',' << r.params << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
        << format_number(r.combined_se) << ',' << format_number(z) << ',' << (r.pass ? "pass" : "FAIL") << '\n';
  }
}

void print_lemma_table(const std::vector<LemmaRow>& rows, std::ostream& out) {
  std::size_t w_check = 5, w_params = 6;
  for (const auto& r : rows) {
    w_check = std::max(w_check, r.check.size());
    w_params = std::max(w_params, r.params.size());
  }
  out << std::left << std::setw(static_cast<int>(w_check) + 2) << "check"
      << std::setw(static_cast<int>(w_params) + 2) << "params" << std::right << std::setw(12) << "lhs"
      << std::setw(12) << "rhs" << std::setw(12) << "3*se" << std::setw(8) << "result" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(w_check) + 2) << r.check
        << std::setw(static_cast<int>(w_params) + 2) << r.params << std::right << std::setw(12)
        << fixed(r.lhs, 4) << std::setw(12) << fixed(r.rhs, 4) << std::setw(12) << fixed(3.0 * r.combined_se, 4)
        << std::setw(8) << (r.pass ? "pass" : "FAIL") << '\n';
  }
}

}  // namespace debias
