#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "debias/errors.hpp"
#include "debias/harness.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path);
  if (!out) throw debias::Error("cannot write " + path);
  writer(out);
}

int run(int argc, char** argv) {
  CLI::App app{"Selection-bias correction for large vectors of dependent effect-size estimates"};
  app.require_subcommand(1);

  std::string config_path, csv_path, out_path;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, const char* default_out) {
    sub->add_option("config", config_path, "scenario config (JSON)")->required();
    sub->add_option("-o,--out", out_path, std::string("report CSV path (default ") + default_out + ")");
    sub->add_option("-t,--threads", threads, "worker threads (default: DEBIAS_THREADS or hardware)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a simulation scenario and report RMSE per method");
  add_common(simulate, "simulate_report.csv");
  CLI::App* lemma = app.add_subcommand("lemma", "validate the bias identities by Monte Carlo");
  add_common(lemma, "lemma_report.csv");
  CLI::App* realdata = app.add_subcommand("realdata", "train/test protocol on a CSV dataset");
  add_common(realdata, "realdata_report.csv");
  realdata->add_option("data", csv_path, "data CSV with a group column")->required();
  app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (app.got_subcommand("version")) {
    std::cout << "debias " << kVersion << '\n';
    return 0;
  }

  debias::ScenarioConfig cfg = debias::load_config(config_path);
  if (threads > 0) cfg.threads = threads;

  if (app.got_subcommand("simulate")) {
    std::vector<debias::EvaluationReport> rows;
    switch (cfg.kind) {
      case debias::ScenarioKind::OneSampleGaussian:
      case debias::ScenarioKind::OneSampleMvt:
        rows = debias::run_one_sample_scenario(cfg);
        break;
      case debias::ScenarioKind::TwoSample:
        rows = debias::run_two_sample_scenario(cfg);
        break;
      default:
        throw debias::ConfigError("'simulate' takes a one-sample or two-sample scenario config");
    }
    if (out_path.empty()) out_path = "simulate_report.csv";
    write_file(out_path, [&](std::ostream& o) { debias::write_report_csv(rows, o); });
    debias::print_report_table(rows, std::cout);
    return 0;
  }

  if (app.got_subcommand("lemma")) {
    if (cfg.kind != debias::ScenarioKind::LemmaCheck) throw debias::ConfigError("'lemma' takes a lemma config");
    const std::vector<debias::LemmaRow> rows = debias::run_lemma_checks(cfg);
    if (out_path.empty()) out_path = "lemma_report.csv";
    write_file(out_path, [&](std::ostream& o) { debias::write_lemma_csv(rows, o); });
    debias::print_lemma_table(rows, std::cout);
    bool all_pass = true;
    for (const auto& r : rows) all_pass = all_pass && r.pass;
    std::cout << (all_pass ? "all checks passed" : "SOME CHECKS FAILED") << '\n';
    return 0;
  }

  // realdata
  if (cfg.kind != debias::ScenarioKind::RealData) throw debias::ConfigError("'realdata' takes a real-data config");
  const std::vector<debias::EvaluationReport> rows = debias::run_real_data(cfg, csv_path);
  if (out_path.empty()) out_path = "realdata_report.csv";
  write_file(out_path, [&](std::ostream& o) { debias::write_report_csv(rows, o); });
  debias::print_report_table(rows, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const debias::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const debias::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
