#include <algorithm>
#include <numeric>

#include "debias/errors.hpp"
#include "debias/harness.hpp"
#include "debias/parallel.hpp"

namespace debias {

namespace {

DataMatrix keep_top_sd_features(const DataMatrix& d, int m) {
  const SummaryStats s = summarize(d);
  std::vector<int> order(static_cast<std::size_t>(d.p()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s.sd(a) > s.sd(b); });
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());  // keep original column order
  return d.take_columns(order);
}

}  // namespace

std::vector<EvaluationReport> run_real_data(const ScenarioConfig& cfg, const std::string& csv_path) {
  if (cfg.kind != ScenarioKind::RealData) throw ConfigError("run_real_data needs a real-data config");
  DataMatrix d = load_csv(csv_path);
  if (!d.has_groups()) throw ConfigError(csv_path + ": real-data protocol needs a 'group' column");
  if (cfg.top_sd_features > 0 && cfg.top_sd_features < d.p()) {
    d = keep_top_sd_features(d, cfg.top_sd_features);
  }
  const int max_k = *std::max_element(cfg.k_list.begin(), cfg.k_list.end());
  if (2 * max_k > d.p()) throw ConfigError("largest k in k_list needs 2k <= feature count");

  // method list plus the raw-estimates baseline row
  std::vector<std::string> rows_methods = cfg.methods;
  rows_methods.emplace_back("unadjusted");
  const std::size_t n_methods = rows_methods.size();
  const std::size_t n_k = cfg.k_list.size();

  const SeedPlan base{cfg.master_seed, {}};
  const int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
  const StatisticSpec statistic = StatisticSpec::two_sample_t();

  // ssd[split][method * n_k + k_index]
  std::vector<std::vector<double>> ssd(static_cast<std::size_t>(cfg.splits),
                                       std::vector<double>(n_methods * n_k, 0.0));
  parallel_for(cfg.splits, threads, [&](int split) {
    try {
      const SeedPlan split_plan = base.replicate(static_cast<std::uint64_t>(split));
      auto [train, test] = split_train_test(d, split_plan.purpose(streams::kSplit));
      const EstimateVector unadj_train = two_sample_t(train);
      const EstimateVector unadj_test = two_sample_t(test);

      std::vector<ExtremeSelection> selections;
      selections.reserve(n_k);
      for (int k : cfg.k_list) selections.push_back(select_extremes(unadj_train, k));

      for (std::size_t m = 0; m < n_methods; ++m) {
        const EstimateVector adjusted =
            rows_methods[m] == "unadjusted"
                ? unadj_train
                : apply_bootstrap_method(rows_methods[m], train, unadj_train, statistic, cfg, split_plan);
        for (std::size_t ki = 0; ki < n_k; ++ki) {
          ssd[static_cast<std::size_t>(split)][m * n_k + ki] = test_ssd(adjusted, unadj_test, selections[ki]);
        }
      }
    } catch (const Error& e) {
      throw Error("split " + std::to_string(split) + ": " + e.what());
    }
  });

  std::vector<EvaluationReport> rows;
  for (std::size_t ki = 0; ki < n_k; ++ki) {
    const std::string label = "real-data/k=" + std::to_string(cfg.k_list[ki]);
    for (std::size_t m = 0; m < n_methods; ++m) {
      std::vector<double> values(static_cast<std::size_t>(cfg.splits));
      for (int s = 0; s < cfg.splits; ++s) values[static_cast<std::size_t>(s)] = ssd[static_cast<std::size_t>(s)][m * n_k + ki];
      rows.push_back(aggregate(label, rows_methods[m], "test_ssd", values));
    }
  }
  return rows;
}

}  // namespace debias
