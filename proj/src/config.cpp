#include "debias/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "debias/errors.hpp"

namespace debias {

namespace {

const std::set<std::string> kOneSampleMethods = {"james-stein", "tweedie",    "para-uncor", "para-cor",
                                                 "nonpara",     "oracle-cor", "oracle-uncor"};
const std::set<std::string> kTwoSampleMethods = {"james-stein",    "tweedie",        "para-uncor",
                                                 "para-cor",       "para-cor-right", "para-cor-wrong",
                                                 "nonpara",        "oracle-cor",     "oracle-uncor"};
const std::set<std::string> kRealDataMethods = {"james-stein", "tweedie", "para-uncor", "para-cor", "nonpara"};
const std::set<std::string> kLemmaNames = {"all", "1", "2", "3", "4", "5", "corollary1"};

ScenarioKind parse_kind(const std::string& s) {
  if (s == "one_sample_gaussian") return ScenarioKind::OneSampleGaussian;
  if (s == "one_sample_mvt") return ScenarioKind::OneSampleMvt;
  if (s == "two_sample") return ScenarioKind::TwoSample;
  if (s == "lemma") return ScenarioKind::LemmaCheck;
  if (s == "real_data") return ScenarioKind::RealData;
  throw ConfigError("unknown scenario '" + s + "'");
}

CorrelationKind parse_correlation_kind(const std::string& s) {
  if (s == "identity") return CorrelationKind::Identity;
  if (s == "equicorrelation") return CorrelationKind::Equicorrelation;
  if (s == "block_ar") return CorrelationKind::BlockAR;
  if (s == "negative_block_ar") return CorrelationKind::NegativeBlockAR;
  if (s == "explicit") return CorrelationKind::Explicit;
  throw ConfigError("unknown correlation kind '" + s + "'");
}

std::string correlation_kind_name(CorrelationKind k) {
  switch (k) {
    case CorrelationKind::Identity: return "identity";
    case CorrelationKind::Equicorrelation: return "equicorrelation";
    case CorrelationKind::BlockAR: return "block_ar";
    case CorrelationKind::NegativeBlockAR: return "negative_block_ar";
    case CorrelationKind::Explicit: return "explicit";
  }
  return "?";
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::vector<double> number_list(const nlohmann::json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  try {
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void require_positive(int value, const char* name) {
  if (value < 1) throw ConfigError(std::string(name) + " must be positive");
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw ConfigError("matrix must be non-empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("matrix rows have unequal lengths");
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ScenarioConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig cfg;
  cfg.schema_version = get_or(j, "schema_version", 1);
  if (cfg.schema_version != 1) throw ConfigError("unsupported schema_version");
  if (!j.contains("scenario")) throw ConfigError("missing 'scenario'");
  cfg.kind = parse_kind(j.at("scenario").get<std::string>());

  cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", 1);
  cfg.threads = get_or(j, "threads", 0);

  cfg.p = get_or(j, "p", cfg.p);
  cfg.n = get_or(j, "n", cfg.n);
  cfg.n1 = get_or(j, "n1", cfg.n1);
  cfg.n2 = get_or(j, "n2", cfg.n2);
  cfg.k_nonnull = get_or(j, "k_nonnull", cfg.k_nonnull);
  cfg.B = get_or(j, "B", cfg.B);
  cfg.replications = get_or(j, "replications", cfg.replications);
  cfg.oracle_n_mc = get_or(j, "oracle_n_mc", cfg.oracle_n_mc);
  cfg.selection_k = get_or(j, "selection_k", cfg.selection_k);
  cfg.bins = get_or(j, "bins", cfg.bins);
  cfg.spline_df = get_or(j, "spline_df", cfg.spline_df);
  cfg.nu = get_or(j, "nu", cfg.nu);
  if (j.contains("ridge") && !j.at("ridge").is_null()) cfg.ridge = j.at("ridge").get<double>();
  cfg.methods = get_or(j, "methods", std::vector<std::string>{});

  if (j.contains("correlation")) {
    const auto& c = j.at("correlation");
    if (!c.is_object()) throw ConfigError("'correlation' must be an object");
    cfg.correlation = parse_correlation_kind(get_or<std::string>(c, "kind", "equicorrelation"));
    cfg.rho = number_list(c, "rho", cfg.rho);
    cfg.block_size = get_or(c, "block_size", cfg.block_size);
  }
  cfg.control_rho = get_or(j, "control_rho", cfg.control_rho);
  cfg.case_within = get_or(j, "case_within", cfg.case_within);
  cfg.case_cross = get_or(j, "case_cross", cfg.case_cross);

  const std::string stat = get_or<std::string>(j, "statistic", "t");
  if (stat == "t") {
    cfg.statistic = StatisticKind::OneSampleT;
  } else if (stat == "z") {
    cfg.statistic = StatisticKind::OneSampleZ;
  } else {
    throw ConfigError("statistic must be 't' or 'z'");
  }

  cfg.lemmas = get_or(j, "lemmas", cfg.lemmas);
  cfg.a_values = number_list(j, "a", cfg.a_values);
  cfg.n_mc = get_or(j, "n_mc", cfg.n_mc);
  cfg.cluster_b = get_or(j, "cluster_b", cfg.cluster_b);

  cfg.splits = get_or(j, "splits", cfg.splits);
  cfg.k_list = get_or(j, "k_list", cfg.k_list);
  cfg.top_sd_features = get_or(j, "top_sd_features", cfg.top_sd_features);

  // validation
  require_positive(cfg.p, "p");
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0");

  switch (cfg.kind) {
    case ScenarioKind::OneSampleGaussian:
    case ScenarioKind::OneSampleMvt:
    case ScenarioKind::TwoSample: {
      const bool two = cfg.kind == ScenarioKind::TwoSample;
      if (cfg.k_nonnull < 0 || cfg.k_nonnull > cfg.p) throw ConfigError("k_nonnull must lie in [0, p]");
      if (two) {
        require_positive(cfg.n1, "n1");
        require_positive(cfg.n2, "n2");
        if (cfg.n1 < 2 || cfg.n2 < 2) throw ConfigError("two-sample scenarios need n1, n2 >= 2");
        if (cfg.statistic == StatisticKind::OneSampleZ) {
          throw ConfigError("the z-statistic diagnostic applies to one-sample scenarios only");
        }
      } else {
        if (cfg.n < 2) throw ConfigError("one-sample scenarios need n >= 2");
        if (cfg.correlation == CorrelationKind::Explicit) {
          throw ConfigError("scenario sweeps take named correlation kinds, not explicit matrices");
        }
        if (cfg.rho.empty()) throw ConfigError("rho grid must be nonempty");
      }
      require_positive(cfg.B, "B");
      require_positive(cfg.replications, "replications");
      require_positive(cfg.oracle_n_mc, "oracle_n_mc");
      if (cfg.selection_k < 1 || 2 * cfg.selection_k > cfg.p) throw ConfigError("selection_k needs 2k <= p");
      if (cfg.methods.empty()) throw ConfigError("methods must be nonempty");
      const auto& allowed = two ? kTwoSampleMethods : kOneSampleMethods;
      for (const auto& m : cfg.methods) {
        if (!allowed.count(m)) throw ConfigError("unknown method '" + m + "' for this scenario");
      }
      if (cfg.kind == ScenarioKind::OneSampleMvt && cfg.nu <= 2.0) {
        throw ConfigError("multivariate t scenarios need nu > 2");
      }
      break;
    }
    case ScenarioKind::LemmaCheck: {
      require_positive(cfg.n_mc, "n_mc");
      if (cfg.lemmas.empty()) throw ConfigError("lemmas must be nonempty");
      for (const auto& l : cfg.lemmas) {
        if (!kLemmaNames.count(l)) throw ConfigError("unknown lemma '" + l + "'");
      }
      if (cfg.rho.empty()) throw ConfigError("rho grid must be nonempty");
      const bool clustered = std::any_of(cfg.lemmas.begin(), cfg.lemmas.end(), [](const std::string& l) {
        return l == "all" || l == "4" || l == "corollary1";
      });
      if (clustered && cfg.p % 2 != 0) {
        throw ConfigError("cluster checks (lemma 4, corollary 1) need even p");
      }
      break;
    }
    case ScenarioKind::RealData: {
      require_positive(cfg.B, "B");
      require_positive(cfg.splits, "splits");
      if (cfg.methods.empty()) throw ConfigError("methods must be nonempty");
      for (const auto& m : cfg.methods) {
        if (!kRealDataMethods.count(m)) throw ConfigError("method '" + m + "' is not available on real data");
      }
      if (cfg.k_list.empty()) throw ConfigError("k_list must be nonempty");
      for (int k : cfg.k_list) require_positive(k, "k_list entry");
      if (cfg.top_sd_features < 0) throw ConfigError("top_sd_features must be >= 0");
      break;
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

void to_json(nlohmann::json& j, const CorrelationSpec& spec) {
  j = nlohmann::json{{"kind", correlation_kind_name(spec.kind)}};
  j["rho"] = spec.rho;
  if (spec.block_size > 0) j["block_size"] = spec.block_size;
  if (spec.explicit_matrix) j["matrix"] = matrix_to_json(*spec.explicit_matrix);
}

void from_json(const nlohmann::json& j, CorrelationSpec& spec) {
  spec = CorrelationSpec{};
  spec.kind = parse_correlation_kind(j.at("kind").get<std::string>());
  spec.rho = get_or(j, "rho", 0.0);
  spec.block_size = get_or(j, "block_size", 0);
  if (j.contains("matrix")) spec.explicit_matrix = matrix_from_json(j.at("matrix"));
}

void to_json(nlohmann::json& j, const GenerativeModel& model) {
  const char* family = model.family == Family::MVN               ? "mvn"
                       : model.family == Family::MVT             ? "mvt"
                                                                 : "independent_normal";
  j = nlohmann::json{{"family", family}};
  j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
  j["scale"] = matrix_to_json(model.scale);
  if (model.family == Family::MVT) j["df"] = model.df;
}

void from_json(const nlohmann::json& j, GenerativeModel& model) {
  const std::string family = j.at("family").get<std::string>();
  const auto mean_vec = j.at("mean").get<std::vector<double>>();
  Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_vec.data(), static_cast<Eigen::Index>(mean_vec.size()));
  Eigen::MatrixXd scale = matrix_from_json(j.at("scale"));
  if (family == "mvn") {
    model = GenerativeModel::mvn(std::move(mean), std::move(scale));
  } else if (family == "mvt") {
    model = GenerativeModel::mvt(std::move(mean), std::move(scale), j.at("df").get<double>());
  } else if (family == "independent_normal") {
    model = GenerativeModel::independent(std::move(mean), scale.diagonal());
  } else {
    throw ConfigError("unknown model family '" + family + "'");
  }
}

}  // namespace debias
