// Copyright 2026 The depbound Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "depbound/study_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace depbound {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string JoinKeys(const std::vector<std::string>& keys) {
  std::string out;
  for (const std::string& k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

// Collects schema problems so that one error can name all of them.
class Problems {
 public:
  void Add(const std::string& key, const std::string& why) {
    if (std::find(keys_.begin(), keys_.end(), key) == keys_.end()) keys_.push_back(key);
    messages_.push_back(key + ": " + why);
  }
  bool empty() const { return keys_.empty(); }
  [[noreturn]] void Throw() const {
    std::string what = "invalid study config (offending keys: " + JoinKeys(keys_) + ")";
    for (const std::string& m : messages_) what += "\n  " + m;
    throw ConfigError(what, keys_);
  }

 private:
  std::vector<std::string> keys_;
  std::vector<std::string> messages_;
};

void CheckKeys(const Json& object, const std::set<std::string>& allowed, const std::string& prefix,
               Problems& problems) {
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) problems.Add(prefix + item.key(), "unknown key");
  }
}

void ReadInt(const Json& object, const char* key, const std::string& path, int minimum, int& out,
             Problems& problems) {
  if (!object.contains(key)) return;
  const Json& v = object.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < minimum ||
      v.get<std::int64_t>() > std::numeric_limits<int>::max()) {
    problems.Add(path, "expected an integer >= " + std::to_string(minimum));
    return;
  }
  out = v.get<int>();
}

void ReadReal(const Json& object, const char* key, const std::string& path, double& out,
              Problems& problems) {
  if (!object.contains(key)) return;
  const Json& v = object.at(key);
  if (!v.is_number()) {
    problems.Add(path, "expected a number");
    return;
  }
  out = v.get<double>();
}

void CheckGraphSize(const ModelSpec& model, int n, const std::string& key, Problems& problems) {
  if (n < 2) {
    problems.Add(key, "sample size must be at least 2");
    return;
  }
  if (model.max_degree > n - 1) {
    problems.Add(key, "max_degree " + std::to_string(model.max_degree) + " exceeds n - 1 for n = " +
                          std::to_string(n));
  } else if (model.style == GraphStyle::kRegular &&
             (static_cast<std::int64_t>(n) * model.max_degree) % 2 != 0) {
    problems.Add(key, "no " + std::to_string(model.max_degree) + "-regular graph on " +
                          std::to_string(n) + " vertices");
  }
}

double BinomialBand(double p, int replicates) {
  return 3.0 * std::sqrt(p * (1.0 - p) / replicates);
}

std::string Format(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

OrderedJson ChecksJson(const std::vector<StudyCheck>& checks) {
  OrderedJson out = OrderedJson::array();
  for (const StudyCheck& c : checks) {
    out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return out;
}

OrderedJson NullableNumber(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::vector<std::string> keys)
    : std::invalid_argument(what), keys_(std::move(keys)) {}

std::string_view ToString(StudyKind kind) {
  switch (kind) {
    case StudyKind::kCoverage: return "coverage";
    case StudyKind::kConsistency: return "consistency";
    case StudyKind::kNormality: return "normality";
  }
  return "unknown";
}

StudyConfig ParseStudyConfig(const Json& doc) {
  Problems problems;
  if (!doc.is_object()) {
    problems.Add("<root>", "config must be a JSON object");
    problems.Throw();
  }
  StudyConfig config;
  if (!doc.contains("study") || !doc.at("study").is_string()) {
    problems.Add("study", "required; one of coverage, consistency, normality");
    problems.Throw();
  }
  const std::string study = doc.at("study").get<std::string>();
  if (study == "coverage") {
    config.kind = StudyKind::kCoverage;
  } else if (study == "consistency") {
    config.kind = StudyKind::kConsistency;
  } else if (study == "normality") {
    config.kind = StudyKind::kNormality;
  } else {
    problems.Add("study", "unknown study \"" + study + "\"");
    problems.Throw();
  }
  if (config.kind == StudyKind::kNormality) config.replicates = 5000;

  std::set<std::string> allowed{"study", "replicates", "seed", "model"};
  switch (config.kind) {
    case StudyKind::kCoverage: allowed.insert({"n", "alpha", "p_obs", "solver"}); break;
    case StudyKind::kConsistency: allowed.insert("n_grid"); break;
    case StudyKind::kNormality: allowed.insert("n"); break;
  }
  CheckKeys(doc, allowed, "", problems);

  ReadInt(doc, "replicates", "replicates", 1, config.replicates, problems);
  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      config.seed = s.get<std::uint64_t>();
    } else {
      problems.Add("seed", "expected a nonnegative integer");
    }
  }

  if (doc.contains("model")) {
    const Json& m = doc.at("model");
    if (!m.is_object()) {
      problems.Add("model", "expected an object");
    } else {
      CheckKeys(m, {"graph", "max_degree", "mu", "a", "b"}, "model.", problems);
      if (m.contains("graph")) {
        std::optional<GraphStyle> style;
        if (m.at("graph").is_string()) style = ParseGraphStyle(m.at("graph").get<std::string>());
        if (style) {
          config.model.style = *style;
        } else {
          problems.Add("model.graph", "expected \"regular\" or \"bounded_random\"");
        }
      }
      ReadInt(m, "max_degree", "model.max_degree", 0, config.model.max_degree, problems);
      ReadReal(m, "mu", "model.mu", config.model.mu, problems);
      ReadReal(m, "a", "model.a", config.model.vertex_scale, problems);
      ReadReal(m, "b", "model.b", config.model.edge_scale, problems);
      if (config.model.vertex_scale < 0.0) problems.Add("model.a", "must be nonnegative");
      if (config.model.edge_scale < 0.0) problems.Add("model.b", "must be nonnegative");
    }
  }

  if (config.kind == StudyKind::kConsistency) {
    if (doc.contains("n_grid")) {
      const Json& g = doc.at("n_grid");
      std::vector<int> grid;
      bool ok = g.is_array() && !g.empty();
      if (ok) {
        for (const Json& v : g) {
          if (!v.is_number_integer() || v.get<std::int64_t>() < 2 ||
              v.get<std::int64_t>() > std::numeric_limits<int>::max()) {
            ok = false;
            break;
          }
          grid.push_back(v.get<int>());
        }
      }
      if (ok) {
        config.n_grid = std::move(grid);
      } else {
        problems.Add("n_grid", "expected a nonempty array of integers >= 2");
      }
    }
    for (int n : config.n_grid) CheckGraphSize(config.model, n, "n_grid", problems);
  } else {
    ReadInt(doc, "n", "n", 2, config.n, problems);
    CheckGraphSize(config.model, config.n, "n", problems);
  }

  if (config.kind == StudyKind::kCoverage) {
    ReadReal(doc, "alpha", "alpha", config.alpha, problems);
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) problems.Add("alpha", "must lie in (0, 1)");
    ReadReal(doc, "p_obs", "p_obs", config.p_obs, problems);
    if (!(config.p_obs >= 0.0 && config.p_obs <= 1.0)) problems.Add("p_obs", "must lie in [0, 1]");
    if (doc.contains("solver")) {
      const Json& s = doc.at("solver");
      if (!s.is_object()) {
        problems.Add("solver", "expected an object");
      } else {
        CheckKeys(s, {"gap", "time_limit"}, "solver.", problems);
        ReadReal(s, "gap", "solver.gap", config.gap, problems);
        if (!(config.gap >= 0.0)) problems.Add("solver.gap", "must be nonnegative");
        if (s.contains("time_limit") && !s.at("time_limit").is_null()) {
          double limit = 0.0;
          ReadReal(s, "time_limit", "solver.time_limit", limit, problems);
          if (limit > 0.0) {
            config.time_limit = limit;
          } else {
            problems.Add("solver.time_limit", "must be positive");
          }
        }
      }
    }
  }

  if (!problems.empty()) problems.Throw();
  return config;
}

StudyConfig LoadStudyConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open study config " + path, {"<file>"});
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("study config " + path + " is not valid JSON: " + e.what(), {"<root>"});
  }
  return ParseStudyConfig(doc);
}

OrderedJson ToJson(const StudyConfig& config) {
  OrderedJson out;
  out["study"] = ToString(config.kind);
  if (config.kind == StudyKind::kConsistency) {
    out["n_grid"] = config.n_grid;
  } else {
    out["n"] = config.n;
  }
  out["replicates"] = config.replicates;
  if (config.kind == StudyKind::kCoverage) {
    out["alpha"] = config.alpha;
    out["p_obs"] = config.p_obs;
  }
  out["seed"] = config.seed;
  out["model"] = {{"graph", ToString(config.model.style)},
                  {"max_degree", config.model.max_degree},
                  {"mu", config.model.mu},
                  {"a", config.model.vertex_scale},
                  {"b", config.model.edge_scale}};
  if (config.kind == StudyKind::kCoverage) {
    OrderedJson solver;
    solver["gap"] = config.gap;
    solver["time_limit"] = config.time_limit ? OrderedJson(*config.time_limit) : OrderedJson(nullptr);
    out["solver"] = solver;
  }
  return out;
}

CoverageConfig ToCoverageConfig(const StudyConfig& config, int threads) {
  CoverageConfig out;
  out.model = config.model;
  out.n = config.n;
  out.replicates = config.replicates;
  out.alpha = config.alpha;
  out.p_obs = config.p_obs;
  out.seed = config.seed;
  out.threads = threads;
  out.solver.gap_tolerance = config.gap;
  out.solver.time_limit_seconds = config.time_limit;
  return out;
}

ConsistencyConfig ToConsistencyConfig(const StudyConfig& config, int threads) {
  ConsistencyConfig out;
  out.model = config.model;
  out.n_grid = config.n_grid;
  out.replicates = config.replicates;
  out.seed = config.seed;
  out.threads = threads;
  return out;
}

NormalityConfig ToNormalityConfig(const StudyConfig& config, int threads) {
  NormalityConfig out;
  out.model = config.model;
  out.n = config.n;
  out.replicates = config.replicates;
  out.seed = config.seed;
  out.threads = threads;
  return out;
}

std::vector<StudyCheck> CheckCoverage(const CoverageReport& report) {
  std::vector<StudyCheck> checks;
  const CoverageConfig& config = report.config;
  checks.push_back({"solves_optimal", report.flagged.empty(),
                    std::to_string(report.flagged.size()) + " flagged replicates"});
  checks.push_back({"estimator_ordering", report.ordering_violations.empty(),
                    std::to_string(report.ordering_violations.size()) + " violating replicates"});
  const double nominal = 1.0 - config.alpha;
  const double band = BinomialBand(nominal, config.replicates);
  for (const EstimatorSummary& s : report.estimators) {
    if (s.name == "v1" || s.name == "v2" || s.name == "v2_prime") {
      checks.push_back({"coverage_" + s.name, s.coverage >= nominal - band,
                        "coverage " + Format(s.coverage) + " vs minimum " + Format(nominal - band)});
    } else if (s.name == "naive" && config.model.edge_scale == 0.0) {
      checks.push_back({"coverage_naive", std::abs(s.coverage - nominal) <= band,
                        "coverage " + Format(s.coverage) + " vs " + Format(nominal) + " +/- " +
                            Format(band)});
    }
  }
  return checks;
}

std::vector<StudyCheck> CheckConsistency(const ConsistencyReport& report) {
  std::vector<StudyCheck> checks;
  if (report.rows.size() < 2 || report.config.replicates < 2) return checks;
  std::vector<ConsistencyRow> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ConsistencyRow& x, const ConsistencyRow& y) { return x.n < y.n; });
  bool shrinking = true;
  std::string bias_detail = "|bias|:";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    bias_detail += " " + Format(std::abs(rows[k].bias));
    if (k > 0 && !(std::abs(rows[k].bias) < std::abs(rows[k - 1].bias))) shrinking = false;
  }
  checks.push_back({"bias_shrinks", shrinking, bias_detail});
  checks.push_back({"rmse_decreases", rows.back().rmse < rows.front().rmse,
                    "rmse " + Format(rows.front().rmse) + " at n=" + std::to_string(rows.front().n) +
                        ", " + Format(rows.back().rmse) + " at n=" + std::to_string(rows.back().n)});
  return checks;
}

std::vector<StudyCheck> CheckNormality(const NormalityReport& report) {
  return {{"ks_not_rejected", report.p_value >= 0.001,
           "KS statistic " + Format(report.ks_statistic) + ", p-value " + Format(report.p_value)}};
}

bool StudyResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const StudyCheck& c) { return c.passed; });
}

StudyResult RunStudy(const StudyConfig& config, int threads) {
  StudyResult result;
  OrderedJson& out = result.report;
  out["config"] = ToJson(config);
  switch (config.kind) {
    case StudyKind::kCoverage: {
      const CoverageReport report = RunCoverageStudy(ToCoverageConfig(config, threads));
      out["truth_n_variance"] = report.truth_n_variance;
      OrderedJson estimators = OrderedJson::array();
      for (const EstimatorSummary& s : report.estimators) {
        estimators.push_back({{"name", s.name},
                              {"replicates", s.replicates},
                              {"mean_n_estimate", s.mean_n_estimate},
                              {"coverage", NullableNumber(s.coverage)},
                              {"mean_width", NullableNumber(s.mean_width)},
                              {"under_rate", s.under_rate}});
      }
      out["estimators"] = estimators;
      out["flagged_replicates"] = report.flagged;
      out["ordering_violations"] = report.ordering_violations;
      out["v2_fast_path_hits"] = report.fast_path_hits;
      result.checks = CheckCoverage(report);
      break;
    }
    case StudyKind::kConsistency: {
      const ConsistencyReport report = RunConsistencyStudy(ToConsistencyConfig(config, threads));
      OrderedJson rows = OrderedJson::array();
      for (const ConsistencyRow& r : report.rows) {
        rows.push_back({{"n", r.n},
                        {"replicates", r.replicates},
                        {"mean_truth_n_variance", r.mean_truth},
                        {"mean_n_v1_oracle", r.mean_estimate},
                        {"bias", r.bias},
                        {"rmse", r.rmse}});
      }
      out["rows"] = rows;
      result.checks = CheckConsistency(report);
      break;
    }
    case StudyKind::kNormality: {
      const NormalityReport report = RunNormalityStudy(ToNormalityConfig(config, threads));
      out["ks_statistic"] = report.ks_statistic;
      out["p_value"] = report.p_value;
      out["mean_z"] = report.mean_z;
      out["sd_z"] = report.sd_z;
      result.checks = CheckNormality(report);
      break;
    }
  }
  out["checks"] = ChecksJson(result.checks);
  out["passed"] = result.passed();
  return result;
}

}  // namespace depbound
