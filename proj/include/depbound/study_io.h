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

// Declarative study configs and JSON study reports.
//
// A config is a JSON object:
//
//   {
//     "study": "coverage" | "consistency" | "normality",
//     "n": 1000,                   (coverage, normality)
//     "n_grid": [100, 400, 1600],  (consistency)
//     "replicates": 2000,
//     "alpha": 0.05,               (coverage)
//     "p_obs": 0.5,                (coverage)
//     "seed": 1,
//     "model": {"graph": "regular" | "bounded_random", "max_degree": 2,
//               "mu": 0.0, "a": 1.0, "b": 1.0},
//     "solver": {"gap": 1e-9, "time_limit": 60}   (coverage)
//   }
//
// Every key except "study" is optional. Keys that do not apply to the chosen
// study are rejected.

#ifndef DEPBOUND_STUDY_IO_H_
#define DEPBOUND_STUDY_IO_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "depbound/simulation.h"

namespace depbound {

enum class StudyKind { kCoverage, kConsistency, kNormality };

std::string_view ToString(StudyKind kind);

struct StudyConfig {
  StudyKind kind = StudyKind::kCoverage;
  ModelSpec model;
  int n = 1000;
  std::vector<int> n_grid{100, 400, 1600};
  int replicates = 2000;
  double alpha = 0.05;
  double p_obs = 0.5;
  std::uint64_t seed = 1;
  double gap = 1e-9;
  std::optional<double> time_limit;
};

// Raised for configs that do not fit the schema. keys() names every
// offending key, with nested keys written as "model.a".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& what, std::vector<std::string> keys);
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
};

StudyConfig ParseStudyConfig(const nlohmann::json& doc);
StudyConfig LoadStudyConfig(const std::string& path);

// The config with every default filled in; parses back to the same config.
nlohmann::ordered_json ToJson(const StudyConfig& config);

CoverageConfig ToCoverageConfig(const StudyConfig& config, int threads);
ConsistencyConfig ToConsistencyConfig(const StudyConfig& config, int threads);
NormalityConfig ToNormalityConfig(const StudyConfig& config, int threads);

// A pass/fail statement about a study's results.
struct StudyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Checks for each study:
//   coverage: no flagged replicates, no ordering violations, and coverage of
//     the v1, v2 and v2_prime intervals at least 1 - alpha minus three
//     binomial standard errors; with b = 0 also naive coverage within three
//     standard errors of 1 - alpha.
//   consistency: |bias| strictly decreasing along the sorted grid and RMSE at
//     the largest n below RMSE at the smallest (needs two grid points and two
//     replicates).
//   normality: KS p-value at least 0.001.
std::vector<StudyCheck> CheckCoverage(const CoverageReport& report);
std::vector<StudyCheck> CheckConsistency(const ConsistencyReport& report);
std::vector<StudyCheck> CheckNormality(const NormalityReport& report);

struct StudyResult {
  nlohmann::ordered_json report;
  std::vector<StudyCheck> checks;

  bool passed() const;
};

// Runs the configured study. The report echoes the config and contains no
// timings, so it depends only on the config.
StudyResult RunStudy(const StudyConfig& config, int threads = 1);

}  // namespace depbound

#endif  // DEPBOUND_STUDY_IO_H_
