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

#include <gtest/gtest.h>

#include <algorithm>

#include "depbound/study_io.h"

namespace depbound {
namespace {

using Json = nlohmann::json;

std::vector<std::string> OffendingKeys(const Json& doc) {
  try {
    ParseStudyConfig(doc);
  } catch (const ConfigError& e) {
    std::vector<std::string> keys = e.keys();
    std::sort(keys.begin(), keys.end());
    return keys;
  }
  return {};
}

TEST(ParseStudyConfig, DefaultsPerStudy) {
  const StudyConfig coverage = ParseStudyConfig(Json{{"study", "coverage"}});
  EXPECT_EQ(coverage.kind, StudyKind::kCoverage);
  EXPECT_EQ(coverage.n, 1000);
  EXPECT_EQ(coverage.replicates, 2000);
  EXPECT_EQ(coverage.alpha, 0.05);
  EXPECT_EQ(coverage.p_obs, 0.5);
  EXPECT_EQ(coverage.model.max_degree, 2);
  EXPECT_EQ(coverage.model.style, GraphStyle::kRegular);
  EXPECT_EQ(ParseStudyConfig(Json{{"study", "normality"}}).replicates, 5000);
  EXPECT_EQ(ParseStudyConfig(Json{{"study", "consistency"}}).n_grid, (std::vector<int>{100, 400, 1600}));
}

TEST(ParseStudyConfig, ReadsEveryField) {
  const Json doc = Json::parse(R"({
    "study": "coverage", "n": 300, "replicates": 40, "alpha": 0.1, "p_obs": 0.25,
    "seed": 18446744073709551615,
    "model": {"graph": "bounded_random", "max_degree": 4, "mu": 1.5, "a": 0.5, "b": 2},
    "solver": {"gap": 1e-6, "time_limit": 30}
  })");
  const StudyConfig c = ParseStudyConfig(doc);
  EXPECT_EQ(c.n, 300);
  EXPECT_EQ(c.replicates, 40);
  EXPECT_EQ(c.alpha, 0.1);
  EXPECT_EQ(c.p_obs, 0.25);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.model.style, GraphStyle::kBoundedRandom);
  EXPECT_EQ(c.model.max_degree, 4);
  EXPECT_EQ(c.model.mu, 1.5);
  EXPECT_EQ(c.model.vertex_scale, 0.5);
  EXPECT_EQ(c.model.edge_scale, 2.0);
  EXPECT_EQ(c.gap, 1e-6);
  ASSERT_TRUE(c.time_limit.has_value());
  EXPECT_EQ(*c.time_limit, 30.0);
}

TEST(ParseStudyConfig, ListsAllOffendingKeys) {
  const Json doc = Json::parse(R"({
    "study": "coverage", "n": -1, "alpha": 1.5, "color": "red",
    "model": {"graph": "ring", "a": -1, "extra": 0},
    "solver": {"gap": "small"}
  })");
  EXPECT_EQ(OffendingKeys(doc), (std::vector<std::string>{"alpha", "color", "model.a", "model.extra",
                                                          "model.graph", "n", "solver.gap"}));
}

TEST(ParseStudyConfig, RejectsKeysOfOtherStudies) {
  EXPECT_EQ(OffendingKeys(Json{{"study", "normality"}, {"n_grid", {10, 20}}, {"alpha", 0.1}}),
            (std::vector<std::string>{"alpha", "n_grid"}));
  EXPECT_EQ(OffendingKeys(Json{{"study", "consistency"}, {"n", 100}}), (std::vector<std::string>{"n"}));
}

TEST(ParseStudyConfig, RejectsImpossibleGraphs) {
  EXPECT_EQ(OffendingKeys(Json{{"study", "normality"}, {"n", 5}, {"model", {{"max_degree", 1}}}}),
            (std::vector<std::string>{"n"}));
  EXPECT_EQ(OffendingKeys(Json{{"study", "consistency"}, {"n_grid", {4, 6}}, {"model", {{"max_degree", 4}}}}),
            (std::vector<std::string>{"n_grid"}));
}

TEST(ParseStudyConfig, RequiresStudy) {
  EXPECT_EQ(OffendingKeys(Json{{"n", 10}}), (std::vector<std::string>{"study"}));
  EXPECT_EQ(OffendingKeys(Json{{"study", "power"}}), (std::vector<std::string>{"study"}));
  EXPECT_EQ(OffendingKeys(Json::array()), (std::vector<std::string>{"<root>"}));
}

TEST(StudyConfigJson, RoundTrips) {
  for (const char* text : {R"({"study": "coverage", "solver": {"time_limit": 5}})",
                           R"({"study": "consistency", "n_grid": [10, 20], "seed": 4})",
                           R"({"study": "normality", "model": {"b": 0}})"}) {
    const StudyConfig c = ParseStudyConfig(Json::parse(text));
    const StudyConfig back = ParseStudyConfig(Json::parse(ToJson(c).dump()));
    EXPECT_EQ(ToJson(back).dump(), ToJson(c).dump());
  }
}

TEST(RunStudy, ReportDependsOnlyOnConfig) {
  StudyConfig c = ParseStudyConfig(Json{{"study", "coverage"}, {"n", 80}, {"replicates", 30}});
  const std::string a = RunStudy(c, 1).report.dump(2);
  const std::string b = RunStudy(c, 1).report.dump(2);
  const std::string threaded = RunStudy(c, 3).report.dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, threaded);
  c.seed = 2;
  EXPECT_NE(RunStudy(c, 1).report.dump(2), a);
}

TEST(RunStudy, EchoesConfigAndRecordsChecks) {
  const StudyConfig c =
      ParseStudyConfig(Json{{"study", "consistency"}, {"n_grid", {30, 120}}, {"replicates", 50}, {"seed", 9}});
  const StudyResult r = RunStudy(c);
  EXPECT_EQ(r.report["config"].dump(), ToJson(c).dump());
  EXPECT_EQ(r.report["rows"].size(), 2u);
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_EQ(r.report["checks"].size(), 2u);
  EXPECT_EQ(r.report["passed"].get<bool>(), r.passed());
}

TEST(RunStudy, SingleReplicateConsistencyHasNoChecks) {
  const StudyConfig c =
      ParseStudyConfig(Json{{"study", "consistency"}, {"n_grid", {30, 60}}, {"replicates", 1}});
  const StudyResult r = RunStudy(c);
  EXPECT_TRUE(r.checks.empty());
  EXPECT_TRUE(r.passed());
}

TEST(CheckCoverage, UsesThreeStandardErrorBand) {
  CoverageReport report;
  report.config.replicates = 2000;
  report.config.alpha = 0.05;
  const double floor = 0.95 - 3.0 * std::sqrt(0.05 * 0.95 / 2000);
  for (const char* name : {"naive", "v1", "v2", "v2_prime"}) {
    EstimatorSummary s;
    s.name = name;
    s.coverage = floor + 1e-9;
    report.estimators.push_back(s);
  }
  report.estimators[2].coverage = floor - 1e-9;
  const std::vector<StudyCheck> checks = CheckCoverage(report);
  int failed = 0;
  for (const StudyCheck& c : checks) {
    if (!c.passed) {
      ++failed;
      EXPECT_EQ(c.name, "coverage_v2");
    }
  }
  EXPECT_EQ(failed, 1);
}

}  // namespace
}  // namespace depbound
