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

#include <random>

#include "depbound/core.h"
#include "test_util.h"

namespace depbound {
namespace {

using testing::MakeData;
using testing::MakeMatrix;

TEST(Validate, EmptyGraphIsCompatible) {
  EXPECT_TRUE(Validate(MakeData({0, 1}, {0, 0})).compatible);
}

TEST(Validate, ObservedDegreeAboveReportedIsFlaggedAtThatVertex) {
  const CompatibilityReport r = Validate(MakeData({0, 1}, {0, 1}, {{1, 2}}));
  ASSERT_FALSE(r.compatible);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::kVertex);
  EXPECT_EQ(r.violations[0].vertex, 0);
}

TEST(Validate, SingleObservedEdgeWithinCaps) {
  EXPECT_TRUE(Validate(MakeData({0, 0, 1, 1}, {1, 1, 1, 1}, {{1, 3}})).compatible);
}

TEST(Validate, ReportsEveryStructuralProblem) {
  ObservedData data = MakeData({0, 1, 2}, {1, 1});
  EXPECT_FALSE(Validate(data).compatible);
  data = MakeData({0, 1, 2}, {2, -1, 2}, {{1, 2}, {1, 2}, {1, 1}});
  const CompatibilityReport r = Validate(data);
  EXPECT_FALSE(r.compatible);
  EXPECT_GE(r.violations.size(), 4u);  // negative degree, duplicate, loop, degree of vertex 2
  EXPECT_FALSE(Validate(ObservedData{}).compatible);
}

TEST(IsCompatible, ZeroMatrixWithoutObservedEdges) {
  EXPECT_TRUE(IsCompatible(AdjacencyMatrix(3), MakeData({0, 1, 2}, {0, 5, 1})).compatible);
}

TEST(IsCompatible, MissingObservedEdge) {
  const CompatibilityReport r = IsCompatible(AdjacencyMatrix(2), MakeData({0, 1}, {1, 1}, {{1, 2}}));
  ASSERT_FALSE(r.compatible);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::kEdge);
  EXPECT_EQ(r.violations[0].edge, VertexPair(0, 1));
}

TEST(IsCompatible, PerfectMatchingWithinUnitCaps) {
  EXPECT_TRUE(IsCompatible(MakeMatrix(4, {{1, 2}, {3, 4}}), MakeData({0, 0, 1, 1}, {1, 1, 1, 1}))
                  .compatible);
}

TEST(IsCompatible, DimensionMismatchThrows) {
  EXPECT_THROW(IsCompatible(AdjacencyMatrix(3), MakeData({0, 1}, {1, 1})), DimensionError);
}

TEST(IsCompatible, MoreObservedEdgesNeverEnlargeTheCompatibleSet) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 5;
    ObservedData data = testing::RandomData(rng, n, n, false);
    std::vector<VertexPair> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (std::bernoulli_distribution(0.4)(rng)) pairs.emplace_back(i, j);
      }
    }
    const AdjacencyMatrix a(n, pairs);
    ObservedData more = data;
    more.observed_edges.emplace_back(std::uniform_int_distribution<int>(0, 1)(rng),
                                     std::uniform_int_distribution<int>(2, n - 1)(rng));
    if (IsCompatible(a, more).compatible) {
      EXPECT_TRUE(IsCompatible(a, data).compatible);
    }
  }
}

TEST(TruncatedDegrees, Examples) {
  using V = std::vector<std::int64_t>;
  EXPECT_EQ(TruncatedDegrees(MakeData({0, 0, 0, 0}, {1, 1, 1, 1})), (V{1, 1, 1, 1}));
  EXPECT_EQ(TruncatedDegrees(MakeData({0, 0, 0, 0}, {10, 2, 3, 1})), (V{3, 2, 3, 1}));
  EXPECT_EQ(TruncatedDegrees(MakeData({0}, {5})), (V{0}));
}

TEST(TruncatedDegrees, IdempotentAndPointwiseBelow) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    ObservedData data;
    for (int i = 0; i < n; ++i) {
      data.outcomes.push_back(0.0);
      data.degrees.push_back(std::uniform_int_distribution<int>(0, 40)(rng));
    }
    const auto once = TruncatedDegrees(data);
    ObservedData again = data;
    again.degrees = once;
    EXPECT_EQ(TruncatedDegrees(again), once);
    for (int i = 0; i < n; ++i) EXPECT_LE(once[i], data.degrees[i]);
  }
}

TEST(SampleMean, Examples) {
  EXPECT_DOUBLE_EQ(SampleMean(std::vector<double>{0, 0, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(SampleMean(std::vector<double>{2, 4, 6}), 4.0);
  EXPECT_THROW(SampleMean(std::vector<double>{}), std::invalid_argument);
}

TEST(SampleVariance, UsesTheOneOverNDivisor) {
  EXPECT_DOUBLE_EQ(SampleVariance(std::vector<double>{0, 0, 1, 1}), 0.25);
  EXPECT_EQ(SampleVariance(std::vector<double>{3.5, 3.5, 3.5}), 0.0);
  EXPECT_THROW(SampleVariance(std::vector<double>{}), std::invalid_argument);
}

TEST(SampleVariance, BinaryDataGivesPTimesOneMinusP) {
  // 0.328 * 0.672 = 0.220416; 82 of 250 ones gives exactly p = 0.328.
  std::vector<double> x(250, 0.0);
  for (int i = 0; i < 82; ++i) x[i] = 1.0;
  EXPECT_NEAR(SampleVariance(x), 0.220416, 1e-15);
}

TEST(SampleVariance, ShiftInvariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(30);
    for (double& v : x) v = z(rng);
    const double c = 10.0 * z(rng);
    std::vector<double> y = x;
    for (double& v : y) v += c;
    EXPECT_NEAR(SampleVariance(y), SampleVariance(x), 1e-12);
  }
}

TEST(InducedSubgraph, Examples) {
  const AdjacencyMatrix triangle = MakeMatrix(3, {{1, 2}, {1, 3}, {2, 3}});
  EXPECT_EQ(InducedSubgraph(triangle, std::vector<int>{0, 1}), MakeMatrix(2, {{1, 2}}));
  EXPECT_EQ(InducedSubgraph(triangle, std::vector<int>{0, 1, 2}), triangle);
  const AdjacencyMatrix path = MakeMatrix(3, {{1, 2}, {2, 3}});
  EXPECT_EQ(InducedSubgraph(path, std::vector<int>{0, 2}).edge_count(), 0u);
}

TEST(InducedSubgraph, RenumbersInSubsetOrder) {
  const AdjacencyMatrix path = MakeMatrix(4, {{1, 2}, {2, 3}, {3, 4}});
  EXPECT_EQ(InducedSubgraph(path, std::vector<int>{3, 2, 0}), MakeMatrix(3, {{1, 2}}));
  EXPECT_THROW(InducedSubgraph(path, std::vector<int>{0, 4}), DimensionError);
}

TEST(AdjacencyMatrix, SymmetricZeroDiagonalAndRowSums) {
  const AdjacencyMatrix a = MakeMatrix(4, {{2, 1}, {1, 3}, {1, 2}});
  EXPECT_EQ(a.edge_count(), 2u);
  EXPECT_EQ(a.at(0, 1), a.at(1, 0));
  EXPECT_EQ(a.at(2, 2), 0);
  EXPECT_EQ(a.degrees(), (std::vector<int>{2, 1, 1, 0}));
  EXPECT_THROW(MakeMatrix(3, {{1, 1}}), DimensionError);
  EXPECT_THROW(MakeMatrix(3, {{1, 4}}), DimensionError);
}

}  // namespace
}  // namespace depbound
