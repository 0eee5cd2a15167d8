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
#include <cmath>
#include <numeric>
#include <random>

#include "depbound/estimators.h"
#include "test_util.h"

namespace depbound {
namespace {

using testing::MakeData;
using testing::MakeMatrix;

const ObservedData kFixture = MakeData({0, 0, 1, 1}, {1, 1, 1, 1});

// The full double sum over i and j, written out without edge lists.
double DirectV1(const AdjacencyMatrix& a, const ObservedData& data) {
  const int n = data.n();
  const double mean = std::accumulate(data.outcomes.begin(), data.outcomes.end(), 0.0) / n;
  double s2 = 0.0;
  for (double x : data.outcomes) s2 += (x - mean) * (x - mean);
  s2 /= n;
  double cross = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cross += a.at(i, j) * (data.outcomes[i] - mean) * (data.outcomes[j] - mean);
    }
  }
  return (n * s2 + cross) / (static_cast<double>(n) * n);
}

AdjacencyMatrix RandomMatrix(int n, double p, std::mt19937_64& rng) {
  std::vector<VertexPair> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::bernoulli_distribution(p)(rng)) pairs.emplace_back(i, j);
    }
  }
  return AdjacencyMatrix(n, std::move(pairs));
}

TEST(V1, ZeroMatrixEqualsNaive) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const ObservedData d = testing::RandomData(rng, 2, 30, false);
    EXPECT_DOUBLE_EQ(V1(AdjacencyMatrix(d.n()), d).value, NaiveVariance(d).value);
  }
}

TEST(V1, Examples) {
  EXPECT_DOUBLE_EQ(V1(MakeMatrix(4, {{1, 2}, {3, 4}}), kFixture).value, 0.125);
  EXPECT_DOUBLE_EQ(V1(MakeMatrix(4, {{1, 3}}), kFixture).value, 0.03125);
  const VarianceEstimate e = V1(MakeMatrix(4, {{1, 3}}), kFixture);
  EXPECT_EQ(e.kind, EstimatorKind::kV1);
  ASSERT_TRUE(e.at_matrix.has_value());
  EXPECT_EQ(*e.at_matrix, MakeMatrix(4, {{1, 3}}));
}

TEST(V1, NegativeAtAdversarialMatrixIsReturnedUnclamped) {
  const ObservedData d = MakeData({0, 1}, {1, 1});
  const VarianceEstimate e = V1(MakeMatrix(2, {{1, 2}}), d);
  // (1/4)(2 * 0.25 + 2 * (-0.25)) = 0
  EXPECT_DOUBLE_EQ(e.value, 0.0);
  const VarianceEstimate neg = V1(MakeMatrix(3, {{1, 3}, {2, 3}}), MakeData({0, 0, 3}, {2, 2, 2}));
  EXPECT_TRUE(neg.negative());
}

TEST(V1, MatchesDirectDoubleSum) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const ObservedData d = testing::RandomData(rng, 2, 15, false);
    const AdjacencyMatrix a = RandomMatrix(d.n(), 0.3, rng);
    EXPECT_NEAR(V1(a, d).value, DirectV1(a, d), 1e-14);
  }
}

TEST(V1, DimensionMismatchThrows) {
  EXPECT_THROW(V1(AdjacencyMatrix(3), kFixture), DimensionError);
  EXPECT_THROW(V2(AdjacencyMatrix(5), kFixture), DimensionError);
}

TEST(V2, Examples) {
  EXPECT_DOUBLE_EQ(V2(AdjacencyMatrix(4), kFixture).value, 0.0625);
  EXPECT_DOUBLE_EQ(V2(MakeMatrix(4, {{1, 2}, {3, 4}}), kFixture).value, 0.125);
  EXPECT_DOUBLE_EQ(V2(MakeMatrix(4, {{1, 3}, {2, 4}}), kFixture).value, 0.125);
}

TEST(V2, StrictlyIncreasingInEdges) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const ObservedData d = testing::RandomData(rng, 3, 12, false);
    AdjacencyMatrix a = RandomMatrix(d.n(), 0.3, rng);
    for (int i = 0; i < d.n(); ++i) {
      for (int j = i + 1; j < d.n(); ++j) {
        if (a.has_edge(i, j)) continue;
        const AdjacencyMatrix b = a.with_edge(i, j);
        EXPECT_GT(V2(b, d).value, V2(a, d).value);
      }
    }
  }
}

TEST(V2Prime, Examples) {
  EXPECT_DOUBLE_EQ(V2Prime(kFixture).value, 0.125);
  const ObservedData isolated = MakeData({0, 0, 1, 1}, {0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(V2Prime(isolated).value, NaiveVariance(isolated).value);
  const ObservedData saturated = MakeData({0, 0, 1, 1}, {3, 9, 3, 4});
  EXPECT_DOUBLE_EQ(V2Prime(saturated).value, SampleVariance(saturated.outcomes));
}

TEST(V2Prime, IgnoresObservedEdges) {
  EXPECT_EQ(V2Prime(MakeData({0, 0, 1, 1}, {1, 1, 1, 1}, {{1, 3}})).value, V2Prime(kFixture).value);
}

TEST(V2Prime, BoundsV2OverCompatibleMatrices) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const ObservedData d = testing::RandomData(rng, 2, 10, false);
    // A random compatible matrix: observed edges plus random additions within caps.
    std::vector<VertexPair> pairs = d.observed_edges;
    std::vector<std::int64_t> used(d.n(), 0);
    for (const VertexPair& e : pairs) {
      ++used[e.first];
      ++used[e.second];
    }
    for (int i = 0; i < d.n(); ++i) {
      for (int j = i + 1; j < d.n(); ++j) {
        if (std::find(pairs.begin(), pairs.end(), VertexPair(i, j)) != pairs.end()) continue;
        if (used[i] < d.degrees[i] && used[j] < d.degrees[j] && std::bernoulli_distribution(0.5)(rng)) {
          pairs.emplace_back(i, j);
          ++used[i];
          ++used[j];
        }
      }
    }
    const AdjacencyMatrix a(d.n(), pairs);
    ASSERT_TRUE(IsCompatible(a, d).compatible);
    EXPECT_LE(V2(a, d).value, V2Prime(d).value);
  }
}

TEST(Naive, Examples) {
  EXPECT_DOUBLE_EQ(NaiveVariance(kFixture).value, 0.0625);
  EXPECT_EQ(NaiveVariance(MakeData({2, 2, 2}, {0, 0, 0})).value, 0.0);
  EXPECT_FALSE(NaiveVariance(kFixture).at_matrix.has_value());
}

TEST(Naive, BinaryOutcomesStandardError) {
  // 335 of 1022 binary outcomes: mean 0.3278, the printed 0.328.
  ObservedData d;
  for (int i = 0; i < 1022; ++i) {
    d.outcomes.push_back(i < 335 ? 1.0 : 0.0);
    d.degrees.push_back(0);
  }
  EXPECT_NEAR(std::sqrt(NaiveVariance(d).value), 0.0147, 0.00005);
}

TEST(Estimators, InvariantUnderVertexPermutation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const ObservedData d = testing::RandomData(rng, 2, 12, false);
    const int n = d.n();
    const AdjacencyMatrix a = RandomMatrix(n, 0.4, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ObservedData p;
    p.outcomes.resize(n);
    p.degrees.resize(n);
    for (int i = 0; i < n; ++i) {
      p.outcomes[perm[i]] = d.outcomes[i];
      p.degrees[perm[i]] = d.degrees[i];
    }
    std::vector<VertexPair> edges;
    for (const VertexPair& e : a.edges()) edges.emplace_back(perm[e.first], perm[e.second]);
    const AdjacencyMatrix pa(n, edges);
    EXPECT_NEAR(V1(pa, p).value, V1(a, d).value, 1e-14);
    EXPECT_NEAR(V2(pa, p).value, V2(a, d).value, 1e-14);
  }
}

TEST(EstimatorKind, NamesRoundTrip) {
  for (EstimatorKind k :
       {EstimatorKind::kNaive, EstimatorKind::kV1, EstimatorKind::kV2, EstimatorKind::kV2Prime}) {
    EXPECT_EQ(ParseEstimatorKind(ToString(k)), k);
  }
  EXPECT_FALSE(ParseEstimatorKind("v3").has_value());
}

}  // namespace
}  // namespace depbound
