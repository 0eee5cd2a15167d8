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

#include "depbound/estimators.h"

#include <vector>

namespace depbound {

namespace {

void CheckDimensions(const AdjacencyMatrix& a, const ObservedData& data) {
  if (a.n() != data.n()) {
    throw DimensionError("adjacency matrix has " + std::to_string(a.n()) +
                         " vertices, data has " + std::to_string(data.n()));
  }
}

}  // namespace

std::string_view ToString(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kNaive: return "naive";
    case EstimatorKind::kV1: return "v1";
    case EstimatorKind::kV2: return "v2";
    case EstimatorKind::kV2Prime: return "v2_prime";
  }
  return "unknown";
}

std::optional<EstimatorKind> ParseEstimatorKind(std::string_view name) {
  if (name == "naive") return EstimatorKind::kNaive;
  if (name == "v1") return EstimatorKind::kV1;
  if (name == "v2") return EstimatorKind::kV2;
  if (name == "v2_prime" || name == "v2prime") return EstimatorKind::kV2Prime;
  return std::nullopt;
}

VarianceEstimate NaiveVariance(const ObservedData& data) {
  const double s2 = SampleVariance(data.outcomes);
  return {EstimatorKind::kNaive, s2 / data.n(), std::nullopt};
}

VarianceEstimate V1(const AdjacencyMatrix& a, const ObservedData& data) {
  CheckDimensions(a, data);
  const int n = data.n();
  const double mean = SampleMean(data.outcomes);
  std::vector<long double> r(static_cast<std::size_t>(n));
  long double ss = 0.0L;
  for (int i = 0; i < n; ++i) {
    r[static_cast<std::size_t>(i)] =
        static_cast<long double>(data.outcomes[static_cast<std::size_t>(i)]) - mean;
    ss += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
  }
  long double cross = 0.0L;
  for (const VertexPair& e : a.edges()) {
    cross += r[static_cast<std::size_t>(e.first)] * r[static_cast<std::size_t>(e.second)];
  }
  const long double nn = static_cast<long double>(n) * n;
  // n * s2 == ss.
  const long double value = (ss + 2.0L * cross) / nn;
  return {EstimatorKind::kV1, static_cast<double>(value), a};
}

VarianceEstimate V2(const AdjacencyMatrix& a, const ObservedData& data) {
  CheckDimensions(a, data);
  const long double n = data.n();
  const long double s2 = SampleVariance(data.outcomes);
  const long double ones = 2.0L * static_cast<long double>(a.edge_count());
  const long double value = s2 / n * (1.0L + ones / n);
  return {EstimatorKind::kV2, static_cast<double>(value), a};
}

VarianceEstimate V2Prime(const ObservedData& data) {
  const long double n = data.n();
  const long double s2 = SampleVariance(data.outcomes);
  long double total = 0.0L;
  for (std::int64_t d : TruncatedDegrees(data)) total += static_cast<long double>(d);
  const long double value = s2 / n * (1.0L + total / n);
  return {EstimatorKind::kV2Prime, static_cast<double>(value), std::nullopt};
}

}  // namespace depbound
