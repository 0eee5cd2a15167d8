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

// Variance estimators for the sample mean of dependent observations.
//
// With residuals r_i = X_i - mean and plug-in variance s2 (1/n divisor):
//
//   naive        s2 / n
//   v1(A)        (n s2 + sum_ij A_ij r_i r_j) / n^2
//   v2(A)        (s2 / n) (1 + sum_ij A_ij / n)
//   v2_prime     (s2 / n) (1 + sum_i min(d_i, n - 1) / n)
//
// The double sums run over ordered pairs, so every edge counts twice.

#ifndef DEPBOUND_ESTIMATORS_H_
#define DEPBOUND_ESTIMATORS_H_

#include <optional>
#include <string>
#include <string_view>

#include "depbound/core.h"

namespace depbound {

enum class EstimatorKind { kNaive, kV1, kV2, kV2Prime };

std::string_view ToString(EstimatorKind kind);
std::optional<EstimatorKind> ParseEstimatorKind(std::string_view name);

struct VarianceEstimate {
  EstimatorKind kind = EstimatorKind::kNaive;
  double value = 0.0;
  // Set for v1 and v2.
  std::optional<AdjacencyMatrix> at_matrix;
  // v1 can be negative at adversarial matrices; it is reported unclamped.
  bool negative() const { return value < 0.0; }
};

VarianceEstimate NaiveVariance(const ObservedData& data);
VarianceEstimate V1(const AdjacencyMatrix& a, const ObservedData& data);
VarianceEstimate V2(const AdjacencyMatrix& a, const ObservedData& data);
// Ignores observed_edges.
VarianceEstimate V2Prime(const ObservedData& data);

}  // namespace depbound

#endif  // DEPBOUND_ESTIMATORS_H_
