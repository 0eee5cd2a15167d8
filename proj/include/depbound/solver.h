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

// Exact maximization of a variance estimator over the adjacency matrices
// compatible with the observed data.
//
// Both programs share one 0-1 structure over the upper-triangular variables
// a_ij (i < j):
//
//   maximize    sum_{i<j} w_ij a_ij
//   subject to  sum_j a_ij <= cap_i   for every vertex i
//               a_ij = 1              for every forced (observed) pair
//
// For the general estimator w_ij = (X_i - mean)(X_j - mean); for the
// homoskedastic one w_ij = 1. This is a maximum weight simple b-matching
// with some edges forced in. Solve() runs a depth-first branch-and-bound
// over the connected components left after presolve; nodes are bounded first
// by a per-vertex greedy bound and then by the fractional b-matching LP,
// computed exactly as a min-cost flow on the bipartite double cover.

#ifndef DEPBOUND_SOLVER_H_
#define DEPBOUND_SOLVER_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "depbound/core.h"

namespace depbound {

// Forced edges exceed a degree cap; no compatible matrix exists.
class InfeasibleInstanceError : public DataError {
 public:
  using DataError::DataError;
};

class ProblemInstance {
 public:
  enum class Check { kStrict, kDeferred };

  // `pair_weights` holds w_ij for i < j in PairIndex order. Structural
  // problems throw DimensionError. Forced edges that exceed a cap throw
  // InfeasibleInstanceError under kStrict; under kDeferred the instance is
  // kept and Solve() reports it as infeasible.
  ProblemInstance(int n, std::vector<double> pair_weights, std::vector<std::int64_t> degree_caps,
                  std::vector<VertexPair> forced_edges, Check check = Check::kStrict);

  int n() const { return n_; }
  double weight(int i, int j) const;
  std::span<const double> pair_weights() const { return weights_; }
  const std::vector<std::int64_t>& degree_caps() const { return caps_; }
  const std::vector<VertexPair>& forced_edges() const { return forced_; }
  bool is_forced(int i, int j) const;
  std::size_t free_variable_count() const { return PairCount(n_) - forced_.size(); }

  bool feasible() const;
  // Contains every forced edge and respects every cap.
  bool Admits(const AdjacencyMatrix& a) const;
  // sum_{i<j} w_ij a_ij with compensated summation in lexicographic order.
  double Objective(const AdjacencyMatrix& a) const;

 private:
  int n_;
  std::vector<double> weights_;
  std::vector<std::int64_t> caps_;
  std::vector<VertexPair> forced_;
};

enum class SolverStatus { kOptimal, kGapLimit, kTimeLimit, kInfeasible };

std::string_view ToString(SolverStatus status);

struct SolverConfig {
  // Absolute tolerance on the objective. Nodes whose bound does not exceed
  // the incumbent by more than this are pruned.
  double gap_tolerance = 1e-9;
  std::optional<double> time_limit_seconds;
  // Stops with status kGapLimit once this many nodes have been evaluated.
  // Zero means unlimited.
  std::int64_t node_limit = 0;
  // Independent components are solved concurrently.
  int threads = 1;
  // Subproblems are solved exactly by reduction to weighted matching when
  // the reduced graph has at most this many nodes (time is cubic in it);
  // larger ones use LP-based branching. Zero disables the reduction.
  int max_matching_nodes = 1200;
};

struct SolverStats {
  std::int64_t nodes = 0;
  std::int64_t lp_solves = 0;
  std::int64_t matching_solves = 0;
  int components = 0;
  double wall_seconds = 0.0;
};

struct SolverResult {
  AdjacencyMatrix best_matrix;
  double objective = 0.0;
  double upper_bound = 0.0;
  double gap = 0.0;
  SolverStatus status = SolverStatus::kOptimal;
  SolverStats stats;
};

// Weights are residual cross-products, caps the raw degrees and forced edges
// the observed edges. Throws InfeasibleInstanceError on inconsistent data.
ProblemInstance BuildV1Instance(const ObservedData& data);
// As BuildV1Instance with every weight equal to one.
ProblemInstance BuildV2Instance(const ObservedData& data);

SolverResult Solve(const ProblemInstance& instance, const SolverConfig& config = {});

struct LpRelaxation {
  // Optimum of the relaxation 0 <= a_ij <= 1 with forced pairs fixed at one.
  double value = 0.0;
  // Nonzero entries of an optimal solution; values are 1/2 or 1.
  std::vector<std::pair<VertexPair, double>> solution;
};

// Throws InfeasibleInstanceError for an infeasible instance.
LpRelaxation SolveLpRelaxation(const ProblemInstance& instance);
double LpRelaxationBound(const ProblemInstance& instance);

inline constexpr std::size_t kDefaultBruteForceCap = 28;

// Raised when an instance has too many free variables to enumerate.
class InstanceTooLargeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumerates every assignment of the free variables. Throws
// InstanceTooLargeError above `max_free_variables`.
SolverResult BruteForce(const ProblemInstance& instance,
                        std::size_t max_free_variables = kDefaultBruteForceCap);

// Tries to build a compatible matrix whose row sums equal the truncated
// degrees. Such a matrix maximizes the homoskedastic program. Returns nothing
// when the construction fails, which does not prove that none exists.
std::optional<AdjacencyMatrix> MaxV2FastPath(const ObservedData& data);

// Plain-text instance format:
//
//   n <n>
//   caps <c_1> ... <c_n>
//   forced <k>
//   <i> <j>            (k lines, 1-based)
//   weights <m>
//   <i> <j> <w>        (m lines, 1-based; unlisted pairs weigh 0)
//
// Weights are written with 17 significant digits so they round-trip.
void WriteInstance(std::ostream& out, const ProblemInstance& instance);
ProblemInstance ReadInstance(std::istream& in,
                             ProblemInstance::Check check = ProblemInstance::Check::kStrict);

}  // namespace depbound

#endif  // DEPBOUND_SOLVER_H_
