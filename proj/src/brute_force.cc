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

// Exhaustive enumeration used as a reference for Solve(). Deliberately shares
// nothing with the branch-and-bound path: no presolve, no bounds, every
// free pair (including nonpositive ones) is enumerated.

#include <chrono>
#include <limits>

#include "depbound/solver.h"

namespace depbound {

namespace {

class Enumerator {
 public:
  explicit Enumerator(const ProblemInstance& instance) : instance_(instance) {
    const int n = instance.n();
    degree_.assign(static_cast<std::size_t>(n), 0);
    for (const VertexPair& e : instance.forced_edges()) {
      ++degree_[static_cast<std::size_t>(e.first)];
      ++degree_[static_cast<std::size_t>(e.second)];
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!instance.is_forced(i, j)) free_.emplace_back(i, j);
      }
    }
    chosen_.assign(free_.size(), 0);
  }

  // Returns false when no assignment satisfies the caps.
  bool Run() {
    for (std::size_t i = 0; i < degree_.size(); ++i) {
      if (degree_[i] > instance_.degree_caps()[i]) return false;
    }
    Visit(0, 0.0L);
    return found_;
  }

  std::vector<VertexPair> best_edges() const {
    std::vector<VertexPair> edges = instance_.forced_edges();
    for (std::size_t k = 0; k < free_.size(); ++k) {
      if (best_[k]) edges.push_back(free_[k]);
    }
    return edges;
  }

  std::int64_t leaves() const { return leaves_; }

 private:
  void Visit(std::size_t k, long double value) {
    if (k == free_.size()) {
      ++leaves_;
      if (!found_ || value > best_value_) {
        found_ = true;
        best_value_ = value;
        best_ = chosen_;
      }
      return;
    }
    const VertexPair& p = free_[k];
    const auto a = static_cast<std::size_t>(p.first);
    const auto b = static_cast<std::size_t>(p.second);
    Visit(k + 1, value);
    if (degree_[a] < instance_.degree_caps()[a] && degree_[b] < instance_.degree_caps()[b]) {
      ++degree_[a];
      ++degree_[b];
      chosen_[k] = 1;
      Visit(k + 1, value + instance_.weight(p.first, p.second));
      chosen_[k] = 0;
      --degree_[a];
      --degree_[b];
    }
  }

  const ProblemInstance& instance_;
  std::vector<VertexPair> free_;
  std::vector<std::int64_t> degree_;
  std::vector<char> chosen_;
  std::vector<char> best_;
  long double best_value_ = 0.0L;
  bool found_ = false;
  std::int64_t leaves_ = 0;
};

}  // namespace

SolverResult BruteForce(const ProblemInstance& instance, std::size_t max_free_variables) {
  if (instance.free_variable_count() > max_free_variables) {
    throw InstanceTooLargeError("brute force refuses " +
                                std::to_string(instance.free_variable_count()) +
                                " free variables; the cap is " +
                                std::to_string(max_free_variables));
  }
  const auto start = std::chrono::steady_clock::now();
  SolverResult result;
  Enumerator enumerator(instance);
  if (!enumerator.Run()) {
    result.best_matrix = AdjacencyMatrix(instance.n());
    result.status = SolverStatus::kInfeasible;
    result.objective = -std::numeric_limits<double>::infinity();
    result.upper_bound = result.objective;
  } else {
    result.best_matrix = AdjacencyMatrix(instance.n(), enumerator.best_edges());
    result.objective = instance.Objective(result.best_matrix);
    result.upper_bound = result.objective;
    result.status = SolverStatus::kOptimal;
  }
  result.gap = 0.0;
  result.stats.nodes = enumerator.leaves();
  result.stats.components = 1;
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace depbound
