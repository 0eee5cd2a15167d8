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

// Synthetic dependent data with a known dependency graph, and Monte Carlo
// studies of the variance estimators.
//
// Outcomes follow the edge-factor model
//
//   X_i = mu + a * eps_i + b * sum_{e containing i} U_e,
//
// with eps_i and U_e independent uniform on (-1, 1). Outcomes of vertices
// that share no edge are independent, var(X_i) = (a^2 + b^2 deg(i)) / 3 and
// cov(X_i, X_j) = b^2 / 3 exactly when {i, j} is an edge.

#ifndef DEPBOUND_SIMULATION_H_
#define DEPBOUND_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <random>
#include <string>
#include <vector>

#include "depbound/core.h"
#include "depbound/estimators.h"
#include "depbound/solver.h"

namespace depbound {

// Replicate r of stream s under a master seed gets its own generator; the
// draws do not depend on which thread runs the replicate.
std::uint64_t StreamSeed(std::uint64_t master, std::uint64_t stream, std::uint64_t replicate);

// Uniform on (-1, 1) from 53 random bits; identical on every platform.
double UniformSymmetric(std::mt19937_64& rng);

enum class GraphStyle { kRegular, kBoundedRandom };

std::string_view ToString(GraphStyle style);
std::optional<GraphStyle> ParseGraphStyle(std::string_view name);

// kRegular: every degree equals max_degree (needs n * max_degree even).
// kBoundedRandom: every degree is at most max_degree. Both need
// max_degree <= n - 1; violations throw std::invalid_argument.
AdjacencyMatrix GenerateGraph(int n, int max_degree, GraphStyle style, std::mt19937_64& rng);
AdjacencyMatrix GenerateGraph(int n, int max_degree, GraphStyle style, std::uint64_t seed);

struct EdgeFactorModel {
  AdjacencyMatrix graph;  // the full dependency graph
  // Sampled vertices, in order; empty means all of them.
  std::vector<int> sample;
  double mu = 0.0;
  double vertex_scale = 1.0;  // a
  double edge_scale = 1.0;    // b

  int sample_size() const { return sample.empty() ? graph.n() : static_cast<int>(sample.size()); }
  // The graph induced on the sample (the true subgraph of the sample).
  AdjacencyMatrix SampledSubgraph() const;
};

// var of the sample mean, in closed form.
double TrueVariance(const EdgeFactorModel& model);

// Draws outcomes for the sample. Reported degrees are full-graph degrees;
// each edge of the sampled subgraph is observed independently with
// probability p_obs.
ObservedData GenerateOutcomes(const EdgeFactorModel& model, double p_obs, std::mt19937_64& rng);
ObservedData GenerateOutcomes(const EdgeFactorModel& model, double p_obs, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Studies

struct ModelSpec {
  GraphStyle style = GraphStyle::kRegular;
  int max_degree = 2;
  double mu = 0.0;
  double vertex_scale = 1.0;
  double edge_scale = 1.0;
};

// Builds a model on a fresh graph drawn from `rng`.
EdgeFactorModel DrawModel(const ModelSpec& spec, int n, std::mt19937_64& rng);

struct ConsistencyConfig {
  ModelSpec model;
  std::vector<int> n_grid{100, 400, 1600};
  int replicates = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
};

// n * V1 at the true subgraph compared with n * var(mean), at one n.
struct ConsistencyRow {
  int n = 0;
  int replicates = 0;
  double mean_truth = 0.0;     // average n * var(mean)
  double mean_estimate = 0.0;  // average n * V1(true subgraph)
  double bias = 0.0;           // average of the difference
  double rmse = 0.0;
};

struct ConsistencyReport {
  ConsistencyConfig config;
  std::vector<ConsistencyRow> rows;
};

ConsistencyReport RunConsistencyStudy(const ConsistencyConfig& config);

struct CoverageConfig {
  ModelSpec model;
  int n = 1000;
  int replicates = 2000;
  double alpha = 0.05;
  double p_obs = 0.5;
  std::uint64_t seed = 1;
  int threads = 1;
  SolverConfig solver;
};

struct EstimatorSummary {
  std::string name;
  int replicates = 0;          // replicates contributing
  double mean_n_estimate = 0.0;  // average n * V
  double coverage = 0.0;       // share of intervals containing mu
  double mean_width = 0.0;     // average interval width
  double under_rate = 0.0;     // share with V < var(mean)
};

struct CoverageReport {
  CoverageConfig config;
  double truth_n_variance = 0.0;  // average n * var(mean)
  // naive, v1, v2, v2_prime, then v1 and v2 at the true subgraph (no
  // intervals for those two).
  std::vector<EstimatorSummary> estimators;
  // Replicates whose solves did not all end optimal; they still count
  // above, at the best matrix found.
  std::vector<int> flagged;
  // Replicates breaking V1(max) >= V1(true) or
  // V2(true) <= V2(max) <= V2'.
  std::vector<int> ordering_violations;
  int fast_path_hits = 0;  // v2 maximizers built without the solver
};

CoverageReport RunCoverageStudy(const CoverageConfig& config);

struct NormalityConfig {
  ModelSpec model;
  int n = 1000;
  int replicates = 5000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct NormalityReport {
  NormalityConfig config;
  double ks_statistic = 0.0;
  double p_value = 0.0;
  double mean_z = 0.0;
  double sd_z = 0.0;
};

// Kolmogorov-Smirnov test of (mean - mu) / sqrt(var(mean)) against the
// standard normal.
NormalityReport RunNormalityStudy(const NormalityConfig& config);

// Two-sided one-sample KS statistic against the standard normal, and its
// asymptotic p-value.
double KsStatistic(std::vector<double> sample);
double KsPValue(double statistic, std::size_t size);

}  // namespace depbound

#endif  // DEPBOUND_SIMULATION_H_
