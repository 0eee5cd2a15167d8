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

#include "depbound/core.h"

#include <algorithm>
#include <sstream>

namespace depbound {

namespace {

void CheckPair(int n, int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw DimensionError("vertex index out of range in pair (" + std::to_string(i) + ", " +
                         std::to_string(j) + ") for n = " + std::to_string(n));
  }
  if (i == j) throw DimensionError("self-loop at vertex " + std::to_string(i));
}

}  // namespace

AdjacencyMatrix::AdjacencyMatrix(int n) : n_(n) {
  if (n < 0) throw DimensionError("negative vertex count");
}

AdjacencyMatrix::AdjacencyMatrix(int n, std::vector<VertexPair> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n < 0) throw DimensionError("negative vertex count");
  for (const VertexPair& e : edges_) CheckPair(n_, e.first, e.second);
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool AdjacencyMatrix::has_edge(int i, int j) const {
  if (i == j) return false;
  return std::binary_search(edges_.begin(), edges_.end(), VertexPair(i, j));
}

std::vector<int> AdjacencyMatrix::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const VertexPair& e : edges_) {
    ++deg[static_cast<std::size_t>(e.first)];
    ++deg[static_cast<std::size_t>(e.second)];
  }
  return deg;
}

AdjacencyMatrix AdjacencyMatrix::with_edge(int i, int j) const {
  CheckPair(n_, i, j);
  std::vector<VertexPair> e = edges_;
  e.emplace_back(i, j);
  return AdjacencyMatrix(n_, std::move(e));
}

std::string ObservedData::label(int i) const {
  if (!ids.empty()) return ids.at(static_cast<std::size_t>(i));
  return std::to_string(i + 1);
}

AdjacencyMatrix ObservedData::observed_matrix() const {
  return AdjacencyMatrix(n(), observed_edges);
}

std::string CompatibilityReport::Summary() const {
  if (compatible) return "compatible";
  std::ostringstream out;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k > 0) out << "; ";
    out << violations[k].reason;
  }
  return out.str();
}

CompatibilityReport Validate(const ObservedData& data) {
  CompatibilityReport report;
  const int n = data.n();
  if (n < 1) {
    report.Add({Violation::Kind::kData, -1, {}, "no outcomes"});
  }
  if (data.degrees.size() != data.outcomes.size()) {
    report.Add({Violation::Kind::kData, -1, {},
                "outcomes and degrees differ in length (" + std::to_string(data.outcomes.size()) +
                    " vs " + std::to_string(data.degrees.size()) + ")"});
    return report;
  }
  if (!data.ids.empty() && data.ids.size() != data.outcomes.size()) {
    report.Add({Violation::Kind::kData, -1, {}, "ids and outcomes differ in length"});
  }
  for (int i = 0; i < n; ++i) {
    if (data.degrees[static_cast<std::size_t>(i)] < 0) {
      report.Add({Violation::Kind::kVertex, i, {},
                  "vertex " + data.label(i) + " has negative degree"});
    }
  }

  std::vector<VertexPair> seen;
  std::vector<std::int64_t> observed_degree(static_cast<std::size_t>(std::max(n, 0)), 0);
  for (const VertexPair& e : data.observed_edges) {
    if (e.first < 0 || e.second >= n) {
      report.Add({Violation::Kind::kEdge, -1, e, "observed edge references unknown vertex"});
      continue;
    }
    if (e.first == e.second) {
      report.Add({Violation::Kind::kEdge, -1, e, "self-loop at vertex " + data.label(e.first)});
      continue;
    }
    seen.push_back(e);
  }
  std::sort(seen.begin(), seen.end());
  for (std::size_t k = 0; k < seen.size(); ++k) {
    const VertexPair& e = seen[k];
    if (k > 0 && seen[k - 1] == e) {
      report.Add({Violation::Kind::kEdge, -1, e,
                  "duplicate observed edge {" + data.label(e.first) + ", " +
                      data.label(e.second) + "}"});
      continue;
    }
    ++observed_degree[static_cast<std::size_t>(e.first)];
    ++observed_degree[static_cast<std::size_t>(e.second)];
  }
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (observed_degree[u] > data.degrees[u]) {
      report.Add({Violation::Kind::kVertex, i, {},
                  "vertex " + data.label(i) + " has observed degree " +
                      std::to_string(observed_degree[u]) + " > reported degree " +
                      std::to_string(data.degrees[u])});
    }
  }
  return report;
}

CompatibilityReport IsCompatible(const AdjacencyMatrix& a, const ObservedData& data) {
  if (a.n() != data.n()) {
    throw DimensionError("adjacency matrix has " + std::to_string(a.n()) +
                         " vertices, data has " + std::to_string(data.n()));
  }
  CompatibilityReport report;
  for (const VertexPair& e : data.observed_edges) {
    if (!a.has_edge(e.first, e.second)) {
      report.Add({Violation::Kind::kEdge, -1, e,
                  "missing required edge {" + data.label(e.first) + ", " +
                      data.label(e.second) + "}"});
    }
  }
  const std::vector<int> deg = a.degrees();
  for (int i = 0; i < a.n(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (deg[u] > data.degrees.at(u)) {
      report.Add({Violation::Kind::kVertex, i, {},
                  "vertex " + data.label(i) + " has degree " + std::to_string(deg[u]) +
                      " > reported degree " + std::to_string(data.degrees[u])});
    }
  }
  return report;
}

std::vector<std::int64_t> TruncatedDegrees(const ObservedData& data) {
  const std::int64_t cap = std::max(data.n() - 1, 0);
  std::vector<std::int64_t> out;
  out.reserve(data.degrees.size());
  for (std::int64_t d : data.degrees) out.push_back(std::min(d, cap));
  return out;
}

double SampleMean(std::span<const double> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("sample mean of empty input");
  long double sum = 0.0L;
  for (double x : outcomes) sum += x;
  return static_cast<double>(sum / static_cast<long double>(outcomes.size()));
}

double SampleVariance(std::span<const double> outcomes) {
  const double mean = SampleMean(outcomes);
  long double ss = 0.0L;
  for (double x : outcomes) {
    const long double r = static_cast<long double>(x) - mean;
    ss += r * r;
  }
  return static_cast<double>(ss / static_cast<long double>(outcomes.size()));
}

AdjacencyMatrix InducedSubgraph(const AdjacencyMatrix& g, std::span<const int> subset) {
  std::vector<int> position(static_cast<std::size_t>(g.n()), -1);
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const int v = subset[k];
    if (v < 0 || v >= g.n()) {
      throw DimensionError("subset vertex " + std::to_string(v) + " out of range");
    }
    if (position[static_cast<std::size_t>(v)] >= 0) {
      throw DimensionError("subset repeats vertex " + std::to_string(v));
    }
    position[static_cast<std::size_t>(v)] = static_cast<int>(k);
  }
  std::vector<VertexPair> kept;
  for (const VertexPair& e : g.edges()) {
    const int a = position[static_cast<std::size_t>(e.first)];
    const int b = position[static_cast<std::size_t>(e.second)];
    if (a >= 0 && b >= 0) kept.emplace_back(a, b);
  }
  return AdjacencyMatrix(static_cast<int>(subset.size()), std::move(kept));
}

}  // namespace depbound
