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

// Data model for a sample of dependent observations: outcomes, reported
// degrees in the full dependency graph, and the partially observed edge set.
// All vertex indices are 0-based; file ingestion maps external string IDs to
// dense indices in file order (see io.h).

#ifndef DEPBOUND_CORE_H_
#define DEPBOUND_CORE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace depbound {

// Signals a caller bug such as mismatched dimensions or bad indices.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Signals data that cannot be analysed (malformed or inconsistent input).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An unordered vertex pair, always stored with first < second.
struct VertexPair {
  int first = 0;
  int second = 0;

  VertexPair() = default;
  VertexPair(int a, int b) : first(a < b ? a : b), second(a < b ? b : a) {}

  friend auto operator<=>(const VertexPair&, const VertexPair&) = default;
};

// Position of {i, j} (i < j) in row-major upper-triangular order.
inline std::size_t PairIndex(int n, int i, int j) {
  const auto ni = static_cast<std::size_t>(n);
  const auto ii = static_cast<std::size_t>(i);
  return ii * (2 * ni - ii - 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

inline std::size_t PairCount(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n > 0 ? n - 1 : 0) / 2;
}

// Symmetric 0-1 matrix with zero diagonal, stored as its sorted edge set.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(int n);
  // Throws DimensionError on self-loops or out-of-range indices. Duplicate
  // pairs collapse to a single edge.
  AdjacencyMatrix(int n, std::vector<VertexPair> edges);

  int n() const { return n_; }
  const std::vector<VertexPair>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_edge(int i, int j) const;
  // Entry A[i][j]; 0 on the diagonal.
  int at(int i, int j) const { return has_edge(i, j) ? 1 : 0; }
  // Row sums.
  std::vector<int> degrees() const;

  AdjacencyMatrix with_edge(int i, int j) const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<VertexPair> edges_;
};

// Observed study data: outcomes X, reported degrees d and observed edges.
struct ObservedData {
  std::vector<double> outcomes;
  std::vector<std::int64_t> degrees;
  std::vector<VertexPair> observed_edges;
  // External labels, parallel to outcomes. May be empty, in which case
  // vertices are labelled "1".."n".
  std::vector<std::string> ids;

  int n() const { return static_cast<int>(outcomes.size()); }
  std::string label(int i) const;
  AdjacencyMatrix observed_matrix() const;
};

struct Violation {
  enum class Kind { kData, kVertex, kEdge };
  Kind kind = Kind::kData;
  int vertex = -1;
  VertexPair edge;
  std::string reason;
};

struct CompatibilityReport {
  bool compatible = true;
  std::vector<Violation> violations;

  void Add(Violation v) {
    violations.push_back(std::move(v));
    compatible = false;
  }
  std::string Summary() const;
};

// Checks the internal consistency of observed data. Never throws.
CompatibilityReport Validate(const ObservedData& data);

// Checks that `a` contains every observed edge and respects every reported
// degree. Throws DimensionError when a.n() differs from data.n().
CompatibilityReport IsCompatible(const AdjacencyMatrix& a, const ObservedData& data);

// d'_i = min(d_i, n - 1).
std::vector<std::int64_t> TruncatedDegrees(const ObservedData& data);

// Throws std::invalid_argument on empty input.
double SampleMean(std::span<const double> outcomes);
// Plug-in variance with the 1/n divisor.
double SampleVariance(std::span<const double> outcomes);

// Keeps the edges with both endpoints in `subset`, renumbering vertices by
// their position in `subset`.
AdjacencyMatrix InducedSubgraph(const AdjacencyMatrix& g, std::span<const int> subset);

}  // namespace depbound

#endif  // DEPBOUND_CORE_H_
