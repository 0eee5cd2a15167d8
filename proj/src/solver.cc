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

#include "depbound/solver.h"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "bmatching_lp.h"
#include "weighted_matching.h"

namespace depbound {

using internal::FractionalBMatching;
using internal::MaxWeightMatching;
using internal::SolveFractionalBMatching;
using internal::WeightedEdge;

// ---------------------------------------------------------------------------
// ProblemInstance

ProblemInstance::ProblemInstance(int n, std::vector<double> pair_weights,
                                 std::vector<std::int64_t> degree_caps,
                                 std::vector<VertexPair> forced_edges, Check check)
    : n_(n),
      weights_(std::move(pair_weights)),
      caps_(std::move(degree_caps)),
      forced_(std::move(forced_edges)) {
  if (n_ < 1) throw DimensionError("instance needs at least one vertex");
  if (weights_.size() != PairCount(n_)) {
    throw DimensionError("expected " + std::to_string(PairCount(n_)) + " pair weights, got " +
                         std::to_string(weights_.size()));
  }
  if (caps_.size() != static_cast<std::size_t>(n_)) {
    throw DimensionError("expected " + std::to_string(n_) + " degree caps, got " +
                         std::to_string(caps_.size()));
  }
  for (std::int64_t c : caps_) {
    if (c < 0) throw DimensionError("negative degree cap");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw DimensionError("non-finite pair weight");
  }
  for (const VertexPair& e : forced_) {
    if (e.first < 0 || e.second >= n_ || e.first == e.second) {
      throw DimensionError("invalid forced pair");
    }
  }
  std::sort(forced_.begin(), forced_.end());
  forced_.erase(std::unique(forced_.begin(), forced_.end()), forced_.end());
  if (check == Check::kStrict && !feasible()) {
    throw InfeasibleInstanceError("forced edges exceed a degree cap");
  }
}

double ProblemInstance::weight(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw DimensionError("invalid pair for weight lookup");
  }
  if (i > j) std::swap(i, j);
  return weights_[PairIndex(n_, i, j)];
}

bool ProblemInstance::is_forced(int i, int j) const {
  return std::binary_search(forced_.begin(), forced_.end(), VertexPair(i, j));
}

bool ProblemInstance::feasible() const {
  std::vector<std::int64_t> deg(static_cast<std::size_t>(n_), 0);
  for (const VertexPair& e : forced_) {
    ++deg[static_cast<std::size_t>(e.first)];
    ++deg[static_cast<std::size_t>(e.second)];
  }
  for (int i = 0; i < n_; ++i) {
    if (deg[static_cast<std::size_t>(i)] > caps_[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

bool ProblemInstance::Admits(const AdjacencyMatrix& a) const {
  if (a.n() != n_) return false;
  for (const VertexPair& e : forced_) {
    if (!a.has_edge(e.first, e.second)) return false;
  }
  const std::vector<int> deg = a.degrees();
  for (int i = 0; i < n_; ++i) {
    if (deg[static_cast<std::size_t>(i)] > caps_[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

double ProblemInstance::Objective(const AdjacencyMatrix& a) const {
  if (a.n() != n_) throw DimensionError("matrix size differs from instance");
  // Neumaier summation.
  long double sum = 0.0L, carry = 0.0L;
  for (const VertexPair& e : a.edges()) {
    const long double w = weights_[PairIndex(n_, e.first, e.second)];
    const long double t = sum + w;
    if (std::fabs(sum) >= std::fabs(w)) {
      carry += (sum - t) + w;
    } else {
      carry += (w - t) + sum;
    }
    sum = t;
  }
  return static_cast<double>(sum + carry);
}

std::string_view ToString(SolverStatus status) {
  switch (status) {
    case SolverStatus::kOptimal: return "optimal";
    case SolverStatus::kGapLimit: return "gap_limit";
    case SolverStatus::kTimeLimit: return "time_limit";
    case SolverStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

namespace {


ProblemInstance BuildInstance(const ObservedData& data, bool unit_weights) {
  const CompatibilityReport report = Validate(data);
  bool degree_violation = false;
  for (const Violation& v : report.violations) {
    if (v.kind == Violation::Kind::kVertex &&
        v.reason.find("observed degree") != std::string::npos) {
      degree_violation = true;
    } else {
      throw DataError("invalid observed data: " + v.reason);
    }
  }
  if (degree_violation) {
    throw InfeasibleInstanceError("observed edges exceed reported degrees: " + report.Summary());
  }
  const int n = data.n();
  std::vector<double> weights(PairCount(n), 1.0);
  if (!unit_weights) {
    const double mean = SampleMean(data.outcomes);
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      r[static_cast<std::size_t>(i)] = data.outcomes[static_cast<std::size_t>(i)] - mean;
    }
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        weights[k++] = r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)];
      }
    }
  }
  return ProblemInstance(n, std::move(weights), data.degrees, data.observed_edges);
}

class Deadline {
 public:
  explicit Deadline(std::optional<double> seconds)
      : start_(std::chrono::steady_clock::now()), limit_(seconds) {}
  bool expired() const { return limit_ && elapsed() > *limit_; }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::optional<double> limit_;
};

// Edge lookup by local endpoint pair.
class EdgeIndex {
 public:
  EdgeIndex(int m, std::span<const WeightedEdge> edges) : m_(m) {
    if (m_ <= kDenseLimit) {
      dense_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), -1);
      for (std::size_t k = 0; k < edges.size(); ++k) {
        dense_[Slot(edges[k].u, edges[k].v)] = static_cast<int>(k);
        dense_[Slot(edges[k].v, edges[k].u)] = static_cast<int>(k);
      }
    } else {
      sparse_.reserve(edges.size());
      for (std::size_t k = 0; k < edges.size(); ++k) {
        sparse_.emplace(Key(edges[k].u, edges[k].v), static_cast<int>(k));
      }
    }
  }

  int Find(int a, int b) const {
    if (a == b) return -1;
    if (!dense_.empty()) return dense_[Slot(a, b)];
    auto it = sparse_.find(Key(a, b));
    return it == sparse_.end() ? -1 : it->second;
  }

 private:
  static constexpr int kDenseLimit = 4096;
  std::size_t Slot(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(b);
  }
  static std::uint64_t Key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

  int m_;
  std::vector<int> dense_;
  std::unordered_map<std::uint64_t, int> sparse_;
};

// A connected component of the free positive-weight edges left by presolve.
struct Component {
  std::vector<int> vertices;  // ascending original indices
  std::vector<int> caps;      // residual caps
  std::vector<WeightedEdge> edges;  // local endpoints, decreasing weight
  bool integral_weights = true;
};

struct ComponentResult {
  std::vector<int> chosen;  // edge ids
  double value = 0.0;
  double upper_bound = 0.0;
  SolverStatus status = SolverStatus::kOptimal;
  std::int64_t nodes = 0;
  std::int64_t lp_solves = 0;
  std::int64_t matching_solves = 0;
};

struct Presolved {
  std::vector<Component> components;
};

// Fixes forced pairs to one and nonpositive free pairs to zero, then splits
// the remaining free pairs into connected components.
Presolved Presolve(const ProblemInstance& instance) {
  const int n = instance.n();
  const auto un = static_cast<std::size_t>(n);
  std::vector<int> residual(un);
  for (int i = 0; i < n; ++i) {
    residual[static_cast<std::size_t>(i)] = static_cast<int>(
        std::min<std::int64_t>(instance.degree_caps()[static_cast<std::size_t>(i)], n - 1));
  }
  std::vector<char> forced(PairCount(n), 0);
  for (const VertexPair& e : instance.forced_edges()) {
    forced[PairIndex(n, e.first, e.second)] = 1;
    --residual[static_cast<std::size_t>(e.first)];
    --residual[static_cast<std::size_t>(e.second)];
  }

  std::vector<int> parent(un);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  struct GlobalEdge {
    int i, j;
    double w;
  };
  std::vector<GlobalEdge> free_edges;
  const auto weights = instance.pair_weights();
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      const double w = weights[k];
      if (forced[k] || !(w > 0.0)) continue;
      if (residual[static_cast<std::size_t>(i)] <= 0 || residual[static_cast<std::size_t>(j)] <= 0) {
        continue;
      }
      free_edges.push_back({i, j, w});
      const int a = find(i), b = find(j);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }

  Presolved out;
  std::vector<int> component_of(un, -1), local(un, -1);
  for (const GlobalEdge& e : free_edges) {
    for (int v : {e.i, e.j}) {
      if (local[static_cast<std::size_t>(v)] >= 0) continue;
      const int root = find(v);
      int& c = component_of[static_cast<std::size_t>(root)];
      if (c < 0) {
        c = static_cast<int>(out.components.size());
        out.components.emplace_back();
      }
      out.components[static_cast<std::size_t>(c)].vertices.push_back(v);
      local[static_cast<std::size_t>(v)] = 0;
    }
  }
  for (Component& comp : out.components) {
    std::sort(comp.vertices.begin(), comp.vertices.end());
    for (std::size_t p = 0; p < comp.vertices.size(); ++p) {
      const int v = comp.vertices[p];
      local[static_cast<std::size_t>(v)] = static_cast<int>(p);
      comp.caps.push_back(residual[static_cast<std::size_t>(v)]);
    }
  }
  for (const GlobalEdge& e : free_edges) {
    Component& comp =
        out.components[static_cast<std::size_t>(component_of[static_cast<std::size_t>(find(e.i))])];
    comp.edges.push_back(
        {local[static_cast<std::size_t>(e.i)], local[static_cast<std::size_t>(e.j)], e.w});
    if (e.w != std::floor(e.w)) comp.integral_weights = false;
  }
  for (Component& comp : out.components) {
    // Stable: ties keep lexicographic pair order.
    std::stable_sort(comp.edges.begin(), comp.edges.end(),
                     [](const WeightedEdge& a, const WeightedEdge& b) { return a.w > b.w; });
  }
  return out;
}

// Exact search over one component. Each node solves the fractional LP and
// uses its dual prices to fix edges that no improving solution can drop or
// use. The edges left open often fall apart into independent pieces, which
// are searched recursively; a node branches on a fractional edge only when
// fixing settles nothing.
class BranchAndBound {
 public:
  BranchAndBound(const Component& comp, const SolverConfig& config, const Deadline& deadline,
                 double gap_tolerance)
      : comp_(comp), config_(config), deadline_(deadline) {
    double total = 0.0;
    for (const WeightedEdge& e : comp_.edges) total += e.w;
    slack_ = 1e-13 * std::max(1.0, total);
    tolerance_ = std::max(gap_tolerance, slack_);
  }

  ComponentResult Run() {
    Subproblem root;
    root.caps = comp_.caps;
    root.edges = comp_.edges;
    root.origin.resize(comp_.edges.size());
    std::iota(root.origin.begin(), root.origin.end(), 0);
    Outcome out = Search(root, -std::numeric_limits<double>::infinity(), tolerance_);

    ComponentResult result;
    result.chosen = std::move(out.chosen);
    std::sort(result.chosen.begin(), result.chosen.end());
    result.value = Value(result.chosen);
    result.upper_bound = std::max(result.value, out.upper);
    result.status = status_;
    result.nodes = nodes_;
    result.lp_solves = lp_solves_;
    result.matching_solves = matchings_;
    return result;
  }

 private:
  struct Subproblem {
    std::vector<int> caps;
    std::vector<WeightedEdge> edges;  // decreasing weight
    std::vector<int> origin;          // position in the component's edge list
  };

  struct Outcome {
    std::vector<int> chosen;  // positions in the component's edge list
    double value = 0.0;
    double upper = 0.0;
  };

  double Floor(double bound) const {
    return comp_.integral_weights ? std::floor(bound + 1e-9) : bound;
  }

  double Value(const std::vector<int>& chosen) const {
    long double sum = 0.0L;
    for (int id : chosen) sum += comp_.edges[static_cast<std::size_t>(id)].w;
    return static_cast<double>(sum);
  }

  bool Aborted() {
    if (aborted_) return true;
    if (config_.node_limit > 0 && nodes_ >= config_.node_limit) {
      status_ = SolverStatus::kGapLimit;
      aborted_ = true;
    } else if (deadline_.expired()) {
      status_ = SolverStatus::kTimeLimit;
      aborted_ = true;
    }
    return aborted_;
  }

  // Each vertex keeps its cap many heaviest edges; halving the total
  // corrects for counting every edge at both ends.
  static double GreedyBound(const Subproblem& sp) {
    std::vector<int> taken(sp.caps.size(), 0);
    long double sum = 0.0L;
    for (const WeightedEdge& e : sp.edges) {
      for (int v : {e.u, e.v}) {
        auto& t = taken[static_cast<std::size_t>(v)];
        if (t < sp.caps[static_cast<std::size_t>(v)]) {
          ++t;
          sum += 0.5L * e.w;
        }
      }
    }
    return static_cast<double>(sum);
  }

  void Adopt(const Subproblem& sp, const std::vector<char>& chosen, Outcome& best) const {
    std::vector<int> ids;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      if (chosen[k]) ids.push_back(sp.origin[k]);
    }
    const double value = Value(ids);
    if (value > best.value) {
      best.value = value;
      best.chosen = std::move(ids);
    }
  }

  // Local search on an integral solution: add edges between vertices with
  // spare capacity, or trade a chosen edge {x, y} for {u, x} and {w, y}.
  static void Improve(const Subproblem& sp, const EdgeIndex& index, std::vector<char>& chosen,
                      std::vector<int>& left) {
    const int m = static_cast<int>(sp.caps.size());
    auto open = [&](int id) { return id >= 0 && !chosen[static_cast<std::size_t>(id)]; };
    for (int pass = 0; pass < 4; ++pass) {
      bool improved = false;
      std::vector<int> spare;
      for (int v = 0; v < m; ++v) {
        if (left[static_cast<std::size_t>(v)] > 0) spare.push_back(v);
      }
      if (spare.size() > 200) spare.resize(200);
      for (std::size_t a = 0; a < spare.size(); ++a) {
        for (std::size_t b = a; b < spare.size(); ++b) {
          const int u = spare[a], w = spare[b];
          if (left[static_cast<std::size_t>(u)] <= 0 || left[static_cast<std::size_t>(w)] <= 0) {
            continue;
          }
          if (u == w && left[static_cast<std::size_t>(u)] < 2) continue;
          if (u != w) {
            const int direct = index.Find(u, w);
            if (open(direct)) {
              chosen[static_cast<std::size_t>(direct)] = 1;
              --left[static_cast<std::size_t>(u)];
              --left[static_cast<std::size_t>(w)];
              improved = true;
              continue;
            }
          }
          double best_gain = 1e-12;
          int best_edge = -1, best_ux = -1, best_wy = -1;
          for (std::size_t k = 0; k < chosen.size(); ++k) {
            if (!chosen[k]) continue;
            const WeightedEdge& e = sp.edges[k];
            if (e.u == u || e.u == w || e.v == u || e.v == w) continue;
            for (int flip = 0; flip < 2; ++flip) {
              const int x = flip ? e.v : e.u;
              const int y = flip ? e.u : e.v;
              const int ux = index.Find(u, x);
              const int wy = index.Find(w, y);
              if (!open(ux) || !open(wy)) continue;
              const double gain = sp.edges[static_cast<std::size_t>(ux)].w +
                                  sp.edges[static_cast<std::size_t>(wy)].w - e.w;
              if (gain > best_gain) {
                best_gain = gain;
                best_edge = static_cast<int>(k);
                best_ux = ux;
                best_wy = wy;
              }
            }
          }
          if (best_edge >= 0) {
            chosen[static_cast<std::size_t>(best_edge)] = 0;
            chosen[static_cast<std::size_t>(best_ux)] = 1;
            chosen[static_cast<std::size_t>(best_wy)] = 1;
            --left[static_cast<std::size_t>(u)];
            --left[static_cast<std::size_t>(w)];
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }

  // Takes edges in the given order whenever both ends have room, then
  // polishes the result.
  void Complete(const Subproblem& sp, const EdgeIndex& index, const std::vector<int>& order,
                Outcome& best) const {
    std::vector<char> chosen(sp.edges.size(), 0);
    std::vector<int> left = sp.caps;
    for (int id : order) {
      const WeightedEdge& e = sp.edges[static_cast<std::size_t>(id)];
      if (left[static_cast<std::size_t>(e.u)] > 0 && left[static_cast<std::size_t>(e.v)] > 0) {
        chosen[static_cast<std::size_t>(id)] = 1;
        --left[static_cast<std::size_t>(e.u)];
        --left[static_cast<std::size_t>(e.v)];
      }
    }
    Improve(sp, index, chosen, left);
    Adopt(sp, chosen, best);
  }

  // Copy of `sp` without edge `id`; when `take` is set the edge's endpoints
  // lose one unit of capacity.
  static Subproblem Without(const Subproblem& sp, int id, bool take) {
    Subproblem out;
    out.caps = sp.caps;
    const WeightedEdge& removed = sp.edges[static_cast<std::size_t>(id)];
    if (take) {
      --out.caps[static_cast<std::size_t>(removed.u)];
      --out.caps[static_cast<std::size_t>(removed.v)];
    }
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      const WeightedEdge& e = sp.edges[k];
      if (static_cast<int>(k) == id || out.caps[static_cast<std::size_t>(e.u)] <= 0 ||
          out.caps[static_cast<std::size_t>(e.v)] <= 0) {
        continue;
      }
      out.edges.push_back(e);
      out.origin.push_back(sp.origin[k]);
    }
    return out;
  }

  // Connected pieces of the open edges, renumbered locally.
  static std::vector<Subproblem> Split(const Subproblem& sp, const std::vector<char>& open,
                                       const std::vector<int>& caps) {
    const std::size_t m = caps.size();
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      if (!open[k]) continue;
      const int a = find(sp.edges[k].u), b = find(sp.edges[k].v);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
    std::vector<Subproblem> pieces;
    std::vector<int> piece_of(m, -1), local(m, -1);
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      if (!open[k]) continue;
      const WeightedEdge& e = sp.edges[k];
      int& p = piece_of[static_cast<std::size_t>(find(e.u))];
      if (p < 0) {
        p = static_cast<int>(pieces.size());
        pieces.emplace_back();
      }
      Subproblem& piece = pieces[static_cast<std::size_t>(p)];
      for (int v : {e.u, e.v}) {
        int& l = local[static_cast<std::size_t>(v)];
        if (l < 0) {
          l = static_cast<int>(piece.caps.size());
          piece.caps.push_back(caps[static_cast<std::size_t>(v)]);
        }
      }
      piece.edges.push_back({local[static_cast<std::size_t>(e.u)],
                             local[static_cast<std::size_t>(e.v)], e.w});
      piece.origin.push_back(sp.origin[k]);
    }
    return pieces;
  }

  double PieceBound(const Subproblem& sp) {
    std::vector<int> all(sp.edges.size());
    std::iota(all.begin(), all.end(), 0);
    ++lp_solves_;
    const FractionalBMatching lp =
        SolveFractionalBMatching(static_cast<int>(sp.caps.size()), sp.caps, sp.edges, all);
    return std::min(Floor(GreedyBound(sp)), Floor(lp.bound));
  }

  // A dual solution priced against every edge. For any integral x,
  //   value(x) = bound - sum_v y_v (cap_v - deg_x(v)) - sum_{x_e = 0} z_e
  //                    - sum_{x_e = 1} reduced_e,
  // with every term nonnegative.
  struct Pricing {
    double bound = 0.0;
    std::vector<double> z;        // edge slack, lost when the edge is dropped
    std::vector<double> reduced;  // lost when the edge is used
  };

  struct Fixing {
    std::vector<char> open;
    std::vector<int> residual;
    std::vector<int> ones;
    bool settled = false;
    bool overflow = false;
  };

  static Pricing Price(const Subproblem& sp, const std::vector<double>& left,
                       const std::vector<double>& right) {
    Pricing out;
    out.z.resize(sp.edges.size());
    out.reduced.resize(sp.edges.size());
    long double twice = 0.0L;
    for (std::size_t v = 0; v < sp.caps.size(); ++v) {
      twice += static_cast<long double>(sp.caps[v]) * (left[v] + right[v]);
    }
    long double slack = 0.0L;
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      const WeightedEdge& e = sp.edges[k];
      const auto uu = static_cast<std::size_t>(e.u);
      const auto uv = static_cast<std::size_t>(e.v);
      const double w = e.w;
      const double z =
          0.5 * (std::max(0.0, w - left[uu] - right[uv]) + std::max(0.0, w - left[uv] - right[uu]));
      out.z[k] = z;
      out.reduced[k] = 0.5 * (left[uu] + right[uu] + left[uv] + right[uv]) + z - w;
      slack += z;
    }
    out.bound = static_cast<double>(twice / 2.0L + slack);
    return out;
  }

  // Edges whose fixing costs more than the distance to `target` are fixed.
  Fixing Fix(const Subproblem& sp, const Pricing& pricing, double target) const {
    const double room = pricing.bound - target - slack_;
    Fixing out;
    out.open.assign(sp.edges.size(), 0);
    out.residual = sp.caps;
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      const WeightedEdge& e = sp.edges[k];
      if (pricing.z[k] > room) {
        out.ones.push_back(static_cast<int>(k));
        --out.residual[static_cast<std::size_t>(e.u)];
        --out.residual[static_cast<std::size_t>(e.v)];
        out.settled = true;
      } else if (pricing.reduced[k] > room) {
        out.settled = true;
      } else {
        out.open[k] = 1;
      }
    }
    for (int r : out.residual) out.overflow = out.overflow || r < 0;
    return out;
  }

  // Reduction to ordinary matching. Every vertex becomes cap many copies
  // and an edge joins all copies of its ends, which lets a matching use the
  // edge more than once. Edges caught doing so are replaced by a gadget: two
  // ports joined with weight K, each joined to the copies of its own end
  // with weight (K + w) / 2. A maximum matching pairs the ports unless both
  // serve copies, and then it earns K + w.
  // The loop stops when no edge is repeated (the solution is then optimal)
  // or the graph grows too large.
  struct MultiMatching {
    double bound = 0.0;
    std::vector<int> uses;  // per edge
  };

  std::optional<MultiMatching> MatchCopies(const Subproblem& sp, const EdgeIndex& index) const {
    const std::size_t m = sp.caps.size();
    const std::size_t ne = sp.edges.size();
    std::vector<int> degree(m, 0);
    double w_max = 0.0;
    for (const WeightedEdge& e : sp.edges) {
      ++degree[static_cast<std::size_t>(e.u)];
      ++degree[static_cast<std::size_t>(e.v)];
      w_max = std::max(w_max, e.w);
    }
    std::vector<int> first(m + 1, 0);
    for (std::size_t v = 0; v < m; ++v) first[v + 1] = first[v] + std::min(sp.caps[v], degree[v]);
    const int copies = first[m];
    if (copies > config_.max_matching_nodes || w_max <= 0.0) return std::nullopt;
    std::vector<int> owner(static_cast<std::size_t>(copies));
    for (std::size_t v = 0; v < m; ++v) {
      for (int a = first[v]; a < first[v + 1]; ++a) owner[static_cast<std::size_t>(a)] = static_cast<int>(v);
    }

    // Integer weights keep the blossom algorithm exact. Each edge is off by
    // less than one unit, and a matching uses at most copies / 2 edges.
    const double scale = std::ldexp(1.0, 48) / w_max;
    std::vector<std::int64_t> w(ne);
    std::int64_t top = 0;
    for (std::size_t k = 0; k < ne; ++k) {
      w[k] = std::max<std::int64_t>(1, std::llround(sp.edges[k].w * scale));
      top = std::max(top, w[k]);
    }
    const std::int64_t big = 2 * (top + 1);  // K in doubled units

    MultiMatching out;
    std::vector<int> port(ne, -1);
    int nodes = copies;
    while (true) {
      MaxWeightMatching matching(nodes);
      for (std::size_t k = 0; k < ne; ++k) {
        const auto uu = static_cast<std::size_t>(sp.edges[k].u);
        const auto uv = static_cast<std::size_t>(sp.edges[k].v);
        const int p = port[k];
        if (p < 0) {
          for (int a = first[uu]; a < first[uu + 1]; ++a) {
            for (int b = first[uv]; b < first[uv + 1]; ++b) matching.SetWeight(a, b, 2 * w[k]);
          }
          continue;
        }
        matching.SetWeight(p, p + 1, big);
        for (int a = first[uu]; a < first[uu + 1]; ++a) matching.SetWeight(a, p, big / 2 + w[k]);
        for (int b = first[uv]; b < first[uv + 1]; ++b) matching.SetWeight(b, p + 1, big / 2 + w[k]);
      }
      const std::int64_t total = matching.Solve();

      const std::int64_t gadgets = (nodes - copies) / 2;
      out.bound = static_cast<double>(
          (static_cast<long double>(total - big * gadgets) / 2.0L + copies / 2) / scale);
      out.uses.assign(ne, 0);
      for (int a = 0; a < copies; ++a) {
        const int b = matching.mate(a);
        if (b <= a || b >= copies) continue;
        const int u = owner[static_cast<std::size_t>(a)];
        const int v = owner[static_cast<std::size_t>(b)];
        ++out.uses[static_cast<std::size_t>(index.Find(u, v))];
      }
      for (std::size_t k = 0; k < ne; ++k) {
        const int p = port[k];
        if (p >= 0 && matching.mate(p) >= 0 && matching.mate(p) < copies &&
            matching.mate(p + 1) >= 0 && matching.mate(p + 1) < copies) {
          out.uses[k] = 1;
        }
      }
      int added = 0;
      for (std::size_t k = 0; k < ne; ++k) {
        if (out.uses[k] > 1) ++added;
      }
      if (added == 0 || nodes + 2 * added > config_.max_matching_nodes) return out;
      for (std::size_t k = 0; k < ne; ++k) {
        if (out.uses[k] > 1) {
          port[k] = nodes;
          nodes += 2;
        }
      }
    }
  }

  // Best solution of `sp` found while trying to beat `floor`, with an upper
  // bound on its optimum (or on `floor` plus the tolerance, when the search
  // proved nothing better exists).
  Outcome Search(const Subproblem& sp, double floor, double tol) {
    if (sp.edges.empty()) return {};
    // The same piece tends to reappear under many branches.
    std::vector<int> key;
    key.reserve(sp.caps.size() + sp.edges.size() + 1);
    key.insert(key.end(), sp.caps.begin(), sp.caps.end());
    key.push_back(-1);
    key.insert(key.end(), sp.origin.begin(), sp.origin.end());
    if (auto it = memo_.find(key); it != memo_.end()) {
      const Outcome& known = it->second;
      if (known.upper <= std::max(known.value, floor) + tol) return known;
    }
    Outcome out = SearchNode(sp, floor, tol);
    if (!aborted_) memo_.insert_or_assign(std::move(key), out);
    return out;
  }

  Outcome SearchNode(const Subproblem& sp, double floor, double tol) {
    ++nodes_;
    Outcome best;
    auto settle = [&best](double upper) {
      best.upper = std::max(best.value, upper);
      return best;
    };

    const int m = static_cast<int>(sp.caps.size());
    const EdgeIndex index(m, sp.edges);
    std::vector<int> order(sp.edges.size());
    std::iota(order.begin(), order.end(), 0);
    Complete(sp, index, order, best);

    double bound = Floor(GreedyBound(sp));
    if (bound <= std::max(best.value, floor) + tol || Aborted()) return settle(bound);

    // Small enough for the exact matching reduction. When it gives up with
    // a repeated edge left, the branching below removes that edge.
    int doubled = -1;
    if (const std::optional<MultiMatching> relaxed = MatchCopies(sp, index)) {
      ++matchings_;
      bound = std::min(bound, Floor(relaxed->bound));
      std::vector<char> chosen(sp.edges.size(), 0);
      std::vector<int> left = sp.caps;
      for (std::size_t k = 0; k < sp.edges.size(); ++k) {
        const int uses = relaxed->uses[k];
        if (uses == 0) continue;
        chosen[k] = 1;
        --left[static_cast<std::size_t>(sp.edges[k].u)];
        --left[static_cast<std::size_t>(sp.edges[k].v)];
        if (uses > 1 && doubled < 0) doubled = static_cast<int>(k);
      }
      if (doubled >= 0) Improve(sp, index, chosen, left);
      Adopt(sp, chosen, best);
      if (doubled < 0) return settle(bound);
      if (bound <= std::max(best.value, floor) + tol || Aborted()) return settle(bound);
    }

    const FractionalBMatching lp = SolveFractionalBMatching(m, sp.caps, sp.edges, order);
    ++lp_solves_;
    bound = std::min(bound, Floor(lp.bound));
    if (bound <= std::max(best.value, floor) + tol) return settle(bound);

    int branch = -1;
    std::vector<int> lp_order;
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      if (lp.x[k] == 1.0) lp_order.push_back(static_cast<int>(k));
    }
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      if (lp.x[k] == 0.5) {
        // Edges are sorted by decreasing weight, so the first fractional
        // one maximizes weight times fractionality.
        if (branch < 0) branch = static_cast<int>(k);
        lp_order.push_back(static_cast<int>(k));
      }
    }
    if (branch < 0) {
      std::vector<char> chosen(sp.edges.size(), 0);
      for (int id : lp_order) chosen[static_cast<std::size_t>(id)] = 1;
      Adopt(sp, chosen, best);
      return settle(bound);
    }
    for (std::size_t k = 0; k < sp.edges.size(); ++k) {
      if (lp.x[k] == 0.0) lp_order.push_back(static_cast<int>(k));
    }
    Complete(sp, index, lp_order, best);
    const double target = std::max(best.value, floor);
    if (bound <= target + tol || Aborted()) return settle(bound);

    Fixing fixing = Fix(sp, Price(sp, lp.left_dual, lp.right_dual), target);
    if (!fixing.settled && doubled >= 0) branch = doubled;
    // The fixed edges overflow a vertex: nothing beats the target.
    if (fixing.overflow) return settle(std::min(bound, target + slack_));
    std::vector<char>& open = fixing.open;
    std::vector<int>& residual = fixing.residual;
    const std::vector<int>& fixed_ones = fixing.ones;
    const bool settled = fixing.settled;

    if (settled) {
      for (std::size_t k = 0; k < sp.edges.size(); ++k) {
        const WeightedEdge& e = sp.edges[k];
        if (residual[static_cast<std::size_t>(e.u)] <= 0 ||
            residual[static_cast<std::size_t>(e.v)] <= 0) {
          open[k] = 0;
        }
      }
      std::vector<int> chosen;
      for (int id : fixed_ones) chosen.push_back(sp.origin[static_cast<std::size_t>(id)]);
      const double fixed_value = Value(chosen);
      const std::vector<Subproblem> pieces = Split(sp, open, residual);
      const double piece_tol = tol / static_cast<double>(std::max<std::size_t>(1, pieces.size()));
      // Pieces are independent, so a piece only matters if it can lift the
      // total above the target given what the others can contribute at best.
      std::vector<double> known(pieces.size());
      long double upper = fixed_value;
      for (std::size_t c = 0; c < pieces.size(); ++c) {
        known[c] = pieces.size() == 1 ? 0.0 : PieceBound(pieces[c]);
        upper += known[c];
      }
      for (std::size_t c = 0; c < pieces.size(); ++c) {
        const double piece_floor = target - static_cast<double>(upper - known[c]);
        Outcome o = Search(pieces[c], piece_floor, piece_tol);
        upper += o.upper - known[c];
        known[c] = o.upper;
        chosen.insert(chosen.end(), o.chosen.begin(), o.chosen.end());
        if (o.upper <= piece_floor + piece_tol) break;
      }
      const double value = Value(chosen);
      if (value > best.value) {
        best.value = value;
        best.chosen = std::move(chosen);
      }
      return settle(std::min(bound, std::max(target + slack_, static_cast<double>(upper))));
    }

    const double w = sp.edges[static_cast<std::size_t>(branch)].w;
    Outcome with = Search(Without(sp, branch, true), target - w, tol);
    with.chosen.push_back(sp.origin[static_cast<std::size_t>(branch)]);
    with.value = Value(with.chosen);
    const double upper_with = with.upper + w;
    if (with.value > best.value) {
      best.value = with.value;
      best.chosen = std::move(with.chosen);
    }
    Outcome without = Search(Without(sp, branch, false), std::max(best.value, floor), tol);
    if (without.value > best.value) {
      best.value = without.value;
      best.chosen = std::move(without.chosen);
    }
    return settle(std::min(bound, std::max(upper_with, without.upper)));
  }

  const Component& comp_;
  const SolverConfig& config_;
  const Deadline& deadline_;
  double tolerance_ = 0.0;
  double slack_ = 0.0;
  SolverStatus status_ = SolverStatus::kOptimal;
  bool aborted_ = false;
  std::int64_t nodes_ = 0;
  std::int64_t lp_solves_ = 0;
  std::int64_t matchings_ = 0;
  std::map<std::vector<int>, Outcome> memo_;
};

std::vector<ComponentResult> SolveComponents(const std::vector<Component>& components,
                                             const SolverConfig& config,
                                             const Deadline& deadline) {
  std::vector<ComponentResult> results(components.size());
  // The per-component gaps add up; split the budget so the total stays
  // within the configured tolerance.
  const double tolerance =
      config.gap_tolerance / static_cast<double>(std::max<std::size_t>(1, components.size()));
  const int threads = std::max(1, config.threads);
  if (threads == 1 || components.size() < 2) {
    for (std::size_t c = 0; c < components.size(); ++c) {
      results[c] = BranchAndBound(components[c], config, deadline, tolerance).Run();
    }
    return results;
  }
  // Components are independent; each worker takes a fixed stride so the
  // assignment does not depend on timing.
  std::vector<std::future<void>> workers;
  for (int t = 0; t < threads; ++t) {
    workers.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t c = static_cast<std::size_t>(t); c < components.size();
           c += static_cast<std::size_t>(threads)) {
        results[c] = BranchAndBound(components[c], config, deadline, tolerance).Run();
      }
    }));
  }
  for (auto& w : workers) w.get();
  return results;
}

}  // namespace

ProblemInstance BuildV1Instance(const ObservedData& data) { return BuildInstance(data, false); }

ProblemInstance BuildV2Instance(const ObservedData& data) { return BuildInstance(data, true); }

SolverResult Solve(const ProblemInstance& instance, const SolverConfig& config) {
  if (config.gap_tolerance < 0.0) throw std::invalid_argument("gap tolerance must be >= 0");
  const Deadline deadline(config.time_limit_seconds);
  SolverResult result;
  result.best_matrix = AdjacencyMatrix(instance.n());
  if (!instance.feasible()) {
    result.status = SolverStatus::kInfeasible;
    result.objective = -std::numeric_limits<double>::infinity();
    result.upper_bound = -std::numeric_limits<double>::infinity();
    result.stats.wall_seconds = deadline.elapsed();
    return result;
  }

  const Presolved presolved = Presolve(instance);
  const std::vector<ComponentResult> parts = SolveComponents(presolved.components, config, deadline);

  std::vector<VertexPair> edges = instance.forced_edges();
  long double forced_value = 0.0L;
  for (const VertexPair& e : edges) forced_value += instance.weight(e.first, e.second);
  long double upper = forced_value;
  result.status = SolverStatus::kOptimal;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const Component& comp = presolved.components[c];
    const ComponentResult& part = parts[c];
    for (int id : part.chosen) {
      const WeightedEdge& e = comp.edges[static_cast<std::size_t>(id)];
      edges.emplace_back(comp.vertices[static_cast<std::size_t>(e.u)],
                         comp.vertices[static_cast<std::size_t>(e.v)]);
    }
    upper += part.upper_bound;
    if (part.status != SolverStatus::kOptimal && result.status == SolverStatus::kOptimal) {
      result.status = part.status;
    }
    result.stats.nodes += part.nodes;
    result.stats.lp_solves += part.lp_solves;
    result.stats.matching_solves += part.matching_solves;
  }
  result.stats.components = static_cast<int>(parts.size());
  result.best_matrix = AdjacencyMatrix(instance.n(), std::move(edges));
  result.objective = instance.Objective(result.best_matrix);
  result.upper_bound = std::max(result.objective, static_cast<double>(upper));
  result.gap = result.upper_bound - result.objective;
  result.stats.wall_seconds = deadline.elapsed();
  return result;
}

LpRelaxation SolveLpRelaxation(const ProblemInstance& instance) {
  if (!instance.feasible()) throw InfeasibleInstanceError("forced edges exceed a degree cap");
  LpRelaxation out;
  long double value = 0.0L;
  for (const VertexPair& e : instance.forced_edges()) {
    value += instance.weight(e.first, e.second);
    out.solution.emplace_back(e, 1.0);
  }
  const Presolved presolved = Presolve(instance);
  for (const Component& comp : presolved.components) {
    std::vector<int> usable(comp.edges.size());
    std::iota(usable.begin(), usable.end(), 0);
    const FractionalBMatching lp = SolveFractionalBMatching(
        static_cast<int>(comp.vertices.size()), comp.caps, comp.edges, usable);
    value += lp.bound;
    for (std::size_t k = 0; k < comp.edges.size(); ++k) {
      if (lp.x[k] > 0.0) {
        const WeightedEdge& e = comp.edges[k];
        out.solution.emplace_back(VertexPair(comp.vertices[static_cast<std::size_t>(e.u)],
                                             comp.vertices[static_cast<std::size_t>(e.v)]),
                                  lp.x[k]);
      }
    }
  }
  std::sort(out.solution.begin(), out.solution.end());
  out.value = static_cast<double>(value);
  return out;
}

double LpRelaxationBound(const ProblemInstance& instance) {
  return SolveLpRelaxation(instance).value;
}

}  // namespace depbound
