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

#include "bmatching_lp.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <utility>

namespace depbound::internal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxPricingRounds = 200;

// Successive shortest paths with Johnson potentials, specialised to
// maximum-profit flow: augmentation stops as soon as the cheapest s-t path
// has nonnegative cost.
class MinCostFlow {
 public:
  struct Arc {
    int to;
    int rev;
    int cap;
    double cost;
  };

  explicit MinCostFlow(int num_nodes) : graph_(static_cast<std::size_t>(num_nodes)) {}

  // Returns the position of the forward arc in the adjacency of `from`.
  int AddArc(int from, int to, int cap, double cost) {
    auto& out = graph_[static_cast<std::size_t>(from)];
    auto& in = graph_[static_cast<std::size_t>(to)];
    out.push_back({to, static_cast<int>(in.size()), cap, cost});
    in.push_back({from, static_cast<int>(out.size()) - 1, 0, -cost});
    return static_cast<int>(out.size()) - 1;
  }

  const Arc& arc(int from, int pos) const {
    return graph_[static_cast<std::size_t>(from)][static_cast<std::size_t>(pos)];
  }

  // `potential` must make every residual arc's reduced cost nonnegative.
  void Run(int source, int sink, std::vector<double> potential, double eps) {
    const std::size_t n = graph_.size();
    potential_ = std::move(potential);
    std::vector<double> dist(n);
    std::vector<int> prev_node(n), prev_arc(n);
    std::vector<char> done(n);
    using Item = std::pair<double, int>;
    while (true) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(done.begin(), done.end(), 0);
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      dist[static_cast<std::size_t>(source)] = 0.0;
      heap.emplace(0.0, source);
      double max_dist = 0.0;
      while (!heap.empty()) {
        const auto [d, a] = heap.top();
        heap.pop();
        const auto ua = static_cast<std::size_t>(a);
        if (done[ua]) continue;
        done[ua] = 1;
        max_dist = std::max(max_dist, d);
        const auto& out = graph_[ua];
        for (std::size_t k = 0; k < out.size(); ++k) {
          const Arc& e = out[k];
          if (e.cap <= 0) continue;
          const auto ub = static_cast<std::size_t>(e.to);
          if (done[ub]) continue;
          const double reduced = std::max(0.0, e.cost + potential_[ua] - potential_[ub]);
          const double nd = d + reduced;
          if (nd < dist[ub]) {
            dist[ub] = nd;
            prev_node[ub] = a;
            prev_arc[ub] = static_cast<int>(k);
            heap.emplace(nd, e.to);
          }
        }
      }
      for (std::size_t v = 0; v < n; ++v) {
        potential_[v] += done[v] ? dist[v] : max_dist;
      }
      const auto us = static_cast<std::size_t>(source);
      const auto ut = static_cast<std::size_t>(sink);
      if (!done[ut]) break;
      const double path_cost = potential_[ut] - potential_[us];
      if (path_cost >= -eps) break;
      int push = std::numeric_limits<int>::max();
      for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
        const Arc& e = graph_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                             [static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
        push = std::min(push, e.cap);
      }
      for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
        Arc& e = graph_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                       [static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
        e.cap -= push;
        graph_[static_cast<std::size_t>(v)][static_cast<std::size_t>(e.rev)].cap += push;
      }
      flow_ += push;
    }
  }

  // Node potentials pi with pi(b) <= pi(a) + cost(a, b) on every residual
  // arc and on the implicit return arc sink -> source (and source -> sink
  // when flow is positive). Starts from the search potentials, which are
  // feasible up to rounding, and repairs them Bellman-Ford style.
  std::vector<double> FeasiblePotentials(int source, int sink, double tol) const {
    const std::size_t n = graph_.size();
    std::vector<double> pi = potential_;
    std::deque<int> queue;
    std::vector<char> queued(n, 1);
    for (std::size_t v = 0; v < n; ++v) queue.push_back(static_cast<int>(v));
    std::size_t budget = 50 * n * n + 1000;
    auto relax = [&](int a, int b, double cost) {
      const auto ub = static_cast<std::size_t>(b);
      const double cand = pi[static_cast<std::size_t>(a)] + cost;
      if (cand < pi[ub] - tol) {
        pi[ub] = cand;
        if (!queued[ub]) {
          queued[ub] = 1;
          queue.push_back(b);
        }
      }
    };
    while (!queue.empty() && budget-- > 0) {
      const int a = queue.front();
      queue.pop_front();
      queued[static_cast<std::size_t>(a)] = 0;
      for (const Arc& e : graph_[static_cast<std::size_t>(a)]) {
        if (e.cap > 0) relax(a, e.to, e.cost);
      }
      if (a == sink) relax(sink, source, 0.0);
      if (a == source && flow_ > 0) relax(source, sink, 0.0);
    }
    return pi;
  }

  int flow() const { return flow_; }

 private:
  std::vector<std::vector<Arc>> graph_;
  std::vector<double> potential_;
  int flow_ = 0;
};

}  // namespace

FractionalBMatching SolveFractionalBMatching(int num_vertices, std::span<const int> caps,
                                             std::span<const WeightedEdge> edges,
                                             std::span<const int> usable) {
  FractionalBMatching result;
  result.x.assign(edges.size(), 0.0);
  result.left_dual.assign(static_cast<std::size_t>(num_vertices), 0.0);
  result.right_dual.assign(static_cast<std::size_t>(num_vertices), 0.0);
  if (usable.empty()) return result;

  const auto nv = static_cast<std::size_t>(num_vertices);
  double wmax = 0.0;
  for (int id : usable) wmax = std::max(wmax, edges[static_cast<std::size_t>(id)].w);
  const double eps = 1e-13 * std::max(1.0, wmax);

  // Incidence lists in decreasing weight order (usable is ascending and the
  // edge array is sorted by decreasing weight).
  std::vector<std::vector<int>> incident(nv);
  for (int id : usable) {
    const WeightedEdge& e = edges[static_cast<std::size_t>(id)];
    incident[static_cast<std::size_t>(e.u)].push_back(id);
    incident[static_cast<std::size_t>(e.v)].push_back(id);
  }

  std::vector<char> candidate(edges.size(), 0);
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t keep =
        std::min(incident[v].size(), static_cast<std::size_t>(caps[v]) + 2);
    for (std::size_t k = 0; k < keep; ++k) {
      candidate[static_cast<std::size_t>(incident[v][k])] = 1;
    }
  }
  {
    // Greedy integral solution seeds the structure the optimum usually has.
    std::vector<int> left(caps.begin(), caps.end());
    for (int id : usable) {
      const WeightedEdge& e = edges[static_cast<std::size_t>(id)];
      auto& lu = left[static_cast<std::size_t>(e.u)];
      auto& lv = left[static_cast<std::size_t>(e.v)];
      if (lu > 0 && lv > 0) {
        --lu;
        --lv;
        candidate[static_cast<std::size_t>(id)] = 1;
      }
    }
  }

  const int source = 0;
  const int sink = 2 * num_vertices + 1;
  auto left_node = [](int v) { return 1 + v; };
  auto right_node = [num_vertices](int v) { return 1 + num_vertices + v; };

  std::vector<double> u_dual(nv), v_dual(nv);
  for (int round = 1;; ++round) {
    result.pricing_rounds = round;
    MinCostFlow flow(2 * num_vertices + 2);
    for (int v = 0; v < num_vertices; ++v) {
      flow.AddArc(source, left_node(v), caps[static_cast<std::size_t>(v)], 0.0);
    }
    struct ArcRef {
      int id;
      int from;
      int pos;
    };
    std::vector<ArcRef> arcs;
    std::vector<double> potential(static_cast<std::size_t>(sink) + 1, 0.0);
    for (int id : usable) {
      if (!candidate[static_cast<std::size_t>(id)]) continue;
      const WeightedEdge& e = edges[static_cast<std::size_t>(id)];
      arcs.push_back({id, left_node(e.u), flow.AddArc(left_node(e.u), right_node(e.v), 1, -e.w)});
      arcs.push_back({id, left_node(e.v), flow.AddArc(left_node(e.v), right_node(e.u), 1, -e.w)});
      auto& pu = potential[static_cast<std::size_t>(right_node(e.u))];
      auto& pv = potential[static_cast<std::size_t>(right_node(e.v))];
      pu = std::min(pu, -e.w);
      pv = std::min(pv, -e.w);
    }
    double pt = 0.0;
    for (int v = 0; v < num_vertices; ++v) {
      flow.AddArc(right_node(v), sink, caps[static_cast<std::size_t>(v)], 0.0);
      pt = std::min(pt, potential[static_cast<std::size_t>(right_node(v))]);
    }
    potential[static_cast<std::size_t>(sink)] = pt;
    flow.Run(source, sink, std::move(potential), eps);

    std::fill(result.x.begin(), result.x.end(), 0.0);
    long double primal = 0.0L;
    for (const ArcRef& a : arcs) {
      if (flow.arc(a.from, a.pos).cap == 0) {
        result.x[static_cast<std::size_t>(a.id)] += 0.5;
        primal += 0.5L * edges[static_cast<std::size_t>(a.id)].w;
      }
    }
    result.primal = static_cast<double>(primal);

    const std::vector<double> pi = flow.FeasiblePotentials(source, sink, eps);
    const double ps = pi[static_cast<std::size_t>(source)];
    const double pt_final = pi[static_cast<std::size_t>(sink)];
    long double dual = 0.0L;
    for (int v = 0; v < num_vertices; ++v) {
      const auto uv = static_cast<std::size_t>(v);
      u_dual[uv] = std::max(0.0, pi[static_cast<std::size_t>(left_node(v))] - ps);
      v_dual[uv] = std::max(0.0, pt_final - pi[static_cast<std::size_t>(right_node(v))]);
      dual += static_cast<long double>(caps[uv]) * (u_dual[uv] + v_dual[uv]);
    }

    // Price every usable edge; the slack terms complete the dual objective.
    std::vector<std::vector<std::pair<double, int>>> violated(nv);
    bool any_violation = false;
    for (int id : usable) {
      const WeightedEdge& e = edges[static_cast<std::size_t>(id)];
      const auto uu = static_cast<std::size_t>(e.u);
      const auto uv = static_cast<std::size_t>(e.v);
      const double z1 = std::max(0.0, e.w - u_dual[uu] - v_dual[uv]);
      const double z2 = std::max(0.0, e.w - u_dual[uv] - v_dual[uu]);
      dual += static_cast<long double>(z1) + z2;
      if (!candidate[static_cast<std::size_t>(id)] && std::max(z1, z2) > 1e-11 * wmax) {
        const double z = std::max(z1, z2);
        violated[uu].emplace_back(-z, id);
        violated[uv].emplace_back(-z, id);
        any_violation = true;
      }
    }
    result.bound = static_cast<double>(dual / 2.0L);
    if (!any_violation || round >= kMaxPricingRounds) break;
    for (std::size_t v = 0; v < nv; ++v) {
      auto& list = violated[v];
      const std::size_t keep = std::min(list.size(), static_cast<std::size_t>(caps[v]) + 2);
      std::partial_sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(keep), list.end());
      for (std::size_t k = 0; k < keep; ++k) {
        candidate[static_cast<std::size_t>(list[k].second)] = 1;
      }
    }
  }
  result.left_dual = std::move(u_dual);
  result.right_dual = std::move(v_dual);
  // Rounding can leave the dual a hair under the primal it certifies.
  result.bound = std::max(result.bound, result.primal);
  return result;
}

}  // namespace depbound::internal
