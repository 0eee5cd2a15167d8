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

// Degree-sequence realization around a fixed set of forced edges.
//
// Phase one is Havel-Hakimi: the vertex with the largest residual demand is
// joined to the non-adjacent vertices with the largest demands. Forced edges
// can make that greedy step get stuck even though a realization exists, so
// phase two repairs leftover demand with edge switches: a free edge {x, y}
// becomes {u, x} + {w, y} (or {u, x} + {u, y}).

#include <algorithm>
#include <numeric>

#include "depbound/solver.h"

namespace depbound {

namespace {

class Realizer {
 public:
  Realizer(int n, std::vector<std::int64_t> demand)
      : n_(n), demand_(std::move(demand)), adjacent_(static_cast<std::size_t>(n) * n, false) {}

  bool Adjacent(int a, int b) const { return adjacent_[Slot(a, b)]; }

  void AddForced(int a, int b) {
    Link(a, b);
    forced_.emplace_back(a, b);
  }

  void AddFree(int a, int b) {
    Link(a, b);
    free_.emplace_back(a, b);
    --demand_[static_cast<std::size_t>(a)];
    --demand_[static_cast<std::size_t>(b)];
  }

  bool Run() {
    for (std::int64_t d : demand_) {
      if (d < 0) return false;
    }
    if (std::accumulate(demand_.begin(), demand_.end(), std::int64_t{0}) % 2 != 0) return false;
    HavelHakimi();
    return Repair();
  }

  std::vector<VertexPair> edges() const {
    std::vector<VertexPair> all = forced_;
    all.insert(all.end(), free_.begin(), free_.end());
    return all;
  }

 private:
  std::size_t Slot(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b);
  }

  void Link(int a, int b) {
    adjacent_[Slot(a, b)] = true;
    adjacent_[Slot(b, a)] = true;
  }

  void Unlink(int a, int b) {
    adjacent_[Slot(a, b)] = false;
    adjacent_[Slot(b, a)] = false;
  }

  std::int64_t demand(int v) const { return demand_[static_cast<std::size_t>(v)]; }

  void HavelHakimi() {
    std::vector<char> stuck(static_cast<std::size_t>(n_), 0);
    std::vector<int> order(static_cast<std::size_t>(n_));
    while (true) {
      int v = -1;
      for (int i = 0; i < n_; ++i) {
        if (stuck[static_cast<std::size_t>(i)] || demand(i) <= 0) continue;
        if (v < 0 || demand(i) > demand(v)) v = i;
      }
      if (v < 0) return;
      std::vector<int> candidates;
      for (int u = 0; u < n_; ++u) {
        if (u != v && demand(u) > 0 && !Adjacent(u, v)) candidates.push_back(u);
      }
      std::stable_sort(candidates.begin(), candidates.end(),
                       [this](int a, int b) { return demand(a) > demand(b); });
      const auto take =
          std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(demand(v)));
      for (std::size_t k = 0; k < take; ++k) AddFree(v, candidates[k]);
      if (demand(v) > 0) stuck[static_cast<std::size_t>(v)] = 1;
    }
  }

  bool Repair() {
    while (true) {
      std::vector<int> short_of;
      for (int i = 0; i < n_; ++i) {
        if (demand(i) > 0) short_of.push_back(i);
      }
      if (short_of.empty()) return true;
      if (TryDirect(short_of) || TrySwitch(short_of)) continue;
      return false;
    }
  }

  bool TryDirect(const std::vector<int>& short_of) {
    for (std::size_t a = 0; a < short_of.size(); ++a) {
      for (std::size_t b = a + 1; b < short_of.size(); ++b) {
        if (!Adjacent(short_of[a], short_of[b])) {
          AddFree(short_of[a], short_of[b]);
          return true;
        }
      }
    }
    return false;
  }

  // Replaces free edge k = {x, y} by {u, x} and {w, y}; u == w is allowed
  // when u still needs two more edges.
  bool TrySwitch(const std::vector<int>& short_of) {
    for (std::size_t a = 0; a < short_of.size(); ++a) {
      for (std::size_t b = a; b < short_of.size(); ++b) {
        const int u = short_of[a];
        const int w = short_of[b];
        if (u == w && demand(u) < 2) continue;
        for (std::size_t k = 0; k < free_.size(); ++k) {
          const VertexPair e = free_[k];
          if (e.first == u || e.first == w || e.second == u || e.second == w) continue;
          for (int flip = 0; flip < 2; ++flip) {
            const int x = flip ? e.second : e.first;
            const int y = flip ? e.first : e.second;
            if (Adjacent(u, x) || Adjacent(w, y)) continue;
            Unlink(e.first, e.second);
            free_.erase(free_.begin() + static_cast<std::ptrdiff_t>(k));
            ++demand_[static_cast<std::size_t>(e.first)];
            ++demand_[static_cast<std::size_t>(e.second)];
            AddFree(u, x);
            AddFree(w, y);
            return true;
          }
        }
      }
    }
    return false;
  }

  int n_;
  std::vector<std::int64_t> demand_;
  std::vector<bool> adjacent_;
  std::vector<VertexPair> forced_;
  std::vector<VertexPair> free_;
};

}  // namespace

std::optional<AdjacencyMatrix> MaxV2FastPath(const ObservedData& data) {
  if (!Validate(data).compatible) return std::nullopt;
  const int n = data.n();
  // Forced edges consume demand.
  std::vector<std::int64_t> demand = TruncatedDegrees(data);
  for (const VertexPair& e : data.observed_edges) {
    --demand[static_cast<std::size_t>(e.first)];
    --demand[static_cast<std::size_t>(e.second)];
  }
  Realizer residual(n, std::move(demand));
  for (const VertexPair& e : data.observed_edges) residual.AddForced(e.first, e.second);
  if (!residual.Run()) return std::nullopt;
  return AdjacencyMatrix(n, residual.edges());
}

}  // namespace depbound
