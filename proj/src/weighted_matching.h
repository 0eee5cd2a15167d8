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

// Maximum weight matching in a general graph (Edmonds' blossom algorithm,
// primal-dual, dense O(n^3)). Weights are integers so that every tightness
// test is exact.

#ifndef DEPBOUND_SRC_WEIGHTED_MATCHING_H_
#define DEPBOUND_SRC_WEIGHTED_MATCHING_H_

#include <cstdint>
#include <queue>
#include <vector>

namespace depbound::internal {

class MaxWeightMatching {
 public:
  // Vertices are 0..n-1. Memory is quadratic in n.
  explicit MaxWeightMatching(int n);

  // Sets the weight of {u, v}; only positive weights form edges. Weights
  // must stay below 2^60.
  void SetWeight(int u, int v, std::int64_t w);

  // Computes a maximum weight matching and returns its weight.
  std::int64_t Solve();

  // Partner of v in the matching, or -1.
  int mate(int v) const;

  // Vertex dual after Solve(), doubled: every edge {u, v} outside the graph
  // with weight w <= (dual(u) + dual(v)) / 2 leaves the matching optimal
  // when added. Unmatched vertices have dual zero.
  std::int64_t dual(int v) const { return lab_[static_cast<std::size_t>(v) + 1]; }

 private:
  struct Edge {
    int u = 0;
    int v = 0;
    std::int64_t w = 0;
  };

  Edge& edge(int a, int b) {
    return g_[static_cast<std::size_t>(a) * stride_ + static_cast<std::size_t>(b)];
  }
  std::int64_t Delta(const Edge& e) const;
  void UpdateSlack(int u, int x);
  void SetSlack(int x);
  void Push(int x);
  void SetTop(int x, int b);
  int EvenPosition(int b, int xr);
  void SetMatch(int u, int v);
  void Augment(int u, int v);
  int CommonAncestor(int u, int v);
  void AddBlossom(int u, int lca, int v);
  void ExpandBlossom(int b);
  bool OnTightEdge(const Edge& e);
  bool Phase();

  int n_;
  int n_x_ = 0;
  std::size_t stride_;
  std::vector<Edge> g_;
  std::vector<std::int64_t> lab_;
  std::vector<int> match_, slack_, st_, pa_, s_, vis_;
  std::vector<std::vector<int>> flo_from_;
  std::vector<std::vector<int>> flo_;
  std::vector<std::vector<int>> adj_;  // neighbours of original vertices
  std::queue<int> q_;
  int stamp_ = 0;
};

}  // namespace depbound::internal

#endif  // DEPBOUND_SRC_WEIGHTED_MATCHING_H_
