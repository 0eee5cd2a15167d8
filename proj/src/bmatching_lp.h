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

// Fractional simple b-matching:
//
//   maximize sum_e w_e x_e  s.t.  x(delta(v)) <= cap_v,  0 <= x_e <= 1.
//
// Its optimum is half the optimum of the bipartite b-matching on the double
// cover (left copy v_L, right copy v_R, arcs u_L -> v_R and v_L -> u_R for
// every edge), which is a min-cost flow problem. Hence optimal solutions are
// half-integral.
//
// The flow is solved on a sparse candidate subset of the edges. Dual values
// recovered from node potentials price the remaining edges; violated edges
// join the candidate set until none remain. The reported bound is the dual
// objective over all edges, which is a valid upper bound whatever the state
// of the pricing loop.

#ifndef DEPBOUND_SRC_BMATCHING_LP_H_
#define DEPBOUND_SRC_BMATCHING_LP_H_

#include <span>
#include <vector>

namespace depbound::internal {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

struct FractionalBMatching {
  // Dual objective: an upper bound on the LP optimum.
  double bound = 0.0;
  // Objective of `x`.
  double primal = 0.0;
  // Indexed like the `edges` argument; entries are 0, 1/2 or 1. Edges not in
  // `usable` are 0.
  std::vector<double> x;
  // Dual prices of the double cover: left and right copies of each vertex.
  // y_v = (left_v + right_v) / 2 is a feasible dual for the fractional
  // b-matching, with edge slack z_e taken as small as feasibility allows.
  std::vector<double> left_dual;
  std::vector<double> right_dual;
  int pricing_rounds = 0;
};

// `edges` must have positive weights and be sorted by decreasing weight.
// Only edges listed in `usable` (ascending indices into `edges`) take part.
FractionalBMatching SolveFractionalBMatching(int num_vertices, std::span<const int> caps,
                                             std::span<const WeightedEdge> edges,
                                             std::span<const int> usable);

}  // namespace depbound::internal

#endif  // DEPBOUND_SRC_BMATCHING_LP_H_
