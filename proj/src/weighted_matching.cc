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

#include "weighted_matching.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace depbound::internal {

// Internally vertices are 1..n and blossoms n+1..2n; index 0 means "none".
// S labels: 0 outer, 1 inner, -1 free. Dual values are kept doubled so that
// every quantity stays integral.

MaxWeightMatching::MaxWeightMatching(int n)
    : n_(n),
      stride_(2 * static_cast<std::size_t>(n) + 1),
      g_(stride_ * stride_),
      lab_(stride_, 0),
      match_(stride_, 0),
      slack_(stride_, 0),
      st_(stride_, 0),
      pa_(stride_, 0),
      s_(stride_, -1),
      vis_(stride_, 0),
      flo_from_(stride_),
      flo_(stride_),
      adj_(stride_) {
  if (n < 0) throw std::invalid_argument("negative vertex count");
  for (int a = 1; a < static_cast<int>(stride_); ++a) {
    for (int b = 1; b < static_cast<int>(stride_); ++b) edge(a, b) = {a, b, 0};
  }
}

void MaxWeightMatching::SetWeight(int u, int v, std::int64_t w) {
  if (u == v || u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw std::invalid_argument("matching edge endpoints out of range");
  }
  if (edge(u + 1, v + 1).w <= 0 && w > 0) {
    adj_[static_cast<std::size_t>(u) + 1].push_back(v + 1);
    adj_[static_cast<std::size_t>(v) + 1].push_back(u + 1);
  }
  edge(u + 1, v + 1).w = w;
  edge(v + 1, u + 1).w = w;
}

int MaxWeightMatching::mate(int v) const {
  const int m = match_[static_cast<std::size_t>(v + 1)];
  return m == 0 ? -1 : m - 1;
}

std::int64_t MaxWeightMatching::Delta(const Edge& e) const {
  return lab_[static_cast<std::size_t>(e.u)] + lab_[static_cast<std::size_t>(e.v)] - 2 * e.w;
}

void MaxWeightMatching::UpdateSlack(int u, int x) {
  auto& sx = slack_[static_cast<std::size_t>(x)];
  if (sx == 0 || Delta(edge(u, x)) < Delta(edge(sx, x))) sx = u;
}

void MaxWeightMatching::SetSlack(int x) {
  slack_[static_cast<std::size_t>(x)] = 0;
  for (int u = 1; u <= n_; ++u) {
    if (edge(u, x).w > 0 && st_[static_cast<std::size_t>(u)] != x &&
        s_[static_cast<std::size_t>(st_[static_cast<std::size_t>(u)])] == 0) {
      UpdateSlack(u, x);
    }
  }
}

void MaxWeightMatching::Push(int x) {
  if (x <= n_) {
    q_.push(x);
    return;
  }
  for (int y : flo_[static_cast<std::size_t>(x)]) Push(y);
}

void MaxWeightMatching::SetTop(int x, int b) {
  st_[static_cast<std::size_t>(x)] = b;
  if (x > n_) {
    for (int y : flo_[static_cast<std::size_t>(x)]) SetTop(y, b);
  }
}

int MaxWeightMatching::EvenPosition(int b, int xr) {
  auto& f = flo_[static_cast<std::size_t>(b)];
  const int pr = static_cast<int>(std::find(f.begin(), f.end(), xr) - f.begin());
  if (pr % 2 == 1) {
    std::reverse(f.begin() + 1, f.end());
    return static_cast<int>(f.size()) - pr;
  }
  return pr;
}

void MaxWeightMatching::SetMatch(int u, int v) {
  match_[static_cast<std::size_t>(u)] = edge(u, v).v;
  if (u <= n_) return;
  const Edge e = edge(u, v);
  const int xr = flo_from_[static_cast<std::size_t>(u)][static_cast<std::size_t>(e.u)];
  const int pr = EvenPosition(u, xr);
  auto& f = flo_[static_cast<std::size_t>(u)];
  for (int i = 0; i < pr; ++i) {
    SetMatch(f[static_cast<std::size_t>(i)], f[static_cast<std::size_t>(i ^ 1)]);
  }
  SetMatch(xr, v);
  std::rotate(f.begin(), f.begin() + pr, f.end());
}

void MaxWeightMatching::Augment(int u, int v) {
  while (true) {
    const int xnv = st_[static_cast<std::size_t>(match_[static_cast<std::size_t>(u)])];
    SetMatch(u, v);
    if (xnv == 0) return;
    SetMatch(xnv, st_[static_cast<std::size_t>(pa_[static_cast<std::size_t>(xnv)])]);
    u = st_[static_cast<std::size_t>(pa_[static_cast<std::size_t>(xnv)])];
    v = xnv;
  }
}

int MaxWeightMatching::CommonAncestor(int u, int v) {
  for (++stamp_; u != 0 || v != 0; std::swap(u, v)) {
    if (u == 0) continue;
    if (vis_[static_cast<std::size_t>(u)] == stamp_) return u;
    vis_[static_cast<std::size_t>(u)] = stamp_;
    u = st_[static_cast<std::size_t>(match_[static_cast<std::size_t>(u)])];
    if (u != 0) u = st_[static_cast<std::size_t>(pa_[static_cast<std::size_t>(u)])];
  }
  return 0;
}

void MaxWeightMatching::AddBlossom(int u, int lca, int v) {
  int b = n_ + 1;
  while (b <= n_x_ && st_[static_cast<std::size_t>(b)] != 0) ++b;
  if (b > n_x_) ++n_x_;
  const auto ub = static_cast<std::size_t>(b);
  lab_[ub] = 0;
  s_[ub] = 0;
  match_[ub] = match_[static_cast<std::size_t>(lca)];
  auto& f = flo_[ub];
  f.clear();
  f.push_back(lca);
  for (int x = u, y; x != lca; x = st_[static_cast<std::size_t>(pa_[static_cast<std::size_t>(y)])]) {
    f.push_back(x);
    y = st_[static_cast<std::size_t>(match_[static_cast<std::size_t>(x)])];
    f.push_back(y);
    Push(y);
  }
  std::reverse(f.begin() + 1, f.end());
  for (int x = v, y; x != lca; x = st_[static_cast<std::size_t>(pa_[static_cast<std::size_t>(y)])]) {
    f.push_back(x);
    y = st_[static_cast<std::size_t>(match_[static_cast<std::size_t>(x)])];
    f.push_back(y);
    Push(y);
  }
  SetTop(b, b);
  for (int x = 1; x <= n_x_; ++x) {
    edge(b, x).w = 0;
    edge(x, b).w = 0;
  }
  auto& from = flo_from_[ub];
  from.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int xs : f) {
    for (int x = 1; x <= n_x_; ++x) {
      if (edge(b, x).w == 0 || Delta(edge(xs, x)) < Delta(edge(b, x))) {
        edge(b, x) = edge(xs, x);
        edge(x, b) = edge(x, xs);
      }
    }
    const auto& xs_from = flo_from_[static_cast<std::size_t>(xs)];
    for (int x = 1; x <= n_; ++x) {
      if (xs_from[static_cast<std::size_t>(x)] != 0) from[static_cast<std::size_t>(x)] = xs;
    }
  }
  SetSlack(b);
}

void MaxWeightMatching::ExpandBlossom(int b) {
  const auto ub = static_cast<std::size_t>(b);
  for (int x : flo_[ub]) SetTop(x, x);
  const int xr = flo_from_[ub][static_cast<std::size_t>(edge(b, pa_[ub]).u)];
  const int pr = EvenPosition(b, xr);
  const auto& f = flo_[ub];
  for (int i = 0; i < pr; i += 2) {
    const int xs = f[static_cast<std::size_t>(i)];
    const int xns = f[static_cast<std::size_t>(i + 1)];
    pa_[static_cast<std::size_t>(xs)] = edge(xns, xs).u;
    s_[static_cast<std::size_t>(xs)] = 1;
    s_[static_cast<std::size_t>(xns)] = 0;
    slack_[static_cast<std::size_t>(xs)] = 0;
    SetSlack(xns);
    Push(xns);
  }
  s_[static_cast<std::size_t>(xr)] = 1;
  pa_[static_cast<std::size_t>(xr)] = pa_[ub];
  for (std::size_t i = static_cast<std::size_t>(pr) + 1; i < f.size(); ++i) {
    const int xs = f[i];
    s_[static_cast<std::size_t>(xs)] = -1;
    SetSlack(xs);
  }
  st_[ub] = 0;
}

bool MaxWeightMatching::OnTightEdge(const Edge& e) {
  const int u = st_[static_cast<std::size_t>(e.u)];
  const int v = st_[static_cast<std::size_t>(e.v)];
  const auto uv = static_cast<std::size_t>(v);
  if (s_[uv] == -1) {
    pa_[uv] = e.u;
    s_[uv] = 1;
    const int nu = st_[static_cast<std::size_t>(match_[uv])];
    slack_[uv] = 0;
    slack_[static_cast<std::size_t>(nu)] = 0;
    s_[static_cast<std::size_t>(nu)] = 0;
    Push(nu);
  } else if (s_[uv] == 0) {
    const int lca = CommonAncestor(u, v);
    if (lca == 0) {
      Augment(u, v);
      Augment(v, u);
      return true;
    }
    AddBlossom(u, lca, v);
  }
  return false;
}

bool MaxWeightMatching::Phase() {
  std::fill(s_.begin() + 1, s_.begin() + n_x_ + 1, -1);
  std::fill(slack_.begin() + 1, slack_.begin() + n_x_ + 1, 0);
  q_ = {};
  for (int x = 1; x <= n_x_; ++x) {
    const auto ux = static_cast<std::size_t>(x);
    if (st_[ux] == x && match_[ux] == 0) {
      pa_[ux] = 0;
      s_[ux] = 0;
      Push(x);
    }
  }
  if (q_.empty()) return false;
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  while (true) {
    while (!q_.empty()) {
      const int u = q_.front();
      q_.pop();
      if (s_[static_cast<std::size_t>(st_[static_cast<std::size_t>(u)])] == 1) continue;
      for (int v : adj_[static_cast<std::size_t>(u)]) {
        const Edge& e = edge(u, v);
        if (e.w > 0 && st_[static_cast<std::size_t>(u)] != st_[static_cast<std::size_t>(v)]) {
          if (Delta(e) == 0) {
            if (OnTightEdge(e)) return true;
          } else {
            UpdateSlack(u, st_[static_cast<std::size_t>(v)]);
          }
        }
      }
    }
    std::int64_t d = kInf;
    for (int b = n_ + 1; b <= n_x_; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      if (st_[ub] == b && s_[ub] == 1) d = std::min(d, lab_[ub] / 2);
    }
    for (int x = 1; x <= n_x_; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      if (st_[ux] == x && slack_[ux] != 0) {
        if (s_[ux] == -1) {
          d = std::min(d, Delta(edge(slack_[ux], x)));
        } else if (s_[ux] == 0) {
          d = std::min(d, Delta(edge(slack_[ux], x)) / 2);
        }
      }
    }
    // Outer vertices, free ones among them, drop by d; once the free ones
    // reach zero the matching is maximum and the duals certify it.
    bool done = false;
    for (int u = 1; u <= n_; ++u) {
      const auto uu = static_cast<std::size_t>(u);
      if (s_[static_cast<std::size_t>(st_[uu])] == 0 && lab_[uu] <= d) {
        d = lab_[uu];
        done = true;
      }
    }
    for (int u = 1; u <= n_; ++u) {
      const auto uu = static_cast<std::size_t>(u);
      const int label = s_[static_cast<std::size_t>(st_[uu])];
      if (label == 0) {
        lab_[uu] -= d;
      } else if (label == 1) {
        lab_[uu] += d;
      }
    }
    for (int b = n_ + 1; b <= n_x_; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      if (st_[ub] == b) {
        if (s_[ub] == 0) {
          lab_[ub] += 2 * d;
        } else if (s_[ub] == 1) {
          lab_[ub] -= 2 * d;
        }
      }
    }
    if (done) return false;
    q_ = {};
    for (int x = 1; x <= n_x_; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      if (st_[ux] == x && slack_[ux] != 0 && st_[static_cast<std::size_t>(slack_[ux])] != x &&
          Delta(edge(slack_[ux], x)) == 0) {
        if (OnTightEdge(edge(slack_[ux], x))) return true;
      }
    }
    for (int b = n_ + 1; b <= n_x_; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      if (st_[ub] == b && s_[ub] == 1 && lab_[ub] == 0) ExpandBlossom(b);
    }
  }
}

std::int64_t MaxWeightMatching::Solve() {
  n_x_ = n_;
  std::int64_t w_max = 0;
  for (int u = 0; u <= n_; ++u) {
    st_[static_cast<std::size_t>(u)] = u;
    flo_[static_cast<std::size_t>(u)].clear();
    match_[static_cast<std::size_t>(u)] = 0;
  }
  for (int u = 1; u <= n_; ++u) {
    auto& from = flo_from_[static_cast<std::size_t>(u)];
    from.assign(static_cast<std::size_t>(n_) + 1, 0);
    from[static_cast<std::size_t>(u)] = u;
    for (int v = 1; v <= n_; ++v) w_max = std::max(w_max, edge(u, v).w);
  }
  for (int u = 1; u <= n_; ++u) lab_[static_cast<std::size_t>(u)] = w_max;
  while (Phase()) {
  }
  std::int64_t total = 0;
  for (int u = 1; u <= n_; ++u) {
    const int m = match_[static_cast<std::size_t>(u)];
    if (m != 0 && m < u) total += edge(u, m).w;
  }
  return total;
}

}  // namespace depbound::internal
