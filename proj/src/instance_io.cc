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

#include <iomanip>
#include <limits>
#include <sstream>

#include "depbound/solver.h"

namespace depbound {

namespace {

void Expect(std::istream& in, const std::string& keyword) {
  std::string word;
  if (!(in >> word) || word != keyword) {
    throw DataError("instance: expected '" + keyword + "', found '" + word + "'");
  }
}

template <typename T>
T Read(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw DataError(std::string("instance: cannot read ") + what);
  return value;
}

int ReadVertex(std::istream& in, int n) {
  const int v = Read<int>(in, "vertex index");
  if (v < 1 || v > n) throw DataError("instance: vertex " + std::to_string(v) + " out of range");
  return v - 1;
}

}  // namespace

void WriteInstance(std::ostream& out, const ProblemInstance& instance) {
  const int n = instance.n();
  std::ostringstream body;
  body << std::setprecision(std::numeric_limits<double>::max_digits10);
  body << "n " << n << "\ncaps";
  for (std::int64_t c : instance.degree_caps()) body << ' ' << c;
  body << "\nforced " << instance.forced_edges().size() << '\n';
  for (const VertexPair& e : instance.forced_edges()) {
    body << e.first + 1 << ' ' << e.second + 1 << '\n';
  }
  std::size_t nonzero = 0;
  for (double w : instance.pair_weights()) nonzero += (w != 0.0);
  body << "weights " << nonzero << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = instance.weight(i, j);
      if (w != 0.0) body << i + 1 << ' ' << j + 1 << ' ' << w << '\n';
    }
  }
  out << body.str();
}

ProblemInstance ReadInstance(std::istream& in, ProblemInstance::Check check) {
  Expect(in, "n");
  const int n = Read<int>(in, "n");
  if (n < 1) throw DataError("instance: n must be positive");
  Expect(in, "caps");
  std::vector<std::int64_t> caps(static_cast<std::size_t>(n));
  for (auto& c : caps) c = Read<std::int64_t>(in, "cap");
  Expect(in, "forced");
  const auto forced_count = Read<std::size_t>(in, "forced count");
  std::vector<VertexPair> forced;
  for (std::size_t k = 0; k < forced_count; ++k) {
    const int a = ReadVertex(in, n);
    const int b = ReadVertex(in, n);
    forced.emplace_back(a, b);
  }
  Expect(in, "weights");
  const auto weight_count = Read<std::size_t>(in, "weight count");
  std::vector<double> weights(PairCount(n), 0.0);
  for (std::size_t k = 0; k < weight_count; ++k) {
    const int a = ReadVertex(in, n);
    const int b = ReadVertex(in, n);
    if (a == b) throw DataError("instance: weight on a self pair");
    const auto w = Read<double>(in, "weight");
    weights[PairIndex(n, std::min(a, b), std::max(a, b))] = w;
  }
  return ProblemInstance(n, std::move(weights), std::move(caps), std::move(forced), check);
}

}  // namespace depbound
