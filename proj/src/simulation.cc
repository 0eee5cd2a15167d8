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

#include "depbound/simulation.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "depbound/inference.h"

namespace depbound {

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Unbiased draw from {0, ..., bound - 1}.
std::uint64_t UniformIndex(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t EdgeKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Circulant graph with every degree equal to d, then randomized by
// degree-preserving double-edge switches.
AdjacencyMatrix RandomRegular(int n, int d, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k <= d / 2; ++k) edges.emplace_back(i, (i + k) % n);
  }
  if (d % 2 == 1) {
    for (int i = 0; i < n / 2; ++i) edges.emplace_back(i, i + n / 2);
  }
  std::unordered_set<std::uint64_t> present;
  present.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) present.insert(EdgeKey(a, b));

  const std::size_t m = edges.size();
  if (m >= 2) {
    const std::size_t attempts = 20 * m;
    for (std::size_t t = 0; t < attempts; ++t) {
      const std::size_t i = UniformIndex(rng, m);
      const std::size_t j = UniformIndex(rng, m);
      if (i == j) continue;
      auto [a, b] = edges[i];
      auto [c, e] = edges[j];
      if (rng() & 1U) std::swap(c, e);
      // {a, b}, {c, e} -> {a, c}, {b, e}
      if (a == c || a == e || b == c || b == e) continue;
      const std::uint64_t k1 = EdgeKey(a, c);
      const std::uint64_t k2 = EdgeKey(b, e);
      if (present.contains(k1) || present.contains(k2)) continue;
      present.erase(EdgeKey(a, b));
      present.erase(EdgeKey(edges[j].first, edges[j].second));
      present.insert(k1);
      present.insert(k2);
      edges[i] = {a, c};
      edges[j] = {b, e};
    }
  }
  std::vector<VertexPair> pairs;
  pairs.reserve(m);
  for (const auto& [a, b] : edges) pairs.emplace_back(a, b);
  return AdjacencyMatrix(n, std::move(pairs));
}

// Each vertex gets d stubs; shuffled stubs pair up in order, and loops and
// repeated pairs are dropped.
AdjacencyMatrix RandomBounded(int n, int d, std::mt19937_64& rng) {
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) stubs.push_back(i);
  }
  for (std::size_t i = stubs.size(); i > 1; --i) {
    std::swap(stubs[i - 1], stubs[UniformIndex(rng, i)]);
  }
  std::vector<VertexPair> pairs;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    if (stubs[i] != stubs[i + 1]) pairs.emplace_back(stubs[i], stubs[i + 1]);
  }
  return AdjacencyMatrix(n, std::move(pairs));
}

// Runs body(r) for r in [0, count) on `threads` workers. Results must be
// written to per-replicate slots; the caller reduces them in order.
void ParallelFor(int count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      while (!failed.load()) {
        const int r = next.fetch_add(1);
        if (r >= count) return;
        try {
          body(r);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

void CheckModelSpec(const ModelSpec& spec) {
  if (spec.vertex_scale < 0.0 || spec.edge_scale < 0.0) {
    throw std::invalid_argument("model scales must be nonnegative");
  }
  if (spec.max_degree < 0) throw std::invalid_argument("max_degree must be nonnegative");
}

void CheckReplicates(int replicates) {
  if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
}

}  // namespace

std::uint64_t StreamSeed(std::uint64_t master, std::uint64_t stream, std::uint64_t replicate) {
  return SplitMix64(SplitMix64(SplitMix64(master) ^ stream) ^ replicate);
}

double UniformSymmetric(std::mt19937_64& rng) { return 2.0 * UniformUnit(rng) - 1.0; }

std::string_view ToString(GraphStyle style) {
  return style == GraphStyle::kRegular ? "regular" : "bounded_random";
}

std::optional<GraphStyle> ParseGraphStyle(std::string_view name) {
  if (name == "regular") return GraphStyle::kRegular;
  if (name == "bounded_random") return GraphStyle::kBoundedRandom;
  return std::nullopt;
}

AdjacencyMatrix GenerateGraph(int n, int max_degree, GraphStyle style, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
  if (max_degree < 0 || max_degree > n - 1) {
    throw std::invalid_argument("max_degree must lie in 0..n-1 (n=" + std::to_string(n) +
                                ", max_degree=" + std::to_string(max_degree) + ")");
  }
  if (style == GraphStyle::kRegular) {
    if ((static_cast<std::int64_t>(n) * max_degree) % 2 != 0) {
      throw std::invalid_argument("no " + std::to_string(max_degree) + "-regular graph on " +
                                  std::to_string(n) + " vertices: n * degree is odd");
    }
    return RandomRegular(n, max_degree, rng);
  }
  return RandomBounded(n, max_degree, rng);
}

AdjacencyMatrix GenerateGraph(int n, int max_degree, GraphStyle style, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return GenerateGraph(n, max_degree, style, rng);
}

AdjacencyMatrix EdgeFactorModel::SampledSubgraph() const {
  if (sample.empty()) return graph;
  return InducedSubgraph(graph, sample);
}

double TrueVariance(const EdgeFactorModel& model) {
  const std::vector<int> degree = model.graph.degrees();
  const int n = model.sample_size();
  const long double a2 = static_cast<long double>(model.vertex_scale) * model.vertex_scale;
  const long double b2 = static_cast<long double>(model.edge_scale) * model.edge_scale;
  long double total = 0.0L;
  for (int k = 0; k < n; ++k) {
    const int i = model.sample.empty() ? k : model.sample[static_cast<std::size_t>(k)];
    total += (a2 + b2 * degree[static_cast<std::size_t>(i)]) / 3.0L;
  }
  const auto sampled_edges = static_cast<long double>(model.SampledSubgraph().edge_count());
  total += 2.0L * (b2 / 3.0L) * sampled_edges;
  const long double nn = n;
  return static_cast<double>(total / (nn * nn));
}

ObservedData GenerateOutcomes(const EdgeFactorModel& model, double p_obs, std::mt19937_64& rng) {
  if (!(p_obs >= 0.0 && p_obs <= 1.0)) throw std::invalid_argument("p_obs must lie in [0, 1]");
  const int big_n = model.graph.n();
  std::vector<double> x(static_cast<std::size_t>(big_n));
  for (double& xi : x) xi = model.mu + model.vertex_scale * UniformSymmetric(rng);
  for (const VertexPair& e : model.graph.edges()) {
    const double u = model.edge_scale * UniformSymmetric(rng);
    x[static_cast<std::size_t>(e.first)] += u;
    x[static_cast<std::size_t>(e.second)] += u;
  }
  const std::vector<int> degree = model.graph.degrees();
  ObservedData data;
  const int n = model.sample_size();
  data.outcomes.reserve(static_cast<std::size_t>(n));
  data.degrees.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int i = model.sample.empty() ? k : model.sample[static_cast<std::size_t>(k)];
    data.outcomes.push_back(x[static_cast<std::size_t>(i)]);
    data.degrees.push_back(degree[static_cast<std::size_t>(i)]);
  }
  const AdjacencyMatrix sampled = model.SampledSubgraph();
  for (const VertexPair& e : sampled.edges()) {
    if (UniformUnit(rng) < p_obs) data.observed_edges.push_back(e);
  }
  return data;
}

ObservedData GenerateOutcomes(const EdgeFactorModel& model, double p_obs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return GenerateOutcomes(model, p_obs, rng);
}

EdgeFactorModel DrawModel(const ModelSpec& spec, int n, std::mt19937_64& rng) {
  CheckModelSpec(spec);
  EdgeFactorModel model;
  model.graph = GenerateGraph(n, spec.max_degree, spec.style, rng);
  model.mu = spec.mu;
  model.vertex_scale = spec.vertex_scale;
  model.edge_scale = spec.edge_scale;
  return model;
}

// ---------------------------------------------------------------------------
// Consistency

ConsistencyReport RunConsistencyStudy(const ConsistencyConfig& config) {
  CheckModelSpec(config.model);
  CheckReplicates(config.replicates);
  if (config.n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
  ConsistencyReport report;
  report.config = config;
  for (int n : config.n_grid) {
    std::vector<double> truth(static_cast<std::size_t>(config.replicates));
    std::vector<double> estimate(truth.size());
    ParallelFor(config.replicates, config.threads, [&](int r) {
      std::mt19937_64 rng(StreamSeed(config.seed, static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(r)));
      const EdgeFactorModel model = DrawModel(config.model, n, rng);
      const ObservedData data = GenerateOutcomes(model, 0.0, rng);
      truth[static_cast<std::size_t>(r)] = n * TrueVariance(model);
      estimate[static_cast<std::size_t>(r)] = n * V1(model.SampledSubgraph(), data).value;
    });
    ConsistencyRow row;
    row.n = n;
    row.replicates = config.replicates;
    long double st = 0.0L, se = 0.0L, sd = 0.0L, sq = 0.0L;
    for (std::size_t r = 0; r < truth.size(); ++r) {
      const long double diff = static_cast<long double>(estimate[r]) - truth[r];
      st += truth[r];
      se += estimate[r];
      sd += diff;
      sq += diff * diff;
    }
    const auto count = static_cast<long double>(truth.size());
    row.mean_truth = static_cast<double>(st / count);
    row.mean_estimate = static_cast<double>(se / count);
    row.bias = static_cast<double>(sd / count);
    row.rmse = static_cast<double>(std::sqrt(sq / count));
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Coverage

namespace {

struct ReplicateOutcome {
  double truth = 0.0;  // var(mean)
  double mean = 0.0;
  // naive, v1, v2, v2_prime, v1 at truth, v2 at truth
  std::array<double, 6> value{};
  bool flagged = false;
  bool ordering_ok = true;
  bool fast_path = false;
};

constexpr std::array<const char*, 6> kEstimatorNames = {"naive",   "v1",         "v2",
                                                        "v2_prime", "v1_oracle", "v2_oracle"};
constexpr std::size_t kWithInterval = 4;

}  // namespace

CoverageReport RunCoverageStudy(const CoverageConfig& config) {
  CheckModelSpec(config.model);
  CheckReplicates(config.replicates);
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(config.replicates));
  SolverConfig solver = config.solver;
  solver.threads = 1;

  ParallelFor(config.replicates, config.threads, [&](int r) {
    std::mt19937_64 rng(StreamSeed(config.seed, 0, static_cast<std::uint64_t>(r)));
    const EdgeFactorModel model = DrawModel(config.model, config.n, rng);
    const ObservedData data = GenerateOutcomes(model, config.p_obs, rng);
    const AdjacencyMatrix truth_matrix = model.SampledSubgraph();
    ReplicateOutcome& out = outcomes[static_cast<std::size_t>(r)];
    out.truth = TrueVariance(model);
    out.mean = SampleMean(data.outcomes);

    const SolverResult v1_max = Solve(BuildV1Instance(data), solver);
    out.flagged = v1_max.status != SolverStatus::kOptimal;
    AdjacencyMatrix v2_matrix;
    if (std::optional<AdjacencyMatrix> built = MaxV2FastPath(data)) {
      v2_matrix = std::move(*built);
      out.fast_path = true;
    } else {
      SolverResult v2_max = Solve(BuildV2Instance(data), solver);
      out.flagged = out.flagged || v2_max.status != SolverStatus::kOptimal;
      v2_matrix = std::move(v2_max.best_matrix);
    }
    out.value[0] = NaiveVariance(data).value;
    out.value[1] = V1(v1_max.best_matrix, data).value;
    out.value[2] = V2(v2_matrix, data).value;
    out.value[3] = V2Prime(data).value;
    out.value[4] = V1(truth_matrix, data).value;
    out.value[5] = V2(truth_matrix, data).value;
    out.ordering_ok =
        out.value[1] >= out.value[4] && out.value[5] <= out.value[2] && out.value[2] <= out.value[3];
  });

  CoverageReport report;
  report.config = config;
  const int n = config.n;
  long double truth_sum = 0.0L;
  for (const ReplicateOutcome& o : outcomes) truth_sum += static_cast<long double>(n) * o.truth;
  report.truth_n_variance = static_cast<double>(truth_sum / outcomes.size());
  for (std::size_t k = 0; k < kEstimatorNames.size(); ++k) {
    EstimatorSummary s;
    s.name = kEstimatorNames[k];
    long double est = 0.0L, width = 0.0L;
    int covered = 0, under = 0;
    for (const ReplicateOutcome& o : outcomes) {
      const double v = o.value[k];
      est += static_cast<long double>(n) * v;
      if (v < o.truth) ++under;
      if (k < kWithInterval) {
        // A negative estimate admits no interval and counts as a miss.
        if (v >= 0.0) {
          const ConfidenceInterval ci = WaldInterval(o.mean, v, config.alpha, s.name);
          if (ci.Contains(config.model.mu)) ++covered;
          width += ci.width();
        }
      }
    }
    const auto count = static_cast<long double>(outcomes.size());
    s.replicates = static_cast<int>(outcomes.size());
    s.mean_n_estimate = static_cast<double>(est / count);
    s.under_rate = under / static_cast<double>(outcomes.size());
    if (k < kWithInterval) {
      s.coverage = covered / static_cast<double>(outcomes.size());
      s.mean_width = static_cast<double>(width / count);
    } else {
      s.coverage = std::numeric_limits<double>::quiet_NaN();
      s.mean_width = std::numeric_limits<double>::quiet_NaN();
    }
    report.estimators.push_back(std::move(s));
  }
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].flagged) report.flagged.push_back(static_cast<int>(r));
    if (!outcomes[r].ordering_ok) report.ordering_violations.push_back(static_cast<int>(r));
    if (outcomes[r].fast_path) ++report.fast_path_hits;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Normality

double KsStatistic(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("KS test needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const auto size = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = NormalCdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / size - f, f - static_cast<double>(i) / size});
  }
  return d;
}

double KsPValue(double statistic, std::size_t size) {
  const double root = std::sqrt(static_cast<double>(size));
  const double lambda = (root + 0.12 + 0.11 / root) * statistic;
  // The alternating series converges too slowly near zero, where the
  // p-value is 1 to double precision anyway.
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

NormalityReport RunNormalityStudy(const NormalityConfig& config) {
  CheckModelSpec(config.model);
  CheckReplicates(config.replicates);
  std::vector<double> z(static_cast<std::size_t>(config.replicates));
  ParallelFor(config.replicates, config.threads, [&](int r) {
    std::mt19937_64 rng(StreamSeed(config.seed, 1, static_cast<std::uint64_t>(r)));
    const EdgeFactorModel model = DrawModel(config.model, config.n, rng);
    const ObservedData data = GenerateOutcomes(model, 0.0, rng);
    const double sd = std::sqrt(TrueVariance(model));
    z[static_cast<std::size_t>(r)] = (SampleMean(data.outcomes) - model.mu) / sd;
  });
  NormalityReport report;
  report.config = config;
  long double s = 0.0L, sq = 0.0L;
  for (double v : z) {
    s += v;
    sq += static_cast<long double>(v) * v;
  }
  const auto count = static_cast<long double>(z.size());
  report.mean_z = static_cast<double>(s / count);
  report.sd_z = static_cast<double>(std::sqrt(std::max(0.0L, sq / count - (s / count) * (s / count))));
  report.ks_statistic = KsStatistic(z);
  report.p_value = KsPValue(report.ks_statistic, z.size());
  return report;
}

}  // namespace depbound
