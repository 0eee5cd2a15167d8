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

// depbound: conservative variance estimates and confidence intervals for
// means of dependent data with a partially observed dependency graph.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "depbound/core.h"
#include "depbound/estimators.h"
#include "depbound/inference.h"
#include "depbound/io.h"
#include "depbound/simulation.h"
#include "depbound/solver.h"
#include "depbound/study_io.h"

namespace {

using namespace depbound;
using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kSuccess = 0,
  kDataError = 2,
  kInfeasible = 3,
  kSolverLimit = 4,
  kInternal = 5,
  kCheckFailed = 1,
};

// Raised for bad flag combinations detected after parsing.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int DefaultThreads() {
  if (const char* env = std::getenv("DEPBOUND_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid DEPBOUND_THREADS=" << env << "\n";
  }
  return 1;
}

std::string Sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed for " + path);
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

std::string Sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Options shared by every data-reading subcommand.
struct DataOptions {
  std::string outcomes;
  std::string edges;
  std::optional<std::int64_t> global_degree_bound;
};

void AddDataOptions(CLI::App* cmd, DataOptions& opts) {
  cmd->add_option("outcomes", opts.outcomes, "Outcomes file with header id,x,d")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("edges", opts.edges, "Observed edges file with header id_i,id_j")
      ->check(CLI::ExistingFile);
  cmd->add_option("--global-degree-bound", opts.global_degree_bound,
                  "Replace every reported degree with this bound")
      ->check(CLI::NonNegativeNumber);
}

struct Input {
  ObservedData data;
  Json provenance;
};

// Loads, announces warnings and refuses incompatible data.
Input LoadInput(const DataOptions& opts) {
  const std::optional<std::string> edges =
      opts.edges.empty() ? std::nullopt : std::optional<std::string>(opts.edges);
  LoadedData loaded = LoadObservedData(opts.outcomes, edges);
  Input input;
  input.provenance["outcomes"] = {{"path", opts.outcomes}, {"sha256", Sha256(opts.outcomes)}};
  input.provenance["edges"] =
      edges ? Json{{"path", *edges}, {"sha256", Sha256(*edges)}} : Json(nullptr);
  input.provenance["degrees_present"] = loaded.degrees_present;
  for (const std::string& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  if (!loaded.degrees_present && !opts.global_degree_bound) {
    std::cerr << "WARNING: degrees are missing, so every estimate is maximally conservative. "
                 "Pass --global-degree-bound if a smaller bound on the degrees is known.\n";
  }
  if (opts.global_degree_bound) {
    loaded.data = WithGlobalDegreeBound(std::move(loaded.data), *opts.global_degree_bound);
    input.provenance["global_degree_bound"] = *opts.global_degree_bound;
  } else {
    input.provenance["global_degree_bound"] = nullptr;
  }
  const CompatibilityReport report = Validate(loaded.data);
  if (!report.compatible) throw InfeasibleInstanceError(report.Summary());
  input.data = std::move(loaded.data);
  return input;
}

struct SolverOptions {
  double gap = 1e-9;
  std::optional<double> time_limit;
  int threads = DefaultThreads();
};

void AddSolverOptions(CLI::App* cmd, SolverOptions& opts) {
  cmd->add_option("--gap", opts.gap, "Absolute optimality gap tolerance")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--time-limit", opts.time_limit, "Solver time limit in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", opts.threads,
                  "Worker threads (default: DEPBOUND_THREADS or 1)")
      ->check(CLI::PositiveNumber);
}

SolverConfig ToSolverConfig(const SolverOptions& opts) {
  SolverConfig config;
  config.gap_tolerance = opts.gap;
  config.time_limit_seconds = opts.time_limit;
  config.threads = opts.threads;
  return config;
}

Json SolverJson(const SolverOptions& opts) {
  return {{"gap", opts.gap},
          {"time_limit", opts.time_limit ? Json(*opts.time_limit) : Json(nullptr)},
          {"threads", opts.threads}};
}

Json EdgesJson(const AdjacencyMatrix& a, const ObservedData& data) {
  Json edges = Json::array();
  for (const VertexPair& e : a.edges()) edges.push_back({data.label(e.first), data.label(e.second)});
  return edges;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
  DataOptions data;
  SolverOptions solver;
  double alpha = 0.05;
  std::vector<std::string> estimators;
  bool homoskedastic = false;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

struct EstimateRow {
  std::string name;
  double variance = 0.0;
  std::optional<ConfidenceInterval> ci;
  std::string status = "closed_form";
  std::optional<SolverResult> solve;
  bool fast_path = false;
  double seconds = 0.0;
  // Upper bound on the maximal estimate when the solve stopped early.
  std::optional<double> variance_bound;
};

std::vector<EstimatorKind> SelectEstimators(const EstimateOptions& opts) {
  std::vector<bool> wanted(4, false);
  wanted[static_cast<int>(EstimatorKind::kNaive)] = true;
  if (opts.estimators.empty()) {
    wanted[static_cast<int>(EstimatorKind::kV1)] = true;
    if (opts.homoskedastic) {
      wanted[static_cast<int>(EstimatorKind::kV2)] = true;
      wanted[static_cast<int>(EstimatorKind::kV2Prime)] = true;
    }
  }
  for (const std::string& name : opts.estimators) {
    const std::optional<EstimatorKind> kind = ParseEstimatorKind(name);
    if (!kind) throw UsageError("unknown estimator '" + name + "' (naive, v1, v2, v2_prime)");
    if ((*kind == EstimatorKind::kV2 || *kind == EstimatorKind::kV2Prime) && !opts.homoskedastic) {
      throw UsageError("estimator " + name + " requires --assume-homoskedastic");
    }
    wanted[static_cast<int>(*kind)] = true;
  }
  std::vector<EstimatorKind> out;
  for (EstimatorKind k : {EstimatorKind::kNaive, EstimatorKind::kV1, EstimatorKind::kV2,
                          EstimatorKind::kV2Prime}) {
    if (wanted[static_cast<int>(k)]) out.push_back(k);
  }
  return out;
}

int RunEstimate(const EstimateOptions& opts) {
  const std::vector<EstimatorKind> kinds = SelectEstimators(opts);
  const Input input = LoadInput(opts.data);
  const ObservedData& data = input.data;
  const SolverConfig solver = ToSolverConfig(opts.solver);
  const double mean = SampleMean(data.outcomes);
  const auto n2 = static_cast<double>(data.n()) * data.n();

  std::vector<EstimateRow> rows;
  bool limited = false;
  for (EstimatorKind kind : kinds) {
    EstimateRow row;
    row.name = std::string(ToString(kind));
    const auto start = std::chrono::steady_clock::now();
    switch (kind) {
      case EstimatorKind::kNaive: row.variance = NaiveVariance(data).value; break;
      case EstimatorKind::kV2Prime: row.variance = V2Prime(data).value; break;
      case EstimatorKind::kV1: {
        SolverResult r = Solve(BuildV1Instance(data), solver);
        row.variance = V1(r.best_matrix, data).value;
        row.solve = std::move(r);
        break;
      }
      case EstimatorKind::kV2: {
        if (std::optional<AdjacencyMatrix> a = MaxV2FastPath(data)) {
          row.fast_path = true;
          row.variance = V2(*a, data).value;
          SolverResult r;
          r.best_matrix = std::move(*a);
          r.objective = static_cast<double>(r.best_matrix.edge_count());
          r.upper_bound = r.objective;
          row.solve = std::move(r);
        } else {
          SolverResult r = Solve(BuildV2Instance(data), solver);
          row.variance = V2(r.best_matrix, data).value;
          row.solve = std::move(r);
        }
        break;
      }
    }
    row.seconds = Seconds(start);
    if (row.solve) {
      row.status = std::string(ToString(row.solve->status));
      if (row.solve->status != SolverStatus::kOptimal) {
        limited = true;
        const double slack = row.solve->upper_bound - row.solve->objective;
        if (kind == EstimatorKind::kV1) {
          row.variance_bound = row.variance + 2.0 * slack / n2;
        } else {
          row.variance_bound = row.variance * (1.0 + 2.0 * slack / (data.n() + 2.0 * row.solve->objective));
        }
      }
    }
    if (row.variance >= 0.0) row.ci = WaldInterval(mean, row.variance, opts.alpha, row.name);
    rows.push_back(std::move(row));
  }

  if (opts.json) {
    Json out;
    out["command"] = "estimate";
    out["inputs"] = input.provenance;
    out["config"] = {{"alpha", opts.alpha},
                     {"assume_homoskedastic", opts.homoskedastic},
                     {"solver", SolverJson(opts.solver)},
                     {"seed", opts.seed ? Json(*opts.seed) : Json(nullptr)}};
    out["n"] = data.n();
    out["mean"] = mean;
    Json estimates = Json::array();
    for (const EstimateRow& row : rows) {
      Json e;
      e["estimator"] = row.name;
      e["variance"] = row.variance;
      e["se"] = row.ci ? Json(std::sqrt(row.variance)) : Json(nullptr);
      e["ci_lower"] = row.ci ? Json(row.ci->lower) : Json(nullptr);
      e["ci_upper"] = row.ci ? Json(row.ci->upper) : Json(nullptr);
      e["status"] = row.status;
      if (row.solve) {
        e["objective"] = row.solve->objective;
        e["upper_bound"] = row.solve->upper_bound;
        e["gap"] = row.solve->gap;
        e["fast_path"] = row.fast_path;
        e["variance_upper_bound"] = row.variance_bound ? Json(*row.variance_bound) : Json(row.variance);
        e["matrix_edges"] = EdgesJson(row.solve->best_matrix, data);
      } else {
        e["gap"] = 0.0;
      }
      e["wall_seconds"] = row.seconds;
      estimates.push_back(std::move(e));
    }
    out["estimates"] = estimates;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "outcomes  " << opts.data.outcomes << "  sha256:"
              << input.provenance["outcomes"]["sha256"].get<std::string>() << "\n";
    if (opts.data.edges.empty()) {
      std::cout << "edges     (none)\n";
    } else {
      std::cout << "edges     " << opts.data.edges << "  sha256:"
                << input.provenance["edges"]["sha256"].get<std::string>() << "\n";
    }
    std::cout << "n " << data.n() << "  mean " << Sig(mean) << "  alpha " << Sig(opts.alpha)
              << "  gap " << Sig(opts.solver.gap) << "  time limit "
              << (opts.solver.time_limit ? Sig(*opts.solver.time_limit) + " s" : "none");
    if (opts.data.global_degree_bound) std::cout << "  global degree bound " << *opts.data.global_degree_bound;
    std::cout << "\n\n";
    std::printf("%-9s %-12s %-12s %-12s %-12s %-12s %-12s %s\n", "estimator", "variance", "se",
                "ci_lower", "ci_upper", "status", "gap", "seconds");
    for (const EstimateRow& row : rows) {
      std::printf("%-9s %-12s %-12s %-12s %-12s %-12s %-12s %.3g\n", row.name.c_str(),
                  Sig(row.variance).c_str(),
                  row.ci ? Sig(std::sqrt(row.variance)).c_str() : "n/a",
                  row.ci ? Sig(row.ci->lower).c_str() : "n/a",
                  row.ci ? Sig(row.ci->upper).c_str() : "n/a", row.status.c_str(),
                  Sig(row.solve ? row.solve->gap : 0.0).c_str(), row.seconds);
    }
    std::fflush(stdout);
    for (const EstimateRow& row : rows) {
      if (!row.ci) {
        std::cout << "note: " << row.name << " is negative; no interval can be formed\n";
      }
      if (row.variance_bound) {
        std::cout << "note: " << row.name << " stopped with status " << row.status
                  << "; the maximal estimate lies in [" << Sig(row.variance) << ", "
                  << Sig(*row.variance_bound) << "]\n";
      }
    }
  }
  return limited ? kSolverLimit : kSuccess;
}

// ---------------------------------------------------------------------------
// solve and brute-force

struct SolveOptions {
  DataOptions data;
  SolverOptions solver;
  std::string objective = "v1";
  std::string edges_out;
  bool json = false;
  std::size_t max_free = kDefaultBruteForceCap;
};

int ReportSolve(const SolveOptions& opts, const ObservedData& data, const SolverResult& r,
                const Json& provenance, const char* command, double seconds) {
  if (!opts.edges_out.empty()) {
    std::ofstream out(opts.edges_out);
    if (!out) throw DataError("cannot write " + opts.edges_out);
    out << "id_i,id_j\n";
    for (const VertexPair& e : r.best_matrix.edges()) {
      out << data.label(e.first) << "," << data.label(e.second) << "\n";
    }
  }
  if (opts.json) {
    Json out;
    out["command"] = command;
    out["inputs"] = provenance;
    out["objective_kind"] = opts.objective;
    out["status"] = ToString(r.status);
    out["objective"] = r.objective;
    out["upper_bound"] = r.upper_bound;
    out["gap"] = r.gap;
    out["nodes"] = r.stats.nodes;
    out["wall_seconds"] = seconds;
    out["edges"] = EdgesJson(r.best_matrix, data);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "status " << ToString(r.status) << "\n"
              << "objective " << Sig(r.objective) << "\n"
              << "upper_bound " << Sig(r.upper_bound) << "\n"
              << "gap " << Sig(r.gap) << "\n"
              << "edges " << r.best_matrix.edge_count() << "\n";
    for (const VertexPair& e : r.best_matrix.edges()) {
      std::cout << data.label(e.first) << "," << data.label(e.second) << "\n";
    }
  }
  return r.status == SolverStatus::kOptimal ? kSuccess : kSolverLimit;
}

ProblemInstance BuildFor(const std::string& objective, const ObservedData& data) {
  return objective == "v1" ? BuildV1Instance(data) : BuildV2Instance(data);
}

int RunSolve(const SolveOptions& opts) {
  const Input input = LoadInput(opts.data);
  const auto start = std::chrono::steady_clock::now();
  const SolverResult r = Solve(BuildFor(opts.objective, input.data), ToSolverConfig(opts.solver));
  return ReportSolve(opts, input.data, r, input.provenance, "solve", Seconds(start));
}

int RunBruteForce(const SolveOptions& opts) {
  const Input input = LoadInput(opts.data);
  const auto start = std::chrono::steady_clock::now();
  const SolverResult r = BruteForce(BuildFor(opts.objective, input.data), opts.max_free);
  return ReportSolve(opts, input.data, r, input.provenance, "brute-force", Seconds(start));
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = DefaultThreads();
  std::string output;
  bool check = false;
};

int RunSimulate(const SimulateOptions& opts) {
  StudyConfig config = LoadStudyConfig(opts.config);
  if (opts.seed) config.seed = *opts.seed;
  const StudyResult result = RunStudy(config, opts.threads);
  const std::string text = result.report.dump(2) + "\n";
  if (opts.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opts.output, std::ios::binary);
    if (!out || !(out << text)) throw DataError("cannot write " + opts.output);
  }
  for (const StudyCheck& c : result.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  if (opts.check && !result.passed()) return kCheckFailed;
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservative variance estimation for means of dependent data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "depbound 1.0.0");

  EstimateOptions estimate;
  CLI::App* est = app.add_subcommand("estimate", "Variance estimates and Wald intervals for the mean");
  AddDataOptions(est, estimate.data);
  AddSolverOptions(est, estimate.solver);
  est->add_option("--alpha", estimate.alpha, "One minus the interval's nominal coverage")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  est->add_option("--estimators", estimate.estimators,
                  "Comma-separated subset of naive,v1,v2,v2_prime (naive is always reported)")
      ->delimiter(',');
  est->add_flag("--assume-homoskedastic", estimate.homoskedastic,
                "Assume equal outcome variances; enables v2 and v2_prime");
  est->add_option("--seed", estimate.seed, "Recorded in the report; the solver is deterministic");
  est->add_flag("--json", estimate.json, "Emit a full-precision JSON report");

  SolveOptions solve;
  CLI::App* sol = app.add_subcommand("solve", "Compatible matrix maximizing an estimator");
  AddDataOptions(sol, solve.data);
  AddSolverOptions(sol, solve.solver);
  sol->add_option("--objective", solve.objective, "v1 or v2")->capture_default_str()
      ->check(CLI::IsMember({"v1", "v2"}));
  sol->add_option("--edges-out", solve.edges_out, "Also write the maximizing edges as id_i,id_j");
  sol->add_flag("--json", solve.json, "Emit JSON");

  SolveOptions brute;
  CLI::App* bf = app.add_subcommand("brute-force", "Exact optimum by enumeration (small n only)");
  AddDataOptions(bf, brute.data);
  bf->add_option("--objective", brute.objective, "v1 or v2")->capture_default_str()
      ->check(CLI::IsMember({"v1", "v2"}));
  bf->add_option("--max-free", brute.max_free,
                 "Largest number of free pairs to enumerate (28 allows n = 8)")
      ->capture_default_str();
  bf->add_option("--edges-out", brute.edges_out, "Also write the maximizing edges as id_i,id_j");
  bf->add_flag("--json", brute.json, "Emit JSON");

  SimulateOptions simulate;
  CLI::App* sim = app.add_subcommand("simulate", "Run a Monte Carlo study from a JSON config");
  sim->add_option("config", simulate.config, "Study config file")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--seed", simulate.seed, "Override the config's master seed");
  sim->add_option("--threads", simulate.threads, "Worker threads (default: DEPBOUND_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sim->add_option("-o,--output", simulate.output, "Write the report here instead of stdout");
  sim->add_flag("--check", simulate.check, "Exit nonzero when a study check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDataError;
  }

  try {
    if (est->parsed()) return RunEstimate(estimate);
    if (sol->parsed()) return RunSolve(solve);
    if (bf->parsed()) return RunBruteForce(brute);
    if (sim->parsed()) return RunSimulate(simulate);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const InfeasibleInstanceError& e) {
    std::cerr << "error: inconsistent data: " << e.what() << "\n";
    return kInfeasible;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const InstanceTooLargeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverLimit;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
