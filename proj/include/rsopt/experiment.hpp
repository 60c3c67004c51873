// Copyright 2026 The rsopt Authors.
//
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


#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rsopt/solver.hpp"
#include "rsopt/trace_io.hpp"

namespace rsopt {

inline constexpr int kIndexSchemaVersion = 1;

struct ProblemRef {
  std::string name;
  Index d = 0;
};

/// One solver of an experiment. The sketch row count is either fixed
/// (config.sketch.l) or a fraction of each problem's dimension.
struct SolverSpec {
  std::string label;
  SolverConfig config;
  std::optional<double> l_fraction;

  bool randomized() const { return config.sketch.kind != SketchKind::Identity; }
  /// Configuration for a problem of dimension d: l resolved, budget set.
  SolverConfig resolve(Index d, double budget_multiplier) const;
};

/// A batch of runs over problems x solvers x seeds.
///
/// JSON schema (all keys optional except problems and a solver source):
///   problems           "all" | "zero_residual" | [name | {"name", "d"}]
///   dimension          default d for problems given by name (100)
///   solver_defaults    solver config object applied before each solver
///   solvers            [{"label", "sketch", "l" | "l_fraction", "s",
///                        "variant", "tr_step", "adaptive", "options"}]
///   grid               {"variants", "sketches", "l_fractions", "s"}
///   full_gn            add the identity-sketch baseline (bool)
///   seeds              count (seeds 0..n-1) or explicit list
///   tau                solve accuracy for profiles, in (0, 1)
///   budget_multiplier  action budget per run in units of d (50)
///   output             output directory
///   workers            worker threads, 0 for hardware concurrency
struct ExperimentConfig {
  std::vector<ProblemRef> problems;
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds;
  double tau = 0.1;
  double budget_multiplier = 50.0;
  std::filesystem::path output = "rsopt-out";
  unsigned workers = 0;

  /// Throws std::invalid_argument on an empty grid, unknown problem names,
  /// inadmissible dimensions, bad tau or an invalid solver configuration.
  void validate() const;
};

ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Expanded (problem, solver, seed) triple. Deterministic solvers get a
/// single run with the first seed.
struct RunSpec {
  std::size_t problem = 0;
  std::size_t solver = 0;
  std::uint64_t seed = 0;
};

std::vector<RunSpec> expand_runs(const ExperimentConfig& config);

/// Generator seed of a run. It depends on the problem and the user seed
/// but not on the solver, so solvers face common random numbers.
std::uint64_t run_seed(const ProblemRef& problem, std::uint64_t seed);

std::string trace_file_name(const ExperimentConfig& config, const RunSpec& run);

/// Executes one run in memory.
TraceFile execute_run(const ExperimentConfig& config, const RunSpec& run);

struct IndexEntry {
  std::string file;  // relative to the run-set directory
  std::string problem;
  Index d = 0;
  std::string solver;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  double wall_seconds = 0.0;
};

struct RunSet {
  std::filesystem::path dir;
  std::vector<IndexEntry> entries;
  std::vector<TraceFile> traces;  // successful runs, in index order
  std::vector<std::string> missing;

  std::size_t failures() const;
};

/// Runs every (problem, solver, seed) on a bounded worker pool, writes one
/// trace per run under output/traces and then output/index.json. Trace
/// files contain no timing, so reruns produce identical bytes.
RunSet run_experiment(const ExperimentConfig& config,
                      const std::function<void(const IndexEntry&)>& on_done = nullptr);

/// Reads index.json and every trace it lists. Unreadable traces are listed
/// in `missing` rather than aborting the load.
RunSet load_run_set(const std::filesystem::path& dir);

}  // namespace rsopt
