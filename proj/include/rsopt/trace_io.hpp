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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rsopt/solver.hpp"

namespace rsopt {

/// Version of the line-delimited trace format. Bump on any change to the
/// meaning or layout of a record.
inline constexpr int kTraceSchemaVersion = 1;

/// A run together with the problem metadata needed to build data profiles.
struct TraceFile {
  std::string problem;
  Index d = 0;
  bool zero_residual = false;
  std::optional<double> f_star;  // known optimum, if the problem has one
  std::string solver;            // solver label within its experiment
  RunTrace trace;
};

nlohmann::json to_json(const SketchSpec& spec);
SketchSpec sketch_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolverConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
SolverConfig solver_config_from_json(const nlohmann::json& j,
                                     const SolverConfig& defaults = {});
nlohmann::json to_json(const IterationRecord& rec);
IterationRecord record_from_json(const nlohmann::json& j);

/// Trace layout: a header line, one line per iteration, then a summary line.
/// Every line is a JSON object with a "type" field. Doubles are written as
/// shortest round-trip decimals; non-finite values are written as null and
/// read back as NaN.
void write_trace(std::ostream& out, const TraceFile& file);
void write_trace(const std::filesystem::path& path, const TraceFile& file);
TraceFile read_trace(std::istream& in);
TraceFile read_trace(const std::filesystem::path& path);

/// Invariant checks on a single trace. Returns one message per violation.
///   monotone     f_after <= f_before and f_after == next f_before
///   lattice      alpha == alpha_max gamma1^m with integer m >= 0
///   acceptance   successful exactly when the decrease test holds
///   actions      non-decreasing; for fixed-l runs each step adds exactly l
std::vector<std::string> check_trace(const TraceFile& file);

}  // namespace rsopt
