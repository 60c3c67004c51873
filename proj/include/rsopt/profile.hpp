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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rsopt/trace_io.hpp"

namespace rsopt {

/// Reference optimum for each (problem, d) in a batch: 0 for zero-residual
/// problems, otherwise the lowest objective value any run reached.
std::map<std::pair<std::string, Index>, double> resolve_f_stars(
    const std::vector<TraceFile>& traces);

/// Actions spent when the run first satisfies f <= f* + tau (f0 - f*),
/// ignoring iterations that finished past the action budget. Nullopt when
/// the run never gets there.
std::optional<long long> actions_to_solve(const TraceFile& trace, double f_star, double tau);

/// Data profile of one solver: pi(alpha) is the fraction of its runs with
/// N_p / d <= alpha.
struct DataProfile {
  std::string solver;
  double tau = 0.0;
  double max_alpha = 50.0;
  std::vector<double> ratios;  // N_p / d per run; +inf when unsolved
  /// Step function as (alpha, pi) pairs, right-continuous, starting at
  /// alpha = 0 and ending at max_alpha.
  std::vector<std::pair<double, double>> breakpoints;

  double at(double alpha) const;
  std::size_t solved() const;
};

/// Profiles for every solver in the batch, in order of first appearance.
std::vector<DataProfile> compute_profiles(const std::vector<TraceFile>& traces, double tau,
                                          double max_alpha = 50.0);

/// Monotonicity, range and endpoint checks.
std::vector<std::string> check_profile(const DataProfile& profile);

enum class PlotFormat { Dat, Csv };
PlotFormat parse_plot_format(std::string_view name);

/// Writes one (alpha, pi) file per profile plus plot_profiles.py, a
/// matplotlib script that draws all of them. Writes nothing for an empty
/// profile set. Returns the paths written.
std::vector<std::filesystem::path> emit_plot_data(const std::vector<DataProfile>& profiles,
                                                  const std::filesystem::path& dir,
                                                  PlotFormat format = PlotFormat::Dat);

/// Parses a file written by emit_plot_data back into breakpoints.
std::vector<std::pair<double, double>> read_plot_data(const std::filesystem::path& path);

}  // namespace rsopt
