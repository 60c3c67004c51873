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


#include "rsopt/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsopt {
namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string file_stem(const std::string& label) {
  std::string out = "profile_";
  for (char ch : label) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    out.push_back(keep ? ch : '_');
  }
  return out;
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Draws every data profile in this directory as a step plot."""
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    label, rows = os.path.basename(path), []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# solver:"):
                label = line.split(":", 1)[1].strip()
            elif line and not line.startswith("#") and not line.startswith("alpha"):
                a, p = line.replace(",", " ").split()
                rows.append((float(a), float(p)))
    return label, rows


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    files = sorted(glob.glob(os.path.join(here, "profile_*.dat")) +
                   glob.glob(os.path.join(here, "profile_*.csv")))
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in files:
        label, rows = load(path)
        ax.step([r[0] for r in rows], [r[1] for r in rows], where="post", label=label)
    ax.set_xlabel("budget in units of d (Jacobian actions / d)")
    ax.set_ylabel("fraction of runs solved")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize="small")
    fig.tight_layout()
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "profiles.png")
    fig.savefig(out, dpi=150)


if __name__ == "__main__":
    main()
)PY";

}  // namespace

std::map<std::pair<std::string, Index>, double> resolve_f_stars(
    const std::vector<TraceFile>& traces) {
  std::map<std::pair<std::string, Index>, double> out;
  for (const TraceFile& t : traces) {
    const auto key = std::make_pair(t.problem, t.d);
    if (t.zero_residual) {
      out[key] = 0.0;
      continue;
    }
    double best = std::min(t.trace.f0, t.trace.f_final);
    for (const IterationRecord& r : t.trace.records) best = std::min(best, r.f_after);
    const auto it = out.find(key);
    out[key] = it == out.end() ? best : std::min(it->second, best);
  }
  return out;
}

std::optional<long long> actions_to_solve(const TraceFile& trace, double f_star, double tau) {
  const RunTrace& t = trace.trace;
  const double target = f_star + tau * (t.f0 - f_star);
  if (t.f0 <= target) return 0;
  const long long budget = t.config.budget_for(trace.d);
  for (const IterationRecord& r : t.records) {
    if (r.actions_used > budget) break;
    if (r.f_after <= target) return r.actions_used;
  }
  return std::nullopt;
}

double DataProfile::at(double alpha) const {
  if (ratios.empty()) return 0.0;
  const auto hit = std::count_if(ratios.begin(), ratios.end(),
                                 [alpha](double r) { return r <= alpha; });
  return static_cast<double>(hit) / static_cast<double>(ratios.size());
}

std::size_t DataProfile::solved() const {
  return static_cast<std::size_t>(std::count_if(
      ratios.begin(), ratios.end(), [this](double r) { return r <= max_alpha; }));
}

std::vector<DataProfile> compute_profiles(const std::vector<TraceFile>& traces, double tau,
                                          double max_alpha) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  if (!(max_alpha > 0.0)) throw std::invalid_argument("max_alpha must be positive");
  const auto f_stars = resolve_f_stars(traces);
  std::vector<DataProfile> profiles;
  for (const TraceFile& t : traces) {
    auto it = std::find_if(profiles.begin(), profiles.end(),
                           [&](const DataProfile& p) { return p.solver == t.solver; });
    if (it == profiles.end()) {
      DataProfile p;
      p.solver = t.solver;
      p.tau = tau;
      p.max_alpha = max_alpha;
      profiles.push_back(std::move(p));
      it = profiles.end() - 1;
    }
    const auto np = actions_to_solve(t, f_stars.at({t.problem, t.d}), tau);
    it->ratios.push_back(np ? static_cast<double>(*np) / static_cast<double>(t.d)
                            : std::numeric_limits<double>::infinity());
  }
  for (DataProfile& p : profiles) {
    std::vector<double> cuts{0.0};
    for (double r : p.ratios) {
      if (r > 0.0 && r <= max_alpha) cuts.push_back(r);
    }
    cuts.push_back(max_alpha);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (double a : cuts) p.breakpoints.emplace_back(a, p.at(a));
  }
  return profiles;
}

std::vector<std::string> check_profile(const DataProfile& p) {
  std::vector<std::string> issues;
  const auto& b = p.breakpoints;
  if (b.empty()) {
    issues.push_back(p.solver + ": no breakpoints");
    return issues;
  }
  if (b.front().first != 0.0) issues.push_back(p.solver + ": profile does not start at 0");
  if (b.back().first != p.max_alpha) {
    issues.push_back(p.solver + ": profile does not end at max_alpha");
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i].second >= 0.0 && b[i].second <= 1.0)) {
      issues.push_back(p.solver + ": pi outside [0, 1] at alpha " + shortest(b[i].first));
    }
    if (i > 0 && !(b[i].first > b[i - 1].first)) {
      issues.push_back(p.solver + ": alpha not increasing at " + shortest(b[i].first));
    }
    if (i > 0 && b[i].second < b[i - 1].second) {
      issues.push_back(p.solver + ": pi decreases at alpha " + shortest(b[i].first));
    }
  }
  return issues;
}

PlotFormat parse_plot_format(std::string_view name) {
  if (name == "dat") return PlotFormat::Dat;
  if (name == "csv") return PlotFormat::Csv;
  throw std::invalid_argument("unknown plot format '" + std::string(name) + "' (dat|csv)");
}

std::vector<std::filesystem::path> emit_plot_data(const std::vector<DataProfile>& profiles,
                                                  const std::filesystem::path& dir,
                                                  PlotFormat format) {
  std::vector<std::filesystem::path> written;
  if (profiles.empty()) return written;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  const bool csv = format == PlotFormat::Csv;
  const char sep = csv ? ',' : ' ';
  for (const DataProfile& p : profiles) {
    const auto path = dir / (file_stem(p.solver) + (csv ? ".csv" : ".dat"));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# rsopt data profile v1\n"
        << "# solver: " << p.solver << '\n'
        << "# tau: " << shortest(p.tau) << '\n'
        << "# runs: " << p.ratios.size() << " solved: " << p.solved() << '\n'
        << "alpha" << sep << "pi\n";
    for (const auto& [a, v] : p.breakpoints) out << shortest(a) << sep << shortest(v) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
    written.push_back(path);
  }
  const auto script = dir / "plot_profiles.py";
  std::ofstream out(script);
  if (!out) throw std::runtime_error("cannot write " + script.string());
  out << kPlotScript;
  written.push_back(script);
  return written;
}

std::vector<std::pair<double, double>> read_plot_data(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::pair<double, double>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("alpha", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0;
    double v = 0.0;
    if (!(row >> a >> v)) throw std::runtime_error("malformed row in " + path.string());
    out.emplace_back(a, v);
  }
  return out;
}

}  // namespace rsopt
