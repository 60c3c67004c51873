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


#include "rsopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rsopt/nls.hpp"
#include "rsopt/problems.hpp"

namespace rsopt {

using nlohmann::json;

namespace {

constexpr const char* kIndexName = "rsopt.index";

void bad(const std::string& what) { throw std::invalid_argument("experiment config: " + what); }

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string sanitize(std::string_view label) {
  std::string out;
  for (char ch : label) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    out.push_back(keep ? ch : '_');
  }
  return out;
}

std::string format_fraction(double f) {
  std::ostringstream os;
  os << f;
  return os.str();
}

SolverConfig experiment_defaults() {
  SolverConfig c;
  c.tr_step = TrStep::Dogleg;
  c.stopping.max_iters = 1000000;
  return c;
}

std::string default_label(const SolverSpec& s) {
  std::string label = std::string(to_string(s.config.variant)) + "-" +
                      std::string(to_string(s.config.sketch.kind));
  if (s.config.sketch.kind == SketchKind::Identity) return label;
  if (s.l_fraction) {
    label += "-" + format_fraction(*s.l_fraction) + "d";
  } else {
    label += "-l" + std::to_string(s.config.sketch.l);
  }
  if (s.config.adaptive) label += "-adaptive";
  return label;
}

SolverSpec parse_solver(const json& j, const SolverConfig& defaults) {
  static const std::set<std::string> allowed = {"label", "sketch", "l", "l_fraction", "s",
                                                "variant", "tr_step", "adaptive", "options"};
  if (!j.is_object()) bad("each solver must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) bad("unknown solver key '" + item.key() + "'");
  }
  SolverSpec s;
  s.config = j.contains("options") ? solver_config_from_json(j.at("options"), defaults)
                                   : defaults;
  json shorthand = json::object();
  for (const char* key : {"variant", "tr_step", "adaptive"}) {
    if (j.contains(key)) shorthand[key] = j.at(key);
  }
  if (j.contains("sketch")) shorthand["sketch"]["kind"] = j.at("sketch");
  if (j.contains("l")) shorthand["sketch"]["l"] = j.at("l");
  if (j.contains("s")) shorthand["sketch"]["s"] = j.at("s");
  s.config = solver_config_from_json(shorthand, s.config);
  if (j.contains("l_fraction")) {
    if (j.contains("l")) bad("give either l or l_fraction, not both");
    s.l_fraction = j.at("l_fraction").get<double>();
  }
  s.label = j.contains("label") ? j.at("label").get<std::string>() : default_label(s);
  return s;
}

std::vector<ProblemRef> parse_problems(const json& j, Index dimension) {
  std::vector<ProblemRef> out;
  auto add_set = [&](const std::string& set) {
    const bool zero_only = set == "zero_residual";
    if (!zero_only && set != "all") bad("unknown problem set '" + set + "'");
    for (const std::string& name : problem_names()) {
      const NlsProblem p = make_problem(name, admissible_dimension(name, dimension));
      if (!zero_only || p.zero_residual) out.push_back({name, p.d});
    }
  };
  if (j.is_string()) {
    add_set(j.get<std::string>());
  } else if (j.is_array()) {
    for (const json& item : j) {
      if (item.is_string()) {
        const auto name = item.get<std::string>();
        out.push_back({name, admissible_dimension(name, dimension)});
      } else if (item.is_object()) {
        const auto name = item.at("name").get<std::string>();
        const Index d = item.contains("d") ? item.at("d").get<Index>()
                                           : admissible_dimension(name, dimension);
        out.push_back({name, d});
      } else {
        bad("problems entries must be names or {name, d} objects");
      }
    }
  } else {
    bad("problems must be a set name or a list");
  }
  return out;
}

json entry_json(const IndexEntry& e) {
  json j = {{"file", e.file},   {"problem", e.problem}, {"d", e.d},
            {"solver", e.solver}, {"seed", e.seed},     {"status", e.ok ? "ok" : "error"},
            {"wall_seconds", e.wall_seconds}};
  if (!e.ok) j["error"] = e.error;
  return j;
}

IndexEntry entry_from_json(const json& j) {
  IndexEntry e;
  e.file = j.at("file").get<std::string>();
  e.problem = j.at("problem").get<std::string>();
  e.d = j.at("d").get<Index>();
  e.solver = j.at("solver").get<std::string>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.ok = j.at("status").get<std::string>() == "ok";
  if (j.contains("error")) e.error = j.at("error").get<std::string>();
  e.wall_seconds = j.value("wall_seconds", 0.0);
  return e;
}

}  // namespace

SolverConfig SolverSpec::resolve(Index d, double budget_multiplier) const {
  SolverConfig c = config;
  c.sketch.d = d;
  if (c.sketch.kind == SketchKind::Identity) {
    c.sketch.l = d;
  } else if (l_fraction) {
    const auto l = static_cast<Index>(std::llround(*l_fraction * static_cast<double>(d)));
    c.sketch.l = std::clamp<Index>(l, 1, d);
  }
  if (c.sketch.kind == SketchKind::SHashing) c.sketch.s = std::min(c.sketch.s, c.sketch.l);
  if (c.stopping.action_budget <= 0) {
    c.stopping.action_budget =
        static_cast<long long>(std::ceil(budget_multiplier * static_cast<double>(d)));
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (problems.empty()) bad("no problems");
  if (solvers.empty()) bad("empty solver grid");
  if (seeds.empty()) bad("at least one seed is required");
  if (!(tau > 0.0 && tau < 1.0)) bad("tau must lie in (0, 1)");
  if (!(budget_multiplier > 0.0)) bad("budget_multiplier must be positive");
  std::set<std::string> labels;
  for (const SolverSpec& s : solvers) {
    if (s.label.empty()) bad("solver labels must be non-empty");
    if (!labels.insert(s.label).second) bad("duplicate solver label '" + s.label + "'");
    if (s.l_fraction && !(*s.l_fraction > 0.0 && *s.l_fraction <= 1.0)) {
      bad("l_fraction must lie in (0, 1] for solver '" + s.label + "'");
    }
  }
  for (const ProblemRef& p : problems) {
    const NlsProblem problem = make_problem(p.name, p.d);
    for (const SolverSpec& s : solvers) {
      const SolverConfig c = s.resolve(p.d, budget_multiplier);
      try {
        c.validate(p.d);
        c.sketch.validate();
      } catch (const std::invalid_argument& e) {
        bad("solver '" + s.label + "' on " + p.name + ": " + e.what());
      }
    }
  }
}

ExperimentConfig experiment_from_json(const json& j) {
  static const std::set<std::string> allowed = {
      "problems", "dimension", "solver_defaults", "solvers", "grid", "full_gn",
      "seeds", "tau", "budget_multiplier", "output", "workers"};
  if (!j.is_object()) bad("top level must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) bad("unknown key '" + item.key() + "'");
  }
  ExperimentConfig c;
  const Index dimension = j.value("dimension", Index{100});
  if (!j.contains("problems")) bad("problems are required");
  c.problems = parse_problems(j.at("problems"), dimension);

  SolverConfig defaults = experiment_defaults();
  if (j.contains("solver_defaults")) {
    defaults = solver_config_from_json(j.at("solver_defaults"), defaults);
  }
  if (j.value("full_gn", false)) {
    c.solvers.push_back(parse_solver({{"label", "full-gn"}, {"sketch", "identity"}}, defaults));
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    for (const auto& item : g.items()) {
      if (item.key() != "variants" && item.key() != "sketches" && item.key() != "l_fractions" &&
          item.key() != "s" && item.key() != "tr_step") {
        bad("unknown grid key '" + item.key() + "'");
      }
    }
    const json variants = g.value("variants", json::array({"tr"}));
    const json fractions = g.value("l_fractions", json::array({0.5}));
    if (!g.contains("sketches")) bad("grid needs sketches");
    for (const json& v : variants) {
      for (const json& k : g.at("sketches")) {
        for (const json& f : fractions) {
          json spec = {{"variant", v}, {"sketch", k}, {"l_fraction", f}};
          if (g.contains("s")) spec["s"] = g.at("s");
          if (g.contains("tr_step")) spec["tr_step"] = g.at("tr_step");
          c.solvers.push_back(parse_solver(spec, defaults));
        }
      }
    }
  }
  if (j.contains("solvers")) {
    for (const json& s : j.at("solvers")) c.solvers.push_back(parse_solver(s, defaults));
  }
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    if (s.is_number_integer()) {
      const auto n = s.get<long long>();
      if (n < 1) bad("seeds must be >= 1");
      for (long long i = 0; i < n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
    } else {
      c.seeds = s.get<std::vector<std::uint64_t>>();
    }
  } else {
    c.seeds = {0};
  }
  c.tau = j.value("tau", c.tau);
  c.budget_multiplier = j.value("budget_multiplier", c.budget_multiplier);
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  c.workers = j.value("workers", 0u);
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + path.string() + ": " + e.what());
  }
  return experiment_from_json(j);
}

json to_json(const ExperimentConfig& c) {
  json problems = json::array();
  for (const ProblemRef& p : c.problems) problems.push_back({{"name", p.name}, {"d", p.d}});
  json solvers = json::array();
  for (const SolverSpec& s : c.solvers) {
    json sj = {{"label", s.label}, {"options", to_json(s.config)}};
    if (s.l_fraction) sj["l_fraction"] = *s.l_fraction;
    solvers.push_back(sj);
  }
  return {{"problems", problems},
          {"solvers", solvers},
          {"seeds", c.seeds},
          {"tau", c.tau},
          {"budget_multiplier", c.budget_multiplier},
          {"output", c.output.string()},
          {"workers", c.workers}};
}

std::vector<RunSpec> expand_runs(const ExperimentConfig& config) {
  std::vector<RunSpec> runs;
  for (std::size_t p = 0; p < config.problems.size(); ++p) {
    for (std::size_t s = 0; s < config.solvers.size(); ++s) {
      if (config.solvers[s].randomized()) {
        for (std::uint64_t seed : config.seeds) runs.push_back({p, s, seed});
      } else {
        runs.push_back({p, s, config.seeds.front()});
      }
    }
  }
  return runs;
}

std::uint64_t run_seed(const ProblemRef& problem, std::uint64_t seed) {
  return mix_seed(seed, fnv1a(problem.name + "/" + std::to_string(problem.d)));
}

std::string trace_file_name(const ExperimentConfig& config, const RunSpec& run) {
  const ProblemRef& p = config.problems[run.problem];
  return "traces/" + sanitize(p.name) + "-d" + std::to_string(p.d) + "__" +
         sanitize(config.solvers[run.solver].label) + "__seed" + std::to_string(run.seed) +
         ".jsonl";
}

TraceFile execute_run(const ExperimentConfig& config, const RunSpec& run) {
  const ProblemRef& ref = config.problems[run.problem];
  const SolverSpec& solver = config.solvers[run.solver];
  const NlsProblem problem = make_problem(ref.name, ref.d);
  const SolverConfig cfg = solver.resolve(ref.d, config.budget_multiplier);

  NlsObjective objective(problem);
  Rng rng(run_seed(ref, run.seed));
  TraceFile out;
  out.problem = ref.name;
  out.d = ref.d;
  out.zero_residual = problem.zero_residual;
  out.f_star = problem.f_star;
  out.solver = solver.label;
  out.trace = cfg.adaptive ? run_adaptive(objective, problem.x0, cfg, rng)
                           : rsopt::run(objective, problem.x0, cfg, rng);
  return out;
}

std::size_t RunSet::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const IndexEntry& e) { return !e.ok; }));
}

RunSet run_experiment(const ExperimentConfig& config,
                      const std::function<void(const IndexEntry&)>& on_done) {
  config.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output / "traces", ec);
  if (ec) {
    throw std::invalid_argument("cannot create output directory " + config.output.string() +
                                ": " + ec.message());
  }

  const std::vector<RunSpec> runs = expand_runs(config);
  std::vector<IndexEntry> entries(runs.size());
  std::vector<std::optional<TraceFile>> traces(runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      const RunSpec& run = runs[i];
      IndexEntry& e = entries[i];
      e.file = trace_file_name(config, run);
      e.problem = config.problems[run.problem].name;
      e.d = config.problems[run.problem].d;
      e.solver = config.solvers[run.solver].label;
      e.seed = run.seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        TraceFile trace = execute_run(config, run);
        write_trace(config.output / e.file, trace);
        traces[i] = std::move(trace);
      } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
      }
      e.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (on_done) {
        std::lock_guard<std::mutex> lock(report_mutex);
        on_done(e);
      }
    }
  };

  unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(
      std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(runs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  json index = {{"schema", kIndexName},
                {"version", kIndexSchemaVersion},
                {"trace_version", kTraceSchemaVersion},
                {"config", to_json(config)},
                {"runs", json::array()}};
  for (const IndexEntry& e : entries) index["runs"].push_back(entry_json(e));
  const fs::path index_path = config.output / "index.json";
  std::ofstream out(index_path);
  if (!out) throw std::runtime_error("cannot write " + index_path.string());
  out << index.dump(2) << '\n';

  RunSet set;
  set.dir = config.output;
  set.entries = std::move(entries);
  for (auto& t : traces) {
    if (t) set.traces.push_back(std::move(*t));
  }
  return set;
}

RunSet load_run_set(const std::filesystem::path& dir) {
  const auto index_path = dir / "index.json";
  std::ifstream in(index_path);
  if (!in) throw std::invalid_argument("no index.json in " + dir.string());
  const json index = json::parse(in);
  if (index.value("schema", "") != kIndexName) {
    throw std::invalid_argument(index_path.string() + " is not an rsopt index");
  }
  if (index.at("version").get<int>() != kIndexSchemaVersion) {
    throw std::invalid_argument("unsupported index version in " + index_path.string());
  }
  RunSet set;
  set.dir = dir;
  for (const json& r : index.at("runs")) {
    IndexEntry e = entry_from_json(r);
    if (e.ok) {
      try {
        set.traces.push_back(read_trace(dir / e.file));
      } catch (const std::exception& ex) {
        set.missing.push_back(e.file + ": " + ex.what());
      }
    }
    set.entries.push_back(std::move(e));
  }
  return set;
}

}  // namespace rsopt
