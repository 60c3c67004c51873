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


#include "rsopt/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rsopt {

using nlohmann::json;

namespace {

constexpr const char* kSchemaName = "rsopt.trace";

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Vector read_vector(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = read_number(j[i]);
  return v;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json parse_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) return json::parse(line);
  }
  throw std::runtime_error(std::string("trace ended before the ") + what + " line");
}

}  // namespace

json to_json(const SketchSpec& spec) {
  return {{"kind", std::string(to_string(spec.kind))},
          {"l", spec.l},
          {"d", spec.d},
          {"s", spec.s},
          {"seed", spec.seed}};
}

SketchSpec sketch_from_json(const json& j) {
  reject_unknown(j, {"kind", "l", "d", "s", "seed"}, "sketch");
  SketchSpec spec;
  if (j.contains("kind")) spec.kind = parse_sketch_kind(j.at("kind").get<std::string>());
  read_if(j, "l", spec.l);
  read_if(j, "d", spec.d);
  read_if(j, "s", spec.s);
  read_if(j, "seed", spec.seed);
  return spec;
}

json to_json(const SolverConfig& c) {
  json j = {{"gamma1", c.gamma1},
            {"c", c.c},
            {"p", c.p},
            {"theta", c.theta},
            {"alpha_max", c.alpha_max},
            {"variant", std::string(to_string(c.variant))},
            {"sketch", to_json(c.sketch)},
            {"kappa_t", c.kappa_t},
            {"tr_step", std::string(to_string(c.tr_step))},
            {"stopping",
             {{"grad_tol", c.stopping.grad_tol},
              {"max_iters", c.stopping.max_iters},
              {"action_budget", c.stopping.action_budget}}}};
  j["adaptive"] = c.adaptive ? json{{"kappa", c.adaptive->kappa},
                                    {"l_increment", c.adaptive->l_increment}}
                             : json(nullptr);
  j["diagnostics"] = c.diagnostics ? json{{"eps_s", c.diagnostics->eps_s},
                                          {"s_max", c.diagnostics->s_max}}
                                   : json(nullptr);
  return j;
}

SolverConfig solver_config_from_json(const json& j, const SolverConfig& defaults) {
  reject_unknown(j,
                 {"gamma1", "c", "p", "theta", "alpha_max", "variant", "sketch", "kappa_t",
                  "tr_step", "stopping", "adaptive", "diagnostics"},
                 "solver config");
  SolverConfig c = defaults;
  read_if(j, "gamma1", c.gamma1);
  read_if(j, "c", c.c);
  read_if(j, "p", c.p);
  read_if(j, "theta", c.theta);
  read_if(j, "alpha_max", c.alpha_max);
  read_if(j, "kappa_t", c.kappa_t);
  if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
  if (j.contains("tr_step")) c.tr_step = parse_tr_step(j.at("tr_step").get<std::string>());
  if (j.contains("sketch")) {
    json merged = to_json(c.sketch);
    merged.update(j.at("sketch"));
    c.sketch = sketch_from_json(merged);
  }
  if (j.contains("stopping")) {
    const json& s = j.at("stopping");
    reject_unknown(s, {"grad_tol", "max_iters", "action_budget"}, "stopping");
    read_if(s, "grad_tol", c.stopping.grad_tol);
    read_if(s, "max_iters", c.stopping.max_iters);
    read_if(s, "action_budget", c.stopping.action_budget);
  }
  if (j.contains("adaptive")) {
    const json& a = j.at("adaptive");
    if (a.is_null() || (a.is_boolean() && !a.get<bool>())) {
      c.adaptive.reset();
    } else {
      AdaptiveOptions opts = c.adaptive.value_or(AdaptiveOptions{});
      if (!a.is_boolean()) {
        reject_unknown(a, {"kappa", "l_increment"}, "adaptive");
        read_if(a, "kappa", opts.kappa);
        read_if(a, "l_increment", opts.l_increment);
      }
      c.adaptive = opts;
    }
  }
  if (j.contains("diagnostics")) {
    const json& dj = j.at("diagnostics");
    if (dj.is_null() || (dj.is_boolean() && !dj.get<bool>())) {
      c.diagnostics.reset();
    } else {
      TrueIterationCheck diag = c.diagnostics.value_or(TrueIterationCheck{});
      if (!dj.is_boolean()) {
        reject_unknown(dj, {"eps_s", "s_max"}, "diagnostics");
        read_if(dj, "eps_s", diag.eps_s);
        read_if(dj, "s_max", diag.s_max);
      }
      c.diagnostics = diag;
    }
  }
  return c;
}

json to_json(const IterationRecord& r) {
  json j = {{"type", "iter"},
            {"k", r.k},
            {"f_before", number(r.f_before)},
            {"f_trial", number(r.f_trial)},
            {"f_after", number(r.f_after)},
            {"alpha", r.alpha},
            {"alpha_exponent", r.alpha_exponent},
            {"l", r.l},
            {"successful", r.successful},
            {"model_decrease", number(r.model_decrease)},
            {"step_norm", number(r.step_norm)},
            {"actions", r.actions_used}};
  j["true_iter"] = r.true_iter ? json(*r.true_iter) : json(nullptr);
  j["grad_norm"] = r.grad_norm ? number(*r.grad_norm) : json(nullptr);
  return j;
}

IterationRecord record_from_json(const json& j) {
  IterationRecord r;
  r.k = j.at("k").get<long>();
  r.f_before = read_number(j.at("f_before"));
  r.f_trial = read_number(j.at("f_trial"));
  r.f_after = read_number(j.at("f_after"));
  r.alpha = j.at("alpha").get<double>();
  r.alpha_exponent = j.at("alpha_exponent").get<int>();
  r.l = j.at("l").get<Index>();
  r.successful = j.at("successful").get<bool>();
  r.model_decrease = read_number(j.at("model_decrease"));
  r.step_norm = read_number(j.at("step_norm"));
  r.actions_used = j.at("actions").get<long long>();
  if (j.contains("true_iter") && !j.at("true_iter").is_null()) {
    r.true_iter = j.at("true_iter").get<bool>();
  }
  if (j.contains("grad_norm") && !j.at("grad_norm").is_null()) {
    r.grad_norm = read_number(j.at("grad_norm"));
  }
  return r;
}

void write_trace(std::ostream& out, const TraceFile& file) {
  const RunTrace& t = file.trace;
  json header = {{"type", "header"},
                 {"schema", kSchemaName},
                 {"version", kTraceSchemaVersion},
                 {"problem", file.problem},
                 {"d", file.d},
                 {"zero_residual", file.zero_residual},
                 {"solver", file.solver},
                 {"seed", t.seed},
                 {"config", to_json(t.config)},
                 {"x0", vector_json(t.x0)},
                 {"f0", number(t.f0)}};
  header["f_star"] = file.f_star ? number(*file.f_star) : json(nullptr);
  out << header.dump() << '\n';
  for (const IterationRecord& r : t.records) out << to_json(r).dump() << '\n';
  json summary = {{"type", "summary"},
                  {"termination", std::string(to_string(t.termination))},
                  {"iterations", t.records.size()},
                  {"f_final", number(t.f_final)},
                  {"x_final", vector_json(t.x_final)},
                  {"actions", t.records.empty() ? 0 : t.records.back().actions_used},
                  {"monitor_calls", t.monitor_calls}};
  out << summary.dump() << '\n';
}

void write_trace(const std::filesystem::path& path, const TraceFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trace(out, file);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

TraceFile read_trace(std::istream& in) {
  const json header = parse_line(in, "header");
  if (header.value("type", "") != "header" || header.value("schema", "") != kSchemaName) {
    throw std::runtime_error("not an rsopt trace");
  }
  const int version = header.at("version").get<int>();
  if (version != kTraceSchemaVersion) {
    throw std::runtime_error("unsupported trace version " + std::to_string(version));
  }
  TraceFile file;
  file.problem = header.at("problem").get<std::string>();
  file.d = header.at("d").get<Index>();
  file.zero_residual = header.at("zero_residual").get<bool>();
  file.solver = header.at("solver").get<std::string>();
  if (!header.at("f_star").is_null()) file.f_star = header.at("f_star").get<double>();
  RunTrace& t = file.trace;
  t.seed = header.at("seed").get<std::uint64_t>();
  t.config = solver_config_from_json(header.at("config"));
  t.x0 = read_vector(header.at("x0"));
  t.f0 = read_number(header.at("f0"));

  for (;;) {
    const json line = parse_line(in, "summary");
    const std::string type = line.at("type").get<std::string>();
    if (type == "iter") {
      t.records.push_back(record_from_json(line));
    } else if (type == "summary") {
      t.termination = parse_termination(line.at("termination").get<std::string>());
      t.f_final = read_number(line.at("f_final"));
      t.x_final = read_vector(line.at("x_final"));
      t.monitor_calls = line.at("monitor_calls").get<long long>();
      break;
    } else {
      throw std::runtime_error("unknown trace record type '" + type + "'");
    }
  }
  return file;
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace(in);
}

std::vector<std::string> check_trace(const TraceFile& file) {
  std::vector<std::string> issues;
  const RunTrace& t = file.trace;
  const SolverConfig& c = t.config;
  const std::string tag = file.problem + "/" + file.solver + "/seed " + std::to_string(t.seed);
  auto report = [&](long k, const std::string& what) {
    issues.push_back(tag + " k=" + std::to_string(k) + ": " + what);
  };

  double f_prev = t.f0;
  long long actions_prev = 0;
  const double log_gamma = std::log(c.gamma1);
  for (const IterationRecord& r : t.records) {
    if (r.f_before != f_prev) report(r.k, "f_before does not continue the previous f_after");
    if (!(r.f_after <= r.f_before)) report(r.k, "objective increased");
    f_prev = r.f_after;

    const double m = std::log(r.alpha / c.alpha_max) / log_gamma;
    const double nearest = std::round(m);
    if (!(std::abs(m - nearest) <= 1e-9 && nearest >= 0.0)) {
      report(r.k, "alpha is off the lattice alpha_max gamma1^m");
    }
    if (r.alpha_exponent < 0 || nearest != static_cast<double>(r.alpha_exponent)) {
      report(r.k, "alpha exponent does not match alpha");
    }

    const bool expected = sufficient_decrease(r.f_before, r.f_trial, r.model_decrease, c.theta);
    if (expected != r.successful) report(r.k, "success flag disagrees with the decrease test");
    if (r.successful ? r.f_after != r.f_trial : r.f_after != r.f_before) {
      report(r.k, "f_after does not follow the success flag");
    }

    const long long spent = r.actions_used - actions_prev;
    if (c.adaptive ? spent < r.l : spent != r.l) {
      report(r.k, "action count " + std::to_string(spent) + " does not match l = " +
                      std::to_string(r.l));
    }
    actions_prev = r.actions_used;
  }
  if (!t.records.empty() && t.f_final != t.records.back().f_after) {
    issues.push_back(tag + ": final f does not match the last record");
  }
  return issues;
}

}  // namespace rsopt
