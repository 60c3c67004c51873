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


// Command line front end: run experiments, build data profiles, evaluate
// complexity bounds and check trace invariants.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rsopt/experiment.hpp"
#include "rsopt/problems.hpp"
#include "rsopt/profile.hpp"
#include "rsopt/sketch.hpp"
#include "rsopt/theory.hpp"
#include "rsopt/trace_io.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string config;
  std::vector<std::string> problems;
  std::optional<long> dimension;
  std::vector<std::string> sketches;
  std::vector<double> l_fractions;
  std::vector<std::string> variants;
  std::optional<std::string> tr_step;
  bool full_gn = false;
  std::optional<int> seeds;
  std::optional<double> tau;
  std::optional<double> budget;
  std::optional<std::string> output;
  std::optional<unsigned> workers;
  bool quiet = false;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

int cmd_run(const RunOptions& o) {
  json j = o.config.empty() ? json::object() : read_json_file(o.config);
  if (!o.problems.empty()) {
    j["problems"] = o.problems.size() == 1 && (o.problems[0] == "all" ||
                                               o.problems[0] == "zero_residual")
                        ? json(o.problems[0])
                        : json(o.problems);
  }
  if (!j.contains("problems")) j["problems"] = "zero_residual";
  if (o.dimension) j["dimension"] = *o.dimension;
  if (!o.sketches.empty()) {
    j["grid"]["sketches"] = o.sketches;
    if (!o.l_fractions.empty()) j["grid"]["l_fractions"] = o.l_fractions;
    if (!o.variants.empty()) j["grid"]["variants"] = o.variants;
    if (o.tr_step) j["grid"]["tr_step"] = *o.tr_step;
  }
  if (o.full_gn) j["full_gn"] = true;
  if (o.seeds) j["seeds"] = *o.seeds;
  if (o.tau) j["tau"] = *o.tau;
  if (o.budget) j["budget_multiplier"] = *o.budget;
  if (o.output) j["output"] = *o.output;
  if (o.workers) j["workers"] = *o.workers;

  const rsopt::ExperimentConfig config = rsopt::experiment_from_json(j);
  const std::size_t total = rsopt::expand_runs(config).size();
  std::size_t done = 0;
  const rsopt::RunSet set = rsopt::run_experiment(config, [&](const rsopt::IndexEntry& e) {
    ++done;
    if (!o.quiet) {
      std::fprintf(stderr, "[%zu/%zu] %s d=%ld %s seed %llu %s\n", done, total,
                   e.problem.c_str(), static_cast<long>(e.d), e.solver.c_str(),
                   static_cast<unsigned long long>(e.seed), e.ok ? "ok" : e.error.c_str());
    }
  });
  std::printf("%zu runs written to %s (%zu failed)\n", set.entries.size(),
              set.dir.string().c_str(), set.failures());
  if (set.failures() > 0) throw RuntimeFailure("some runs failed; see index.json");
  return kOk;
}

int cmd_profile(const std::string& dir, double tau, double max_alpha, const std::string& format,
                const std::string& out_dir) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  const rsopt::PlotFormat fmt = rsopt::parse_plot_format(format);
  const rsopt::RunSet set = rsopt::load_run_set(dir);
  for (const std::string& m : set.missing) std::fprintf(stderr, "missing run: %s\n", m.c_str());
  const auto profiles = rsopt::compute_profiles(set.traces, tau, max_alpha);
  std::printf("%-32s %6s %6s %8s %8s %8s %8s\n", "solver", "runs", "solved", "pi(1)", "pi(5)",
              "pi(10)", "pi(max)");
  for (const auto& p : profiles) {
    std::printf("%-32s %6zu %6zu %8.3f %8.3f %8.3f %8.3f\n", p.solver.c_str(), p.ratios.size(),
                p.solved(), p.at(1.0), p.at(5.0), p.at(10.0), p.at(max_alpha));
  }
  const std::string target = out_dir.empty() ? (std::filesystem::path(dir) / "profiles").string()
                                             : out_dir;
  const auto files = rsopt::emit_plot_data(profiles, target, fmt);
  if (!files.empty()) std::printf("plot data in %s\n", target.c_str());
  return set.missing.empty() ? kOk : kRuntimeError;
}

int cmd_check(const std::string& dir, double tau) {
  const rsopt::RunSet set = rsopt::load_run_set(dir);
  std::size_t violations = 0;
  for (const std::string& m : set.missing) {
    std::printf("missing: %s\n", m.c_str());
    ++violations;
  }
  for (const auto& t : set.traces) {
    for (const std::string& issue : rsopt::check_trace(t)) {
      std::printf("trace: %s\n", issue.c_str());
      ++violations;
    }
  }
  for (const auto& p : rsopt::compute_profiles(set.traces, tau)) {
    for (const std::string& issue : rsopt::check_profile(p)) {
      std::printf("profile: %s\n", issue.c_str());
      ++violations;
    }
  }
  std::printf("%zu traces checked, %zu violations\n", set.traces.size(), violations);
  return violations == 0 ? kOk : kRuntimeError;
}

json bound_report(const std::string& variant, const rsopt::ComplexityInputs& in) {
  const bool qr = variant == "qr";
  if (!qr && variant != "tr") throw std::invalid_argument("variant must be qr or tr");
  const rsopt::DecreaseBound h = qr ? rsopt::qr_h(in) : rsopt::tr_h(in);
  json out = {{"variant", variant},
              {"alpha_low", h.alpha_low},
              {"tau_alpha", h.tau_alpha},
              {"alpha_min", h.alpha_min},
              {"h", h.h}};
  if (!qr) out["h_exact"] = rsopt::tr_h_exact(in).h;
  try {
    const rsopt::IterationBound b = rsopt::iteration_bound(
        {in.delta_s, in.delta_1, in.c, h.tau_alpha, in.f0_minus_fstar, h.h});
    out["g"] = b.g;
    out["N"] = b.n;
    out["failure_probability"] = b.failure_probability;
    out["D1"] = b.d1;
    out["D2"] = b.d2;
    out["D3"] = b.d3;
    out["expectation_bound"] = b.expectation_bound;
  } catch (const std::invalid_argument& e) {
    out["N"] = nullptr;
    out["inapplicable"] = e.what();
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rsopt: random-subspace trust-region and regularization solvers"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "run an experiment and write traces plus an index");
  run->add_option("-c,--config", run_opts.config, "experiment config file (JSON)");
  run->add_option("--problems", run_opts.problems,
                  "problem names, or 'all' / 'zero_residual'")
      ->delimiter(',');
  run->add_option("-d,--dimension", run_opts.dimension, "problem dimension");
  run->add_option("--sketch", run_opts.sketches,
                  "grid sketches: gaussian hashing stable1hashing sampling")
      ->delimiter(',');
  run->add_option("--l-fraction", run_opts.l_fractions, "grid subspace fractions l/d")
      ->delimiter(',');
  run->add_option("--variant", run_opts.variants, "grid variants: tr qr")->delimiter(',');
  run->add_option("--tr-step", run_opts.tr_step, "trust-region step: cauchy or dogleg");
  run->add_flag("--full-gn", run_opts.full_gn, "add the full-space Gauss-Newton baseline");
  run->add_option("--seeds", run_opts.seeds, "number of seeds per randomized solver");
  run->add_option("--tau", run_opts.tau, "profile accuracy recorded in the index");
  run->add_option("--budget-multiplier", run_opts.budget, "action budget in units of d");
  run->add_option("-o,--output", run_opts.output, "output directory");
  run->add_option("-j,--workers", run_opts.workers, "worker threads (0 = all cores)");
  run->add_flag("-q,--quiet", run_opts.quiet, "no per-run progress");

  std::string prof_dir;
  double prof_tau = 0.1;
  double prof_alpha = 50.0;
  std::string prof_format = "dat";
  std::string prof_out;
  auto* profile = app.add_subcommand("profile", "data profiles from a run directory");
  profile->add_option("dir", prof_dir, "run directory")->required();
  profile->add_option("--tau", prof_tau, "solve accuracy");
  profile->add_option("--max-alpha", prof_alpha, "largest budget in units of d");
  profile->add_option("--format", prof_format, "dat or csv");
  profile->add_option("--out", prof_out, "plot data directory (default DIR/profiles)");

  std::string check_dir;
  double check_tau = 0.1;
  auto* check = app.add_subcommand("check", "verify trace and profile invariants");
  check->add_option("dir", check_dir, "run directory")->required();
  check->add_option("--tau", check_tau, "accuracy for the profile checks");

  auto* theory = app.add_subcommand("theory", "complexity bounds and probabilistic checks");
  theory->require_subcommand(1);

  rsopt::ComplexityInputs in;
  std::string variant = "qr";
  auto* bound = theory->add_subcommand("bound", "decrease function h and iteration bound N");
  bound->add_option("--variant", variant, "qr or tr");
  bound->add_option("--delta-s", in.delta_s, "probability an iteration is not true");
  bound->add_option("--delta-1", in.delta_1, "Chernoff slack");
  bound->add_option("--c", in.c, "step growth exponent");
  bound->add_option("--gamma1", in.gamma1, "step shrink factor");
  bound->add_option("--theta", in.theta, "sufficient decrease fraction");
  bound->add_option("--alpha0", in.alpha0, "initial step parameter");
  bound->add_option("--alpha-max", in.alpha_max, "largest step parameter");
  bound->add_option("--eps", in.eps, "gradient accuracy");
  bound->add_option("--L", in.L, "gradient Lipschitz constant");
  bound->add_option("--B-max", in.B_max, "bound on the model Hessian norm");
  bound->add_option("--kappa-t", in.kappa_T, "inner solve tolerance (qr)");
  bound->add_option("--s-max", in.s_max, "sketch norm bound");
  bound->add_option("--eps-s", in.eps_s, "embedding tolerance");
  bound->add_option("--c7", in.c7, "Cauchy decrease fraction (tr)");
  bound->add_option("--f-gap", in.f0_minus_fstar, "f(x0) - f*");

  double ch_ds = 0.1;
  double ch_d1 = 0.3;
  long ch_n = 200;
  long ch_trials = 100000;
  std::uint64_t ch_seed = 1;
  auto* chernoff =
      theory->add_subcommand("chernoff", "Monte Carlo check of the true-iteration count");
  chernoff->add_option("--delta-s", ch_ds, "probability an iteration is not true");
  chernoff->add_option("--delta-1", ch_d1, "relative slack");
  chernoff->add_option("-N", ch_n, "iterations per chain");
  chernoff->add_option("--trials", ch_trials, "number of chains");
  chernoff->add_option("--seed", ch_seed, "generator seed");

  std::string en_kind = "gaussian";
  long en_l = 64;
  long en_d = 100;
  long en_s = 3;
  double en_eps = 0.5;
  double en_delta2 = 0.01;
  double en_nu = 1.0;
  auto* ensemble = theory->add_subcommand("ensemble", "embedding and norm parameters of a sketch");
  ensemble->add_option("--sketch", en_kind, "ensemble kind");
  ensemble->add_option("-l", en_l, "rows");
  ensemble->add_option("-d", en_d, "columns");
  ensemble->add_option("-s", en_s, "nonzeros per column (hashing)");
  ensemble->add_option("--eps-s", en_eps, "embedding tolerance");
  ensemble->add_option("--delta-2", en_delta2, "norm failure probability (gaussian)");
  ensemble->add_option("--nu", en_nu, "gradient non-uniformity (sampling)");

  auto* problems = app.add_subcommand("problems", "list the built-in test problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (profile->parsed()) return cmd_profile(prof_dir, prof_tau, prof_alpha, prof_format, prof_out);
    if (check->parsed()) return cmd_check(check_dir, check_tau);
    if (bound->parsed()) {
      std::printf("%s\n", bound_report(variant, in).dump(2).c_str());
      return kOk;
    }
    if (chernoff->parsed()) {
      const auto r = rsopt::verify_chernoff(ch_ds, ch_d1, ch_n, ch_trials, rsopt::Rng(ch_seed));
      const json out = {{"empirical", r.empirical}, {"bound", r.bound},
                        {"exact", r.exact},         {"threshold", r.threshold},
                        {"sigma", r.sigma},         {"trials", r.trials},
                        {"within_bound", r.within_bound()}};
      std::printf("%s\n", out.dump(2).c_str());
      return r.within_bound() ? kOk : kRuntimeError;
    }
    if (ensemble->parsed()) {
      rsopt::SketchSpec spec{rsopt::parse_sketch_kind(en_kind), en_l, en_d, en_s, 0};
      const bool gaussian = spec.kind == rsopt::SketchKind::ScaledGaussian;
      const auto t = rsopt::theory_params(spec, en_eps, gaussian ? en_delta2 : 0.0, en_nu);
      const json out = {{"kind", en_kind},        {"l", en_l},
                        {"d", en_d},              {"eps_s", t.eps_s},
                        {"delta1", t.delta1},     {"delta2", t.delta2},
                        {"delta_s", t.delta_s()}, {"s_max", t.s_max}};
      std::printf("%s\n", out.dump(2).c_str());
      return kOk;
    }
    if (problems->parsed()) {
      for (const std::string& name : rsopt::problem_names()) {
        const auto p = rsopt::make_problem(name, rsopt::admissible_dimension(name, 100));
        std::printf("%-22s %s\n", name.c_str(), p.zero_residual ? "zero-residual" : "nonzero-residual");
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}
