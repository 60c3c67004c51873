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


// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bound_fixtures.hpp"
#include "rsopt/experiment.hpp"
#include "rsopt/model.hpp"
#include "rsopt/nls.hpp"
#include "rsopt/problems.hpp"
#include "rsopt/profile.hpp"
#include "rsopt/sketch.hpp"
#include "rsopt/solver.hpp"
#include "rsopt/theory.hpp"
#include "rsopt/trace_io.hpp"
#include "sketch_checks.hpp"

namespace {

using namespace rsopt;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rsopt_acceptance_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

constexpr SketchKind kRandomKinds[] = {SketchKind::ScaledGaussian, SketchKind::SHashing,
                                       SketchKind::StableOneHashing,
                                       SketchKind::ScaledSampling};

Outcome ensemble_structure() {
  const auto start = Clock::now();
  long draws = 0;
  long structure = 0;
  long norm = 0;
  std::string first;
  Rng rng(1);
  for (SketchKind kind : kRandomKinds) {
    for (Index l : {5, 25, 75}) {
      const SketchSpec spec{kind, l, 100, 3, 0};
      const double s_max = kind == SketchKind::ScaledGaussian
                               ? std::numeric_limits<double>::infinity()
                               : theory_params(spec, 0.5).s_max;
      for (int i = 0; i < 1000; ++i, ++draws) {
        const SketchMatrix s = draw(spec, rng);
        const std::string why = testing::structure_violation(s);
        if (!why.empty()) {
          ++structure;
          if (first.empty()) first = std::string(to_string(kind)) + ": " + why;
        }
        if (s.spectral_norm() > s_max * (1.0 + 1e-12)) {
          ++norm;
          if (first.empty()) first = std::string(to_string(kind)) + ": norm above S_max";
        }
      }
    }
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = structure == 0 && norm == 0 && secs < 10.0;
  o.detail = fmt("%ld draws, %ld structure and %ld norm violations, %.2f s", draws, structure,
                 norm, secs);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome gaussian_embedding() {
  const auto start = Clock::now();
  constexpr Index kL = 64;
  constexpr Index kD = 100;
  constexpr long kPerDirection = 10000;
  constexpr int kDirections = 10;
  const double eps_s = 0.5;
  Rng rng(2);
  double failures = 0.0;
  for (int k = 0; k < kDirections; ++k) {
    Vector y(kD);
    for (Index i = 0; i < kD; ++i) y[i] = rng.normal();
    failures += embedding_trial(SketchSpec{SketchKind::ScaledGaussian, kL, kD, 1, 0}, y, eps_s,
                                kPerDirection, rng) *
                static_cast<double>(kPerDirection);
  }
  const double trials = static_cast<double>(kPerDirection) * kDirections;
  const double rate = failures / trials;
  const double bound = std::exp(-eps_s * eps_s * static_cast<double>(kL) / 4.0);
  const double sigma = std::sqrt(bound * (1.0 - bound) / trials);
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = rate <= bound + 3.0 * sigma && secs < 60.0;
  o.detail = fmt("failure rate %.3g over %.0f trials, bound %.5f + 3 sigma = %.5f, %.1f s", rate,
                 trials, bound, bound + 3.0 * sigma, secs);
  return o;
}

double abs_spectral_norm(const Matrix& b) {
  if (b.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Outcome step_certificates() {
  Rng rng(3);
  long qr_bad = 0;
  long tr_bad = 0;
  const int models = 1000;
  const double kappa_t = 0.01;
  for (int trial = 0; trial < models; ++trial) {
    const Index d = 40;
    const Index l = 1 + static_cast<Index>(rng.uniform_index(20));
    const SketchKind kind = kRandomKinds[trial % 4];
    const SketchMatrix s = draw(SketchSpec{kind, l, d, std::min<Index>(3, l), 0}, rng);
    Matrix jac(l + 3, d);
    for (Index i = 0; i < jac.rows(); ++i) {
      for (Index j = 0; j < d; ++j) jac(i, j) = rng.normal();
    }
    Vector grad(d);
    for (Index j = 0; j < d; ++j) grad[j] = rng.normal();
    const Matrix sd = s.to_dense();
    ReducedModel m;
    m.f0 = 1.0 + std::abs(rng.normal());
    m.ghat = sd * grad;
    m.bhat = sd * jac.transpose() * jac * sd.transpose();
    m.gram = s.gram();
    const double alpha = std::pow(10.0, rng.uniform(-3.0, 2.0));

    const StepResult q = solve_qr_step(m, s, alpha, kappa_t);
    const double q_stat = qr_gradient(m, q.shat, alpha).norm();
    const bool stationary = q_stat <= kappa_t * q.s_full.norm() + condition_atol(m);
    const bool descent = qr_objective(m, q.shat, alpha) <= qr_objective(m, Vector::Zero(l), alpha);
    if (!stationary || !descent) ++qr_bad;

    // TR also sees indefinite curvature.
    ReducedModel mt = m;
    if (trial % 2 == 1) {
      Matrix a(l, l);
      for (Index i = 0; i < l; ++i) {
        for (Index j = 0; j < l; ++j) a(i, j) = rng.normal();
      }
      mt.bhat = 0.5 * (a + a.transpose());
    }
    const double cauchy = cauchy_decrease_bound(mt, alpha, abs_spectral_norm(mt.bhat), 0.5);
    for (TrStep step : {TrStep::Cauchy, TrStep::Dogleg}) {
      const StepResult t = solve_tr_step(mt, s, alpha, step);
      const bool inside = t.shat.norm() <= alpha * (1.0 + 1e-12);
      const bool enough = t.model_decrease >= cauchy * (1.0 - 1e-12);
      if (!inside || !enough) ++tr_bad;
    }
  }
  Outcome o;
  o.pass = qr_bad == 0 && tr_bad == 0;
  o.detail = fmt("%d models, %ld QR and %ld TR certificate violations", models, qr_bad, tr_bad);
  return o;
}

// Textbook trust-region Gauss-Newton with the Cauchy step, written against
// the dense Jacobian only.
struct ClassicalIterate {
  double f_after;
  bool successful;
};

std::vector<ClassicalIterate> classical_tr_gn(const NlsProblem& p, const SolverConfig& c,
                                              int iterations) {
  std::vector<ClassicalIterate> out;
  Vector x = p.x0;
  double f = 0.5 * p.residual(x).squaredNorm();
  int m = c.p;
  for (int k = 0; k < iterations; ++k) {
    const double radius = c.alpha_max * std::pow(c.gamma1, m);
    const Vector r = p.residual(x);
    const Matrix jac = p.jacobian(x);
    const Vector g = jac.transpose() * r;
    const Matrix b = jac.transpose() * jac;
    Vector step = Vector::Zero(p.d);
    double predicted = 0.0;
    const double gnorm = g.norm();
    if (gnorm > 0.0) {
      const double curvature = g.dot(b * g);
      double t = radius / gnorm;
      if (curvature > 0.0) t = std::min(t, gnorm * gnorm / curvature);
      step = -t * g;
      predicted = -(g.dot(step) + 0.5 * step.dot(b * step));
    }
    const double f_trial = 0.5 * p.residual(x + step).squaredNorm();
    const bool ok = std::isfinite(f_trial) && predicted > 0.0 &&
                    f - f_trial >= c.theta * predicted;
    if (ok) {
      x += step;
      f = f_trial;
      m = std::max(0, m - c.c);
    } else {
      m += 1;
    }
    out.push_back({f, ok});
  }
  return out;
}

Outcome full_space_equivalence() {
  constexpr int kIters = 100;
  SolverConfig c;
  c.variant = Variant::TrustRegion;
  c.tr_step = TrStep::Cauchy;
  c.stopping.max_iters = kIters;
  c.stopping.action_budget = std::numeric_limits<long long>::max() / 4;
  long pattern_mismatch = 0;
  double worst = 0.0;
  std::string problems;
  for (const char* name : {"broyden_tridiagonal", "boundary_value", "trigonometric"}) {
    const NlsProblem p = make_problem(name, 20);
    const RunTrace t = full_gn_reference(p, p.x0, c);
    const auto ref = classical_tr_gn(p, c, kIters);
    if (t.records.size() != ref.size()) {
      pattern_mismatch += kIters;
      continue;
    }
    for (std::size_t k = 0; k < ref.size(); ++k) {
      if (t.records[k].successful != ref[k].successful) ++pattern_mismatch;
      const double scale = std::max(1.0, std::abs(ref[k].f_after));
      worst = std::max(worst, std::abs(t.records[k].f_after - ref[k].f_after) / scale);
    }
    problems += (problems.empty() ? "" : ", ") + std::string(name);
  }
  Outcome o;
  o.pass = pattern_mismatch == 0 && worst <= 1e-12;
  o.detail = fmt("%d iterations on %s: %ld success-pattern mismatches, max f difference %.2e",
                 kIters, problems.c_str(), pattern_mismatch, worst);
  return o;
}

Outcome monotone_grid() {
  const auto start = Clock::now();
  nlohmann::json j = {
      {"problems", "all"},
      {"dimension", 30},
      {"grid",
       {{"variants", {"tr", "qr"}},
        {"sketches", {"gaussian", "hashing", "stable1hashing", "sampling"}},
        {"l_fractions", {0.1, 0.25, 0.5}}}},
      {"seeds", 20},
      {"output", scratch("grid").string()}};
  const ExperimentConfig config = experiment_from_json(j);
  const RunSet set = run_experiment(config);
  long monotone = 0;
  long lattice = 0;
  long other = 0;
  std::string first;
  for (const TraceFile& t : set.traces) {
    for (const std::string& issue : check_trace(t)) {
      if (issue.find("increase") != std::string::npos ||
          issue.find("monoton") != std::string::npos) {
        ++monotone;
      } else if (issue.find("alpha") != std::string::npos) {
        ++lattice;
      } else {
        ++other;
      }
      if (first.empty()) first = issue;
    }
  }
  Outcome o;
  o.pass = set.failures() == 0 && monotone == 0 && lattice == 0 && other == 0 &&
           set.traces.size() == set.entries.size();
  o.detail = fmt("%zu problems x 2 variants x 4 ensembles x 3 fractions x 20 seeds = %zu runs "
                 "(%zu failed): %ld monotonicity, %ld lattice, %ld other violations, %.1f s",
                 config.problems.size(), set.entries.size(), set.failures(), monotone, lattice,
                 other, seconds_since(start));
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome desk_scale_convergence() {
  const auto start = Clock::now();
  nlohmann::json j = {
      {"problems", "zero_residual"},
      {"dimension", 100},
      {"full_gn", true},
      {"grid",
       {{"sketches", {"gaussian", "hashing", "stable1hashing", "sampling"}},
        {"l_fractions", {0.1, 0.5}}}},
      {"seeds", 5},
      {"budget_multiplier", 50},
      {"output", scratch("desk").string()}};
  const ExperimentConfig config = experiment_from_json(j);
  const RunSet set = run_experiment(config);
  const auto profiles = compute_profiles(set.traces, 0.1, 50.0);
  double full = -1.0;
  for (const DataProfile& p : profiles) {
    if (p.solver == "full-gn") full = p.at(50.0);
  }
  long broken = 0;
  long above = 0;
  std::string table;
  for (const DataProfile& p : profiles) {
    if (!check_profile(p).empty()) ++broken;
    if (p.solver != "full-gn" && p.at(50.0) > full) ++above;
    table += fmt(" %s=%.2f", p.solver.c_str(), p.at(50.0));
  }
  Outcome o;
  o.pass = set.failures() == 0 && full >= 0.8 && broken == 0 && above == 0;
  o.detail = fmt("%zu problems, pi(50):%s; %ld non-monotone profiles, %ld above full GN, %.1f s",
                 config.problems.size(), table.c_str(), broken, above, seconds_since(start));
  return o;
}

Outcome chernoff_cells() {
  const auto start = Clock::now();
  long bad = 0;
  std::string cells;
  Rng root(7);
  std::uint64_t stream = 0;
  for (const auto& cell : testing::frozen_chernoff()) {
    const ChernoffResult r =
        verify_chernoff(cell.delta_s, cell.delta_1, cell.n, 100000, root.split(stream++));
    if (!r.within_bound()) ++bad;
    cells += fmt(" (%.2g,%.2g,%ld): %.2e<=%.2e", cell.delta_s, cell.delta_1, cell.n,
                 r.empirical, r.bound + 3.0 * r.sigma);
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = fmt("%ld of 8 cells above bound, %.1f s;%s", bad, seconds_since(start),
                 cells.c_str());
  return o;
}

bool close_rel(double a, double b, double tol = 1e-12) {
  return b == 0.0 ? a == 0.0 : std::abs(a - b) <= tol * std::abs(b);
}

Outcome bound_calculator() {
  long bad = 0;
  const ComplexityInputs base = testing::fixture_inputs();
  const DecreaseBound q = qr_h(base);
  const DecreaseBound t = tr_h(base);
  bad += !close_rel(q.alpha_low, testing::kQrDecrease.alpha_low);
  bad += q.tau_alpha != testing::kQrDecrease.tau;
  bad += !close_rel(q.h, testing::kQrDecrease.h);
  bad += !close_rel(t.alpha_low, testing::kTrDecrease.alpha_low);
  bad += t.tau_alpha != testing::kTrDecrease.tau;
  bad += !close_rel(t.h, testing::kTrDecrease.h);
  bad += !close_rel(tr_h_exact(base).h, testing::kTrExactH);
  for (const auto& f : testing::frozen_bounds()) {
    const IterationBound b = iteration_bound(f.in);
    bad += !close_rel(b.g, f.g);
    bad += !close_rel(b.n_real, f.n_real);
    bad += b.n != f.n;
    bad += !close_rel(b.failure_probability, f.fail, 1e-10);
    bad += !close_rel(b.d1, f.d1) + !close_rel(b.d2, f.d2) + !close_rel(b.d3, f.d3);
    bad += !close_rel(b.expectation_bound, f.expectation);
  }
  const long fixture_bad = bad;

  long sweep_bad = 0;
  double prev_qr = 0.0;
  double prev_tr = 0.0;
  for (double eps : {1e-1, 5e-2, 1e-2, 5e-3, 1e-3}) {
    ComplexityInputs in = base;
    in.eps = eps;
    const double nq = qr_iteration_bound(in).n_real;
    const double nt = tr_iteration_bound(in).n_real;
    sweep_bad += nq <= prev_qr || nt <= prev_tr;
    prev_qr = nq;
    prev_tr = nt;
  }
  double prev_h = 0.0;
  for (double h : {1.0, 1e-1, 1e-2, 1e-4}) {
    BoundInputs in = testing::frozen_bounds()[2].in;
    in.h = h;
    const double n = iteration_bound(in).n_real;
    sweep_bad += n <= prev_h;
    prev_h = n;
  }
  ComplexityInputs in = base;
  const double n1 = qr_iteration_bound(in).n_real;
  in.eps /= 2.0;
  const double ratio = qr_iteration_bound(in).n_real / n1;
  in = base;
  const double m1 = tr_iteration_bound(in).n_real;
  in.eps /= 2.0;
  const double tr_ratio = tr_iteration_bound(in).n_real / m1;
  const bool halving = ratio >= 3.5 && ratio <= 4.5 && tr_ratio >= 3.5 && tr_ratio <= 4.5;

  Outcome o;
  o.pass = fixture_bad == 0 && sweep_bad == 0 && halving;
  o.detail = fmt("%ld fixture mismatches, %ld sweep violations, eps-halving factor qr %.4f tr %.4f",
                 fixture_bad, sweep_bad, ratio, tr_ratio);
  return o;
}

double best_within_budget(const RunTrace& t, long long budget) {
  double best = t.f0;
  for (const IterationRecord& r : t.records) {
    if (r.actions_used > budget) break;
    best = std::min(best, r.f_after);
  }
  return best;
}

Outcome adaptive_vs_fixed() {
  const NlsProblem p = make_problem("bratu2d", 100);
  SolverConfig fixed;
  fixed.variant = Variant::TrustRegion;
  fixed.tr_step = TrStep::Dogleg;
  fixed.sketch.kind = SketchKind::ScaledGaussian;
  fixed.sketch.l = 10;
  fixed.stopping.max_iters = 1000000;
  fixed.stopping.action_budget = 50 * p.d;
  SolverConfig adaptive = fixed;
  adaptive.adaptive = AdaptiveOptions{0.5, 5};
  const long long budget = fixed.stopping.action_budget;

  int wins = 0;
  double worst_ratio = 0.0;
  constexpr int kSeeds = 20;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const std::uint64_t s = mix_seed(static_cast<std::uint64_t>(seed), 0x5eed);
    NlsObjective of(p);
    Rng rf(s);
    const RunTrace tf = run(of, p.x0, fixed, rf);
    NlsObjective oa(p);
    Rng ra(s);
    const RunTrace ta = run_adaptive(oa, p.x0, adaptive, ra);
    const double ff = best_within_budget(tf, budget);
    const double fa = best_within_budget(ta, budget);
    if (fa <= ff) ++wins;
    worst_ratio = std::max(worst_ratio, fa / std::max(ff, 1e-300));
  }
  Outcome o;
  o.pass = wins * 10 >= kSeeds * 7;
  o.detail = fmt("bratu2d d=100, l=10, budget %lld actions: adaptive <= fixed on %d/%d seeds",
                 budget, wins, kSeeds);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "ensemble structure", ensemble_structure},
      {2, "gaussian embedding rate", gaussian_embedding},
      {3, "step-condition certificates", step_certificates},
      {4, "full-space equivalence", full_space_equivalence},
      {5, "monotone decrease and step lattice", monotone_grid},
      {6, "desk-scale convergence", desk_scale_convergence},
      {7, "chernoff verifier", chernoff_cells},
      {8, "bound calculator", bound_calculator},
      {9, "adaptive subspace growth", adaptive_vs_fixed},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
