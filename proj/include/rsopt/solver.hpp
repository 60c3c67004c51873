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
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "rsopt/model.hpp"
#include "rsopt/rng.hpp"
#include "rsopt/sketch.hpp"
#include "rsopt/types.hpp"

namespace rsopt {

/// An objective that can produce sketched quadratic models.
///
/// Implementations count their own derivative work in actions(); the
/// solver reads the count but never charges gradient monitoring to it.
class SubspaceObjective {
 public:
  virtual ~SubspaceObjective() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) = 0;
  virtual ReducedModel reduced_model(const Vector& x, const SketchMatrix& sketch) = 0;

  /// Model for a grown sketch whose first `reused` rows are `scale` times the
  /// rows of the sketch passed to the previous reduced_model/grow_model call
  /// at the same x. The default rebuilds from scratch.
  virtual ReducedModel grow_model(const Vector& x, const SketchMatrix& sketch,
                                  Index reused, double scale) {
    (void)reused;
    (void)scale;
    return reduced_model(x, sketch);
  }

  /// Full gradient for stopping and diagnostics, if the problem offers one.
  virtual std::optional<Vector> gradient(const Vector& x) {
    (void)x;
    return std::nullopt;
  }

  /// Cumulative derivative actions spent building models.
  virtual long long actions() const = 0;
};

/// Objective from callbacks: f, grad f and an optional PSD B(x) (default 0).
/// Each model build costs l actions (one directional derivative per row).
class FunctionObjective final : public SubspaceObjective {
 public:
  using Value = std::function<double(const Vector&)>;
  using Gradient = std::function<Vector(const Vector&)>;
  using Hessian = std::function<Matrix(const Vector&)>;

  FunctionObjective(Index dim, Value f, Gradient grad, Hessian b = nullptr);

  Index dim() const override { return dim_; }
  double value(const Vector& x) override { return f_(x); }
  ReducedModel reduced_model(const Vector& x, const SketchMatrix& sketch) override;
  std::optional<Vector> gradient(const Vector& x) override { return grad_(x); }
  long long actions() const override { return actions_; }

 private:
  Index dim_;
  Value f_;
  Gradient grad_;
  Hessian b_;
  long long actions_ = 0;
};

enum class Variant { QuadReg, TrustRegion };
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
std::string_view to_string(TrStep s);
TrStep parse_tr_step(std::string_view name);

struct AdaptiveOptions {
  double kappa = 0.5;        // accept when m(shat) <= kappa m(0)
  Index l_increment = 1;
};

struct StoppingRule {
  double grad_tol = 0.0;          // <= 0 disables the gradient test
  long max_iters = 1000;
  long long action_budget = 0;    // <= 0 means 50 d
};

/// Diagnostic classification of iterations as true; needs the full gradient.
struct TrueIterationCheck {
  double eps_s = 0.5;
  double s_max = 1.0;
};

struct SolverConfig {
  double gamma1 = 0.5;
  int c = 1;                // gamma2 = gamma1^-c
  int p = 1;                // alpha0 = alpha_max gamma1^p
  double theta = 1e-4;
  double alpha_max = 100.0;
  Variant variant = Variant::TrustRegion;
  SketchSpec sketch;        // kind, l and s; d and seed are taken from the run
  double kappa_t = 0.01;
  TrStep tr_step = TrStep::Cauchy;
  std::optional<AdaptiveOptions> adaptive;
  StoppingRule stopping;
  std::optional<TrueIterationCheck> diagnostics;

  double gamma2() const;
  double alpha0() const { return alpha_at(p); }
  /// alpha_max gamma1^m.
  double alpha_at(int exponent) const;
  long long budget_for(Index d) const;
  void validate(Index d) const;
};

struct IterationRecord {
  long k = 0;
  double f_before = 0.0;
  double f_trial = 0.0;      // may be NaN or Inf
  double f_after = 0.0;
  double alpha = 0.0;
  int alpha_exponent = 0;    // alpha = alpha_max gamma1^alpha_exponent
  Index l = 0;
  bool successful = false;
  std::optional<bool> true_iter;
  double model_decrease = 0.0;
  double step_norm = 0.0;    // ||S^T shat||
  long long actions_used = 0;
  std::optional<double> grad_norm;  // at x_k, when monitored
};

enum class Termination { GradTol, MaxIters, Budget };
std::string_view to_string(Termination t);
Termination parse_termination(std::string_view name);

struct RunTrace {
  SolverConfig config;
  std::vector<IterationRecord> records;
  Vector x0;
  Vector x_final;
  double f0 = 0.0;
  double f_final = 0.0;
  Termination termination = Termination::MaxIters;
  std::uint64_t seed = 0;
  long long monitor_calls = 0;  // full-gradient evaluations, not budgeted
};

/// The sufficient decrease test. A zero (or negative) model decrease and a
/// non-finite trial value are never successful.
bool sufficient_decrease(double f_before, double f_trial, double model_decrease,
                         double theta);

/// Step-parameter update: min(alpha_max, gamma2 alpha) after a successful
/// iteration and gamma1 alpha otherwise. The solver tracks the exponent m
/// of alpha = alpha_max gamma1^m instead, which gives the same values
/// without rounding drift.
double update_alpha(double alpha, bool successful, const SolverConfig& config);

/// ||S g||^2 >= (1 - eps_s) ||g||^2 and ||S||_2 <= s_max.
bool classify_true(const Vector& full_grad, const SketchMatrix& sketch, double eps_s,
                   double s_max);

RunTrace run(SubspaceObjective& objective, const Vector& x0, const SolverConfig& config,
             Rng& rng);

/// As run(), but within each iteration l grows by l_increment (capped at d)
/// until m(shat) <= kappa m(0) or l == d.
RunTrace run_adaptive(SubspaceObjective& objective, const Vector& x0,
                      const SolverConfig& config, Rng& rng);

}  // namespace rsopt
