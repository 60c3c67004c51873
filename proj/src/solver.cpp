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


#include "rsopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rsopt {
namespace {

StepResult compute_step(const SolverConfig& config, const ReducedModel& model,
                        const SketchMatrix& sketch, double alpha) {
  if (config.variant == Variant::QuadReg) {
    return solve_qr_step(model, sketch, alpha, config.kappa_t);
  }
  return solve_tr_step(model, sketch, alpha, config.tr_step);
}

SketchMatrix draw_for_run(const SketchSpec& spec, Rng& rng) {
  if (spec.kind == SketchKind::Identity) return SketchMatrix::identity(spec.d);
  return draw(spec, rng);
}

RunTrace run_impl(SubspaceObjective& objective, const Vector& x0,
                  const SolverConfig& config, Rng& rng, bool adaptive) {
  const Index d = objective.dim();
  config.validate(d);
  if (x0.size() != d) throw std::invalid_argument("x0 has the wrong dimension");
  if (!x0.allFinite()) throw std::invalid_argument("x0 must be finite");
  if (adaptive && !config.adaptive) {
    throw std::invalid_argument("run_adaptive needs adaptive options in the config");
  }

  SketchSpec spec = config.sketch;
  spec.d = d;
  if (spec.kind == SketchKind::Identity) spec.l = d;
  if (spec.kind == SketchKind::SHashing) spec.s = std::min(spec.s, spec.l);
  spec.validate();

  RunTrace trace;
  trace.config = config;
  trace.config.sketch = spec;
  trace.seed = rng.seed();
  trace.x0 = x0;

  Vector x = x0;
  double f = objective.value(x);
  if (!std::isfinite(f)) throw std::invalid_argument("objective is not finite at x0");
  trace.f0 = f;

  const bool monitor = config.stopping.grad_tol > 0.0 || config.diagnostics.has_value();
  const long long budget = config.budget_for(d);
  int exponent = config.p;

  for (long k = 0;; ++k) {
    std::optional<Vector> grad;
    if (monitor) {
      grad = objective.gradient(x);
      ++trace.monitor_calls;
      if (grad && config.stopping.grad_tol > 0.0 && grad->norm() <= config.stopping.grad_tol) {
        trace.termination = Termination::GradTol;
        break;
      }
    }
    if (k >= config.stopping.max_iters) {
      trace.termination = Termination::MaxIters;
      break;
    }
    if (objective.actions() >= budget) {
      trace.termination = Termination::Budget;
      break;
    }

    const double alpha = config.alpha_at(exponent);
    SketchMatrix sketch = draw_for_run(spec, rng);
    ReducedModel model = objective.reduced_model(x, sketch);
    StepResult step = compute_step(config, model, sketch, alpha);

    if (adaptive) {
      const AdaptiveOptions& opts = *config.adaptive;
      while (eval_model(model, step.shat) > opts.kappa * model.f0 && sketch.rows() < d) {
        GrownSketch grown = grow_sketch(sketch, sketch.rows() + opts.l_increment, rng);
        model = objective.grow_model(x, grown.sketch, grown.reused, grown.scale);
        sketch = std::move(grown.sketch);
        step = compute_step(config, model, sketch, alpha);
      }
    }

    IterationRecord rec;
    rec.k = k;
    rec.f_before = f;
    rec.alpha = alpha;
    rec.alpha_exponent = exponent;
    rec.l = sketch.rows();
    rec.model_decrease = step.model_decrease;
    rec.step_norm = step.s_full.norm();
    if (grad) {
      rec.grad_norm = grad->norm();
      if (config.diagnostics) {
        rec.true_iter = classify_true(*grad, sketch, config.diagnostics->eps_s,
                                      config.diagnostics->s_max);
      }
    }

    const Vector x_trial = x + step.s_full;
    rec.f_trial = objective.value(x_trial);
    rec.successful = sufficient_decrease(f, rec.f_trial, step.model_decrease, config.theta);
    if (rec.successful) {
      x = x_trial;
      f = rec.f_trial;
      exponent = std::max(0, exponent - config.c);
    } else {
      exponent += 1;
    }
    rec.f_after = f;
    rec.actions_used = objective.actions();
    trace.records.push_back(rec);
  }

  trace.x_final = x;
  trace.f_final = f;
  return trace;
}

}  // namespace

FunctionObjective::FunctionObjective(Index dim, Value f, Gradient grad, Hessian b)
    : dim_(dim), f_(std::move(f)), grad_(std::move(grad)), b_(std::move(b)) {
  if (dim_ < 1) throw std::invalid_argument("FunctionObjective: dim must be >= 1");
  if (!f_ || !grad_) throw std::invalid_argument("FunctionObjective: f and grad are required");
}

ReducedModel FunctionObjective::reduced_model(const Vector& x, const SketchMatrix& sketch) {
  ReducedModel m;
  m.f0 = f_(x);
  m.ghat = sketch.apply(grad_(x));
  m.gram = sketch.gram();
  if (b_) {
    const Matrix s = sketch.to_dense();
    m.bhat = s * b_(x) * s.transpose();
    m.bhat = 0.5 * (m.bhat + m.bhat.transpose());
  } else {
    m.bhat = Matrix::Zero(sketch.rows(), sketch.rows());
  }
  actions_ += sketch.rows();
  return m;
}

std::string_view to_string(Variant v) {
  return v == Variant::QuadReg ? "qr" : "tr";
}

Variant parse_variant(std::string_view name) {
  if (name == "qr") return Variant::QuadReg;
  if (name == "tr") return Variant::TrustRegion;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (qr|tr)");
}

std::string_view to_string(TrStep s) {
  return s == TrStep::Cauchy ? "cauchy" : "dogleg";
}

TrStep parse_tr_step(std::string_view name) {
  if (name == "cauchy") return TrStep::Cauchy;
  if (name == "dogleg") return TrStep::Dogleg;
  throw std::invalid_argument("unknown trust-region step '" + std::string(name) +
                              "' (cauchy|dogleg)");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::GradTol: return "grad_tol";
    case Termination::MaxIters: return "max_iters";
    case Termination::Budget: return "budget";
  }
  return "unknown";
}

Termination parse_termination(std::string_view name) {
  for (auto t : {Termination::GradTol, Termination::MaxIters, Termination::Budget}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown termination '" + std::string(name) + "'");
}

double SolverConfig::gamma2() const { return std::pow(gamma1, -c); }

double SolverConfig::alpha_at(int exponent) const {
  return alpha_max * std::pow(gamma1, exponent);
}

long long SolverConfig::budget_for(Index d) const {
  return stopping.action_budget > 0 ? stopping.action_budget : 50LL * d;
}

void SolverConfig::validate(Index d) const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("solver config: " + what);
  };
  if (!(gamma1 > 0.0 && gamma1 < 1.0)) fail("gamma1 must lie in (0, 1)");
  if (c < 1) fail("c must be a positive integer");
  if (p < 1) fail("p must be a positive integer");
  if (!(theta > 0.0 && theta < 1.0)) fail("theta must lie in (0, 1)");
  if (!(alpha_max > 0.0) || !std::isfinite(alpha_max)) fail("alpha_max must be positive");
  if (!(kappa_t >= 0.0)) fail("kappa_T must be >= 0");
  if (stopping.max_iters < 0) fail("max_iters must be >= 0");
  if (sketch.kind != SketchKind::Identity && (sketch.l < 1 || sketch.l > d)) {
    fail("sketch dimension l must lie in [1, d]");
  }
  if (adaptive) {
    if (!(adaptive->kappa > 0.0 && adaptive->kappa < 1.0)) fail("kappa must lie in (0, 1)");
    if (adaptive->l_increment < 1) fail("l_increment must be >= 1");
  }
  if (diagnostics && !(diagnostics->eps_s > 0.0 && diagnostics->eps_s < 1.0)) {
    fail("diagnostic eps_s must lie in (0, 1)");
  }
}

bool sufficient_decrease(double f_before, double f_trial, double model_decrease,
                         double theta) {
  if (!std::isfinite(f_trial) || !(model_decrease > 0.0)) return false;
  return f_before - f_trial >= theta * model_decrease;
}

double update_alpha(double alpha, bool successful, const SolverConfig& config) {
  return successful ? std::min(config.alpha_max, config.gamma2() * alpha)
                    : config.gamma1 * alpha;
}

bool classify_true(const Vector& full_grad, const SketchMatrix& sketch, double eps_s,
                   double s_max) {
  const double sketched = sketch.apply(full_grad).squaredNorm();
  const bool embeds = sketched >= (1.0 - eps_s) * full_grad.squaredNorm();
  return embeds && sketch.spectral_norm() <= s_max;
}

RunTrace run(SubspaceObjective& objective, const Vector& x0, const SolverConfig& config,
             Rng& rng) {
  return run_impl(objective, x0, config, rng, false);
}

RunTrace run_adaptive(SubspaceObjective& objective, const Vector& x0,
                      const SolverConfig& config, Rng& rng) {
  return run_impl(objective, x0, config, rng, true);
}

}  // namespace rsopt
