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

#include "rsopt/sketch.hpp"
#include "rsopt/types.hpp"

namespace rsopt {

/// Quadratic model in the sketched subspace:
///   m(shat) = f0 + <ghat, shat> + 1/2 <shat, bhat shat>
/// with ghat = S grad f(x), bhat = S B S^T and gram = S S^T.
struct ReducedModel {
  double f0 = 0.0;
  Vector ghat;
  Matrix bhat;
  Matrix gram;

  Index dim() const { return ghat.size(); }
  /// Throws std::invalid_argument on mismatched sizes or non-finite data.
  void validate() const;
};

double eval_model(const ReducedModel& model, const Vector& shat);

/// m(0) - m(shat), evaluated without forming f0 so it does not lose digits
/// to cancellation.
double model_decrease(const ReducedModel& model, const Vector& shat);

struct StepResult {
  Vector shat;
  Vector s_full;              // S^T shat
  double model_decrease = 0;  // m(0) - m(shat)
  double inner_residual = 0;  // QR: ||grad q(shat)||; TR: 0
};

/// Regularized model q(shat) = m(shat) + ||S^T shat||^2 / (2 alpha).
double qr_objective(const ReducedModel& model, const Vector& shat, double alpha);
Vector qr_gradient(const ReducedModel& model, const Vector& shat, double alpha);

/// Absolute slack used when certifying subproblem conditions.
double condition_atol(const ReducedModel& model);

/// Minimizes q by solving (bhat + gram / alpha) shat = -ghat.
///
/// The result always satisfies ||grad q(shat)|| <= kappa_t ||S^T shat|| + atol
/// and q(shat) <= q(0). When the system is singular (an empty hashing row),
/// a 1e-12 ridge is added, then an eigenvalue pseudo-inverse is tried.
StepResult solve_qr_step(const ReducedModel& model, const SketchMatrix& sketch,
                         double alpha, double kappa_t);

enum class TrStep { Cauchy, Dogleg };

/// Trust-region step with ||shat|| <= alpha and at least the Cauchy decrease.
/// Dogleg takes the better of the dogleg point and the Cauchy point.
StepResult solve_tr_step(const ReducedModel& model, const SketchMatrix& sketch,
                         double alpha, TrStep kind = TrStep::Cauchy);

/// Spectral norm of a symmetric PSD matrix by power iteration.
double spectral_norm_psd(const Matrix& b, double rel_tol = 1e-6, int max_iter = 500);

/// c7 ||ghat|| min(alpha, ||ghat|| / bnorm); bnorm == 0 means min = alpha.
double cauchy_decrease_bound(const ReducedModel& model, double alpha, double bnorm,
                             double c7 = 0.5);

}  // namespace rsopt
