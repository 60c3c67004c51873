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


#include "rsopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace rsopt {
namespace {

void check_dims(const ReducedModel& model, const Vector& shat) {
  if (shat.size() != model.dim()) {
    throw std::invalid_argument("reduced model has dimension " +
                                std::to_string(model.dim()) + ", step has " +
                                std::to_string(shat.size()));
  }
}

void check_inputs(const ReducedModel& model, const SketchMatrix& sketch, double alpha) {
  model.validate();
  if (sketch.rows() != model.dim()) {
    throw std::invalid_argument("sketch rows do not match reduced model dimension");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be positive and finite");
  }
}

StepResult finish(const ReducedModel& model, const SketchMatrix& sketch, Vector shat,
                  double inner_residual) {
  StepResult r;
  r.s_full = sketch.apply_transpose(shat);
  r.model_decrease = model_decrease(model, shat);
  r.shat = std::move(shat);
  r.inner_residual = inner_residual;
  return r;
}

StepResult zero_step(const ReducedModel& model, const SketchMatrix& sketch) {
  return finish(model, sketch, Vector::Zero(model.dim()), 0.0);
}

bool qr_conditions_hold(const ReducedModel& model, const Vector& shat, double alpha,
                        double kappa_t, double* residual) {
  if (!shat.allFinite()) return false;
  const double grad_norm = qr_gradient(model, shat, alpha).norm();
  *residual = grad_norm;
  const double step_norm = std::sqrt(std::max(0.0, shat.dot(model.gram * shat)));
  const double atol = condition_atol(model);
  // q(shat) - q(0), without the f0 term.
  const double q_change = -model_decrease(model, shat) + 0.5 * step_norm * step_norm / alpha;
  return grad_norm <= kappa_t * step_norm + atol && q_change <= 0.0;
}

// One round of iterative refinement on a factorized system.
template <typename Solver>
Vector solve_refined(const Solver& solver, const Matrix& a, const Vector& rhs) {
  Vector x = solver.solve(rhs);
  if (!x.allFinite()) return x;
  const Vector r = rhs - a * x;
  const Vector dx = solver.solve(r);
  if (dx.allFinite()) x += dx;
  return x;
}

Vector pseudo_inverse_solve(const Matrix& a, const Vector& rhs) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector& w = eig.eigenvalues();
  const double cutoff = std::max(w.cwiseAbs().maxCoeff(), 1.0) *
                        static_cast<double>(a.rows()) *
                        std::numeric_limits<double>::epsilon();
  Vector coeffs = eig.eigenvectors().transpose() * rhs;
  for (Index i = 0; i < coeffs.size(); ++i) {
    coeffs[i] = w[i] > cutoff ? coeffs[i] / w[i] : 0.0;
  }
  return eig.eigenvectors() * coeffs;
}

Vector cauchy_point(const ReducedModel& model, double alpha) {
  const double gnorm = model.ghat.norm();
  const double curvature = model.ghat.dot(model.bhat * model.ghat);
  double t = alpha / gnorm;
  if (curvature > 0.0) t = std::min(t, model.ghat.squaredNorm() / curvature);
  return -t * model.ghat;
}

std::optional<Vector> dogleg_point(const ReducedModel& model, double alpha) {
  Eigen::LDLT<Matrix> ldlt(model.bhat);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Vector& diag = ldlt.vectorD();
  if (diag.minCoeff() <= 1e-14 * std::max(1.0, diag.maxCoeff())) return std::nullopt;
  const Vector newton = ldlt.solve(-model.ghat);
  if (!newton.allFinite()) return std::nullopt;
  if (newton.norm() <= alpha) return newton;

  const double curvature = model.ghat.dot(model.bhat * model.ghat);
  if (!(curvature > 0.0)) return std::nullopt;
  const Vector unconstrained = -(model.ghat.squaredNorm() / curvature) * model.ghat;
  if (unconstrained.norm() >= alpha) return std::nullopt;  // Cauchy point on boundary

  // ||pu + tau (pn - pu)|| = alpha, tau in [0, 1].
  const Vector dir = newton - unconstrained;
  const double a = dir.squaredNorm();
  const double b = 2.0 * unconstrained.dot(dir);
  const double c = unconstrained.squaredNorm() - alpha * alpha;
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
  const double tau = (-b + disc) / (2.0 * a);
  return Vector(unconstrained + std::clamp(tau, 0.0, 1.0) * dir);
}

}  // namespace

void ReducedModel::validate() const {
  const Index l = ghat.size();
  if (bhat.rows() != l || bhat.cols() != l || gram.rows() != l || gram.cols() != l) {
    throw std::invalid_argument("reduced model: ghat, bhat and gram sizes disagree");
  }
  if (!std::isfinite(f0) || !ghat.allFinite() || !bhat.allFinite() || !gram.allFinite()) {
    throw std::invalid_argument("reduced model contains NaN or Inf");
  }
}

double eval_model(const ReducedModel& model, const Vector& shat) {
  check_dims(model, shat);
  return model.f0 + model.ghat.dot(shat) + 0.5 * shat.dot(model.bhat * shat);
}

double model_decrease(const ReducedModel& model, const Vector& shat) {
  check_dims(model, shat);
  return -(model.ghat.dot(shat) + 0.5 * shat.dot(model.bhat * shat));
}

double qr_objective(const ReducedModel& model, const Vector& shat, double alpha) {
  return eval_model(model, shat) + 0.5 * shat.dot(model.gram * shat) / alpha;
}

Vector qr_gradient(const ReducedModel& model, const Vector& shat, double alpha) {
  check_dims(model, shat);
  return model.ghat + model.bhat * shat + (model.gram * shat) / alpha;
}

double condition_atol(const ReducedModel& model) {
  return 1e-10 * std::max(1.0, model.ghat.norm());
}

StepResult solve_qr_step(const ReducedModel& model, const SketchMatrix& sketch,
                         double alpha, double kappa_t) {
  check_inputs(model, sketch, alpha);
  if (!(kappa_t >= 0.0)) throw std::invalid_argument("kappa_T must be >= 0");
  if (model.ghat.isZero(0.0)) return zero_step(model, sketch);

  const Index l = model.dim();
  Matrix a = model.bhat + model.gram / alpha;
  a = 0.5 * (a + a.transpose());
  const Vector rhs = -model.ghat;
  double residual = 0.0;

  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() == Eigen::Success) {
    Vector shat = solve_refined(ldlt, a, rhs);
    if (qr_conditions_hold(model, shat, alpha, kappa_t, &residual)) {
      return finish(model, sketch, std::move(shat), residual);
    }
  }

  const double ridge = 1e-12 * std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  const Matrix ridged = a + ridge * Matrix::Identity(l, l);
  Eigen::LDLT<Matrix> ridged_ldlt(ridged);
  if (ridged_ldlt.info() == Eigen::Success) {
    Vector shat = solve_refined(ridged_ldlt, ridged, rhs);
    if (qr_conditions_hold(model, shat, alpha, kappa_t, &residual)) {
      return finish(model, sketch, std::move(shat), residual);
    }
  }

  Vector shat = pseudo_inverse_solve(a, rhs);
  if (qr_conditions_hold(model, shat, alpha, kappa_t, &residual)) {
    return finish(model, sketch, std::move(shat), residual);
  }
  throw std::runtime_error("solve_qr_step: no step satisfies the stationarity condition");
}

StepResult solve_tr_step(const ReducedModel& model, const SketchMatrix& sketch,
                         double alpha, TrStep kind) {
  check_inputs(model, sketch, alpha);
  if (model.ghat.isZero(0.0)) return zero_step(model, sketch);

  Vector shat = cauchy_point(model, alpha);
  if (kind == TrStep::Dogleg) {
    if (auto candidate = dogleg_point(model, alpha)) {
      if (candidate->norm() <= alpha * (1.0 + 1e-14) &&
          model_decrease(model, *candidate) >= model_decrease(model, shat)) {
        shat = std::move(*candidate);
      }
    }
  }
  return finish(model, sketch, std::move(shat), 0.0);
}

double spectral_norm_psd(const Matrix& b, double rel_tol, int max_iter) {
  if (b.size() == 0) return 0.0;
  Vector v = Vector::Ones(b.rows()) / std::sqrt(static_cast<double>(b.rows()));
  // Deterministic start; nudge it off any symmetric subspace.
  for (Index i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = b * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / wn;
    if (std::abs(next - lambda) <= rel_tol * std::abs(next)) return std::max(next, wn);
    lambda = next;
  }
  return (b * v).norm();
}

double cauchy_decrease_bound(const ReducedModel& model, double alpha, double bnorm,
                             double c7) {
  const double gnorm = model.ghat.norm();
  const double reach = bnorm > 0.0 ? std::min(alpha, gnorm / bnorm) : alpha;
  return c7 * gnorm * reach;
}

}  // namespace rsopt
