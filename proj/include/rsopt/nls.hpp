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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsopt/model.hpp"
#include "rsopt/sketch.hpp"
#include "rsopt/solver.hpp"
#include "rsopt/types.hpp"

namespace rsopt {

/// Nonlinear least squares f(x) = 1/2 ||r(x)||^2 with a Jacobian-action
/// oracle v -> J(x) v. Instances are immutable and safe to share.
struct NlsProblem {
  using Residual = std::function<Vector(const Vector&)>;
  using JacobianAction = std::function<Vector(const Vector& x, const Vector& v)>;

  std::string name;
  Index d = 0;
  Index n = 0;
  Residual residual;
  JacobianAction jacobian_action;
  Vector x0;
  bool zero_residual = false;
  std::optional<double> f_star;
  std::optional<Vector> x_star;

  double value(const Vector& x) const;
  /// J(x)^T r(x), assembled from d coordinate actions. Not counted.
  Vector gradient(const Vector& x) const;
  /// Dense J(x) from d coordinate actions. Not counted.
  Matrix jacobian(const Vector& x) const;
};

class ActionCounter {
 public:
  void add(long long n) { count_ += n; }
  long long count() const { return count_; }

 private:
  long long count_ = 0;
};

/// Gauss-Newton model restricted to the rows of S:
/// js = J(x) S^T, ghat = js^T r0, bhat = js^T js.
struct SketchedGnModel {
  Matrix js;
  Vector r0;
  ReducedModel model;
};

/// Builds the sketched model with one Jacobian action per row of S.
SketchedGnModel build_gn_model(const NlsProblem& problem, const Vector& x,
                               const SketchMatrix& sketch, ActionCounter& counter);

/// Adapter that lets the solver drive an NlsProblem. Keeps the last reduced
/// Jacobian so a grown sketch only pays for its new rows.
class NlsObjective final : public SubspaceObjective {
 public:
  explicit NlsObjective(const NlsProblem& problem) : problem_(problem) {}

  Index dim() const override { return problem_.d; }
  double value(const Vector& x) override;
  ReducedModel reduced_model(const Vector& x, const SketchMatrix& sketch) override;
  ReducedModel grow_model(const Vector& x, const SketchMatrix& sketch, Index reused,
                          double scale) override;
  std::optional<Vector> gradient(const Vector& x) override { return problem_.gradient(x); }
  long long actions() const override { return counter_.count(); }

  long long residual_evaluations() const { return residual_evals_; }

 private:
  const NlsProblem& problem_;
  ActionCounter counter_;
  long long residual_evals_ = 0;
  Matrix last_js_;
  Vector last_x_;
};

/// Classical full-space Gauss-Newton baseline: the solver with the identity
/// sketch, so each iteration costs d actions.
RunTrace full_gn_reference(const NlsProblem& problem, const Vector& x0,
                           SolverConfig config);

}  // namespace rsopt
