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


#include "rsopt/nls.hpp"

#include <stdexcept>

namespace rsopt {
namespace {

ReducedModel model_from_js(const Matrix& js, const Vector& r0, const SketchMatrix& sketch) {
  ReducedModel m;
  m.f0 = 0.5 * r0.squaredNorm();
  m.ghat = js.transpose() * r0;
  m.bhat = js.transpose() * js;
  m.gram = sketch.gram();
  return m;
}

Vector checked_residual(const NlsProblem& problem, const Vector& x) {
  if (!x.allFinite()) throw std::invalid_argument(problem.name + ": x is not finite");
  Vector r = problem.residual(x);
  if (!r.allFinite()) {
    throw std::invalid_argument(problem.name + ": residual is not finite at x");
  }
  return r;
}

}  // namespace

double NlsProblem::value(const Vector& x) const {
  return 0.5 * residual(x).squaredNorm();
}

Vector NlsProblem::gradient(const Vector& x) const {
  const Vector r = residual(x);
  Vector g(d);
  for (Index j = 0; j < d; ++j) g[j] = jacobian_action(x, Vector::Unit(d, j)).dot(r);
  return g;
}

Matrix NlsProblem::jacobian(const Vector& x) const {
  Matrix j(n, d);
  for (Index c = 0; c < d; ++c) j.col(c) = jacobian_action(x, Vector::Unit(d, c));
  return j;
}

SketchedGnModel build_gn_model(const NlsProblem& problem, const Vector& x,
                               const SketchMatrix& sketch, ActionCounter& counter) {
  if (sketch.cols() != problem.d) {
    throw std::invalid_argument("build_gn_model: sketch has the wrong number of columns");
  }
  SketchedGnModel out;
  out.r0 = checked_residual(problem, x);
  const Index l = sketch.rows();
  out.js.resize(problem.n, l);
  for (Index i = 0; i < l; ++i) {
    out.js.col(i) = problem.jacobian_action(x, sketch.row(i));
  }
  counter.add(l);
  out.model = model_from_js(out.js, out.r0, sketch);
  return out;
}

double NlsObjective::value(const Vector& x) {
  ++residual_evals_;
  return problem_.value(x);
}

ReducedModel NlsObjective::reduced_model(const Vector& x, const SketchMatrix& sketch) {
  ++residual_evals_;
  SketchedGnModel gn = build_gn_model(problem_, x, sketch, counter_);
  last_js_ = std::move(gn.js);
  last_x_ = x;
  return std::move(gn.model);
}

ReducedModel NlsObjective::grow_model(const Vector& x, const SketchMatrix& sketch,
                                      Index reused, double scale) {
  if (reused <= 0 || last_x_.size() != x.size() || last_x_ != x ||
      last_js_.cols() < reused) {
    return reduced_model(x, sketch);
  }
  ++residual_evals_;
  const Vector r0 = checked_residual(problem_, x);
  const Index l = sketch.rows();
  Matrix js(problem_.n, l);
  // J (c v) = c J v, so rescaled rows reuse the earlier actions.
  js.leftCols(reused) = scale * last_js_.leftCols(reused);
  for (Index i = reused; i < l; ++i) {
    js.col(i) = problem_.jacobian_action(x, sketch.row(i));
  }
  counter_.add(l - reused);
  last_js_ = js;
  return model_from_js(js, r0, sketch);
}

RunTrace full_gn_reference(const NlsProblem& problem, const Vector& x0,
                           SolverConfig config) {
  config.sketch = SketchSpec{SketchKind::Identity, problem.d, problem.d, 1, 0};
  config.adaptive.reset();
  NlsObjective objective(problem);
  Rng rng(0);
  return run(objective, x0, config, rng);
}

}  // namespace rsopt
