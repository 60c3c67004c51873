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


#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "rsopt/nls.hpp"
#include "rsopt/problems.hpp"

namespace rsopt {
namespace {

// r(x) = A x - b with a fixed 5 x 3 matrix.
NlsProblem linear_problem() {
  Matrix a(5, 3);
  a << 1, 2, 0,  //
      0, 1, -1,  //
      3, 0, 1,   //
      1, 1, 1,   //
      -2, 0, 4;
  Vector b(5);
  b << 1, -2, 0.5, 3, 1;
  NlsProblem p;
  p.name = "linear";
  p.d = 3;
  p.n = 5;
  p.residual = [a, b](const Vector& x) { return Vector(a * x - b); };
  p.jacobian_action = [a](const Vector&, const Vector& v) { return Vector(a * v); };
  p.x0 = Vector::Zero(3);
  return p;
}

TEST(BuildGnModel, LinearResidualMatchesExplicitFormulas) {
  const NlsProblem p = linear_problem();
  const SketchMatrix s = draw(SketchSpec{SketchKind::ScaledGaussian, 2, 3, 1, 9});
  const Vector x{{0.3, -0.7, 1.1}};
  ActionCounter counter;
  const SketchedGnModel gn = build_gn_model(p, x, s, counter);

  const Matrix j = p.jacobian(x);
  const Matrix sd = s.to_dense();
  const Vector r = p.residual(x);
  EXPECT_LE((gn.js - j * sd.transpose()).norm(), 1e-13);
  EXPECT_LE((gn.model.ghat - sd * j.transpose() * r).norm(), 1e-12);
  EXPECT_LE((gn.model.bhat - sd * j.transpose() * j * sd.transpose()).norm(), 1e-12);
  EXPECT_LE((gn.model.gram - sd * sd.transpose()).norm(), 1e-14);
  EXPECT_DOUBLE_EQ(gn.model.f0, 0.5 * r.squaredNorm());
  EXPECT_EQ(counter.count(), 2);

  // For a linear residual the model is exact along the subspace.
  const Vector shat{{0.4, -0.25}};
  EXPECT_NEAR(eval_model(gn.model, shat), p.value(x + sd.transpose() * shat), 1e-12);
}

TEST(BuildGnModel, SingleSampledRowMatchesFiniteDifferences) {
  const NlsProblem p = make_problem("broyden_tridiagonal", 10);
  const SketchMatrix s = draw(SketchSpec{SketchKind::ScaledSampling, 1, 10, 1, 4});
  const Vector row = s.row(0);
  ActionCounter counter;
  const SketchedGnModel gn = build_gn_model(p, p.x0, s, counter);
  const double h = 1e-6;
  const Vector fd = (p.residual(p.x0 + h * row) - p.residual(p.x0 - h * row)) / (2.0 * h);
  EXPECT_LE((gn.js.col(0) - fd).norm(), 1e-7 * (1.0 + fd.norm()));
  EXPECT_EQ(counter.count(), 1);
}

TEST(BuildGnModel, RejectsMismatchedSketch) {
  const NlsProblem p = linear_problem();
  ActionCounter counter;
  EXPECT_THROW(build_gn_model(p, p.x0, SketchMatrix::identity(4), counter),
               std::invalid_argument);
}

TEST(BuildGnModel, ReducedHessianIsPositiveSemidefinite) {
  const NlsProblem p = make_problem("trigonometric", 20);
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    const SketchMatrix s = draw(SketchSpec{SketchKind::SHashing, 6, 20, 2, 0}, rng);
    ActionCounter counter;
    const SketchedGnModel gn = build_gn_model(p, p.x0, s, counter);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gn.model.bhat, Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12 * (1.0 + eig.eigenvalues().maxCoeff()));
  }
}

TEST(BuildGnModel, IdentitySketchGivesFullGradient) {
  const NlsProblem p = make_problem("boundary_value", 12);
  ActionCounter counter;
  const SketchedGnModel gn = build_gn_model(p, p.x0, SketchMatrix::identity(12), counter);
  EXPECT_LE((gn.model.ghat - p.gradient(p.x0)).norm(), 1e-13);
  EXPECT_EQ(counter.count(), 12);
}

TEST(ActionCounter, IsAdditive) {
  ActionCounter c;
  c.add(5);
  c.add(7);
  EXPECT_EQ(c.count(), 12);
}

TEST(NlsObjective, GrowModelReusesRescaledActions) {
  const NlsProblem p = make_problem("broyden_banded", 15);
  NlsObjective obj(p);
  Rng rng(8);
  const SketchMatrix s = draw(SketchSpec{SketchKind::ScaledGaussian, 3, 15, 1, 0}, rng);
  obj.reduced_model(p.x0, s);
  EXPECT_EQ(obj.actions(), 3);
  GrownSketch grown = grow_sketch(s, 5, rng);
  ASSERT_EQ(grown.reused, 3);
  const ReducedModel reused = obj.grow_model(p.x0, grown.sketch, grown.reused, grown.scale);
  EXPECT_EQ(obj.actions(), 5);

  ActionCounter fresh_counter;
  const SketchedGnModel fresh = build_gn_model(p, p.x0, grown.sketch, fresh_counter);
  EXPECT_LE((reused.ghat - fresh.model.ghat).norm(), 1e-12 * (1.0 + fresh.model.ghat.norm()));
  EXPECT_LE((reused.bhat - fresh.model.bhat).norm(), 1e-12 * (1.0 + fresh.model.bhat.norm()));
}

TEST(NlsObjective, GrowModelAtNewPointRebuilds) {
  const NlsProblem p = make_problem("broyden_banded", 15);
  NlsObjective obj(p);
  Rng rng(8);
  const SketchMatrix s = draw(SketchSpec{SketchKind::ScaledGaussian, 3, 15, 1, 0}, rng);
  obj.reduced_model(p.x0, s);
  GrownSketch grown = grow_sketch(s, 5, rng);
  obj.grow_model(Vector::Zero(15), grown.sketch, grown.reused, grown.scale);
  EXPECT_EQ(obj.actions(), 8);
}

TEST(FullGnReference, SolvesLinearLeastSquares) {
  const NlsProblem p = linear_problem();
  const Matrix a = p.jacobian(p.x0);
  const Vector b = -p.residual(Vector::Zero(3));
  const Vector xls = a.colPivHouseholderQr().solve(b);

  SolverConfig c;
  c.tr_step = TrStep::Dogleg;
  c.stopping.max_iters = 50;
  c.stopping.action_budget = 1000;
  c.stopping.grad_tol = 1e-11;
  const RunTrace t = full_gn_reference(p, p.x0, c);
  EXPECT_EQ(t.termination, Termination::GradTol);
  EXPECT_LE((t.x_final - xls).norm(), 1e-9);
  for (const auto& r : t.records) EXPECT_EQ(r.l, 3);
}

TEST(FullGnReference, IsDeterministic) {
  const NlsProblem p = make_problem("chained_rosenbrock", 10);
  SolverConfig c;
  c.stopping.max_iters = 30;
  const RunTrace a = full_gn_reference(p, p.x0, c);
  const RunTrace b = full_gn_reference(p, p.x0, c);
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_EQ(a.f_final, b.f_final);
  EXPECT_EQ(a.x_final, b.x_final);
}

}  // namespace
}  // namespace rsopt
