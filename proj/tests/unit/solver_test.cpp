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

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rsopt/solver.hpp"

namespace rsopt {
namespace {

// f(x) = 1/2 x^T A x - b^T x with A = diag(1, ..., d).
FunctionObjective quadratic(Index d) {
  Vector diag = Vector::LinSpaced(d, 1.0, static_cast<double>(d));
  Vector b = Vector::Ones(d);
  return FunctionObjective(
      d, [diag, b](const Vector& x) { return 0.5 * x.dot(diag.cwiseProduct(x)) - b.dot(x); },
      [diag, b](const Vector& x) { return Vector(diag.cwiseProduct(x) - b); },
      [diag](const Vector&) { return Matrix(diag.asDiagonal()); });
}

SolverConfig base_config(Variant v, SketchKind kind, Index l) {
  SolverConfig c;
  c.variant = v;
  c.sketch.kind = kind;
  c.sketch.l = l;
  c.stopping.max_iters = 200;
  c.stopping.action_budget = 1000000;
  return c;
}

TEST(UpdateAlpha, SuccessfulIsCappedAtAlphaMax) {
  SolverConfig c;
  c.gamma1 = 0.5;
  c.c = 1;
  c.alpha_max = 10.0;
  EXPECT_DOUBLE_EQ(update_alpha(8.0, true, c), 10.0);
  EXPECT_DOUBLE_EQ(update_alpha(4.0, true, c), 8.0);
}

TEST(UpdateAlpha, UnsuccessfulShrinks) {
  SolverConfig c;
  c.gamma1 = 0.5;
  c.alpha_max = 10.0;
  EXPECT_DOUBLE_EQ(update_alpha(8.0, false, c), 4.0);
}

TEST(SolverConfig, DerivedQuantities) {
  SolverConfig c;
  c.gamma1 = 0.5;
  c.c = 3;
  c.p = 2;
  c.alpha_max = 10.0;
  EXPECT_DOUBLE_EQ(c.gamma2(), 8.0);
  EXPECT_DOUBLE_EQ(c.gamma2() * std::pow(c.gamma1, c.c), 1.0);
  EXPECT_DOUBLE_EQ(c.alpha0(), 2.5);
  EXPECT_LE(c.alpha0(), c.alpha_max);
  EXPECT_EQ(c.budget_for(7), 350);
  c.stopping.action_budget = 12;
  EXPECT_EQ(c.budget_for(7), 12);
}

TEST(SolverConfig, ValidateRejectsBadValues) {
  auto expect_bad = [](auto mutate) {
    SolverConfig c;
    c.sketch.l = 2;
    mutate(c);
    EXPECT_THROW(c.validate(5), std::invalid_argument);
  };
  expect_bad([](SolverConfig& c) { c.gamma1 = 1.0; });
  expect_bad([](SolverConfig& c) { c.c = 0; });
  expect_bad([](SolverConfig& c) { c.p = 0; });
  expect_bad([](SolverConfig& c) { c.theta = 0.0; });
  expect_bad([](SolverConfig& c) { c.alpha_max = -1.0; });
  expect_bad([](SolverConfig& c) { c.sketch.l = 6; });
  expect_bad([](SolverConfig& c) { c.adaptive = AdaptiveOptions{1.0, 1}; });
  expect_bad([](SolverConfig& c) { c.adaptive = AdaptiveOptions{0.5, 0}; });
}

TEST(SufficientDecrease, Rules) {
  EXPECT_TRUE(sufficient_decrease(1.0, 0.5, 1.0, 0.5));
  EXPECT_FALSE(sufficient_decrease(1.0, 0.6, 1.0, 0.5));
  EXPECT_FALSE(sufficient_decrease(1.0, 1.0, 0.0, 1e-4));
  EXPECT_FALSE(sufficient_decrease(1.0, std::numeric_limits<double>::quiet_NaN(), 1.0, 1e-4));
  EXPECT_FALSE(sufficient_decrease(1.0, -std::numeric_limits<double>::infinity(), 1.0, 1e-4));
}

TEST(Run, AlphaCappedAfterSuccess) {
  // alpha_max = 10, p = 1: alpha0 = 5, then min(10, 10) and min(10, 20).
  FunctionObjective f = quadratic(2);
  SolverConfig c = base_config(Variant::QuadReg, SketchKind::Identity, 2);
  c.alpha_max = 10.0;
  c.stopping.max_iters = 3;
  Rng rng(0);
  const RunTrace t = run(f, Vector::Zero(2), c, rng);
  ASSERT_EQ(t.records.size(), 3u);
  EXPECT_DOUBLE_EQ(t.records[0].alpha, 5.0);
  ASSERT_TRUE(t.records[0].successful);
  EXPECT_DOUBLE_EQ(t.records[1].alpha, 10.0);
  if (t.records[1].successful) {
    EXPECT_DOUBLE_EQ(t.records[2].alpha, 10.0);
  }
}

TEST(Run, TinyThetaAcceptsEveryDecreasingStep) {
  FunctionObjective f = quadratic(2);
  SolverConfig c = base_config(Variant::QuadReg, SketchKind::Identity, 2);
  c.theta = 1e-12;
  c.stopping.max_iters = 5;
  Rng rng(0);
  const RunTrace t = run(f, Vector::Zero(2), c, rng);
  ASSERT_FALSE(t.records.empty());
  for (const auto& r : t.records) {
    EXPECT_GT(r.model_decrease, 0.0);
    EXPECT_LT(r.f_trial, r.f_before);
    EXPECT_TRUE(r.successful);
  }
}

TEST(Run, NanTrialIsRejectedAndAlphaShrinks) {
  // f is NaN anywhere outside the unit ball, so the first long step fails.
  FunctionObjective f(
      2,
      [](const Vector& x) {
        return x.norm() > 1.0 ? std::numeric_limits<double>::quiet_NaN() : -x.sum();
      },
      [](const Vector&) { return Vector(Vector::Constant(2, -1.0)); });
  SolverConfig c = base_config(Variant::TrustRegion, SketchKind::Identity, 2);
  c.alpha_max = 8.0;
  c.p = 1;
  c.stopping.max_iters = 2;
  Rng rng(0);
  const Vector x0 = Vector::Zero(2);
  const RunTrace t = run(f, x0, c, rng);
  ASSERT_EQ(t.records.size(), 2u);
  EXPECT_FALSE(t.records[0].successful);
  EXPECT_TRUE(std::isnan(t.records[0].f_trial));
  EXPECT_EQ(t.records[0].f_after, t.records[0].f_before);
  EXPECT_DOUBLE_EQ(t.records[1].alpha, 2.0);
}

TEST(Run, RejectsNonFiniteStart) {
  FunctionObjective f = quadratic(2);
  SolverConfig c = base_config(Variant::QuadReg, SketchKind::Identity, 2);
  Rng rng(0);
  Vector x0 = Vector::Zero(2);
  x0[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(run(f, x0, c, rng), std::invalid_argument);
  EXPECT_THROW(run(f, Vector::Zero(3), c, rng), std::invalid_argument);
}

TEST(Run, StopsOnGradientTolerance) {
  FunctionObjective f = quadratic(3);
  SolverConfig c = base_config(Variant::TrustRegion, SketchKind::Identity, 3);
  c.tr_step = TrStep::Dogleg;
  c.stopping.grad_tol = 1e-8;
  Rng rng(0);
  const RunTrace t = run(f, Vector::Zero(3), c, rng);
  EXPECT_EQ(t.termination, Termination::GradTol);
  const Vector expected{{1.0, 0.5, 1.0 / 3.0}};
  EXPECT_LE((t.x_final - expected).norm(), 1e-7);
  EXPECT_GE(t.monitor_calls, static_cast<long long>(t.records.size()));
}

TEST(Run, StopsOnIterationCap) {
  FunctionObjective f = quadratic(3);
  SolverConfig c = base_config(Variant::QuadReg, SketchKind::ScaledGaussian, 1);
  c.stopping.max_iters = 7;
  Rng rng(1);
  const RunTrace t = run(f, Vector::Zero(3), c, rng);
  EXPECT_EQ(t.termination, Termination::MaxIters);
  EXPECT_EQ(t.records.size(), 7u);
}

TEST(Run, StopsOnActionBudget) {
  FunctionObjective f = quadratic(4);
  SolverConfig c = base_config(Variant::TrustRegion, SketchKind::ScaledGaussian, 3);
  c.stopping.action_budget = 10;
  Rng rng(1);
  const RunTrace t = run(f, Vector::Zero(4), c, rng);
  EXPECT_EQ(t.termination, Termination::Budget);
  ASSERT_EQ(t.records.size(), 4u);
  EXPECT_EQ(t.records.back().actions_used, 12);
  EXPECT_LT(t.records[2].actions_used, 10);
}

TEST(Run, SameSeedSameTrace) {
  FunctionObjective f1 = quadratic(6);
  FunctionObjective f2 = quadratic(6);
  SolverConfig c = base_config(Variant::TrustRegion, SketchKind::SHashing, 3);
  Rng a(42);
  Rng b(42);
  const RunTrace t1 = run(f1, Vector::Ones(6), c, a);
  const RunTrace t2 = run(f2, Vector::Ones(6), c, b);
  ASSERT_EQ(t1.records.size(), t2.records.size());
  for (std::size_t i = 0; i < t1.records.size(); ++i) {
    EXPECT_EQ(t1.records[i].f_after, t2.records[i].f_after);
  }
  EXPECT_EQ(t1.x_final, t2.x_final);
}

TEST(Run, DiagnosticsRecordTrueFlags) {
  FunctionObjective f = quadratic(5);
  SolverConfig c = base_config(Variant::QuadReg, SketchKind::Identity, 5);
  c.diagnostics = TrueIterationCheck{0.5, 1.0};
  c.stopping.max_iters = 5;
  Rng rng(0);
  const RunTrace t = run(f, Vector::Zero(5), c, rng);
  for (const auto& r : t.records) {
    ASSERT_TRUE(r.true_iter.has_value());
    EXPECT_TRUE(*r.true_iter);
    ASSERT_TRUE(r.grad_norm.has_value());
  }
  EXPECT_EQ(t.records.back().actions_used, 25);
}

TEST(ClassifyTrue, IdentityAlwaysTrue) {
  Rng rng(3);
  const SketchMatrix s = SketchMatrix::identity(4);
  for (int i = 0; i < 10; ++i) {
    Vector g(4);
    for (Index k = 0; k < 4; ++k) g[k] = rng.normal();
    EXPECT_TRUE(classify_true(g, s, 0.1, 1.0));
  }
}

TEST(ClassifyTrue, ZeroGradientDependsOnlyOnNorm) {
  const SketchMatrix s = draw(SketchSpec{SketchKind::ScaledSampling, 2, 8, 1, 0});
  const double norm = s.spectral_norm();
  EXPECT_TRUE(classify_true(Vector::Zero(8), s, 0.5, norm));
  EXPECT_FALSE(classify_true(Vector::Zero(8), s, 0.5, 0.99 * norm));
}

TEST(ClassifyTrue, SamplingMissingTheGradient) {
  const SketchMatrix s = draw(SketchSpec{SketchKind::ScaledSampling, 2, 50, 1, 0});
  const Matrix a = s.to_dense();
  Index hit = -1;
  for (Index j = 0; j < 50 && hit < 0; ++j) {
    if (a.col(j).isZero(0.0)) hit = j;
  }
  ASSERT_GE(hit, 0);
  EXPECT_FALSE(classify_true(Vector::Unit(50, hit), s, 0.5, 10.0));
}

TEST(RunAdaptive, LooseKappaKeepsInitialDimension) {
  // For f = 1/2 ||x||^2 - 1^T x the identity-sketch model minimum is
  // f0 - ||g||^2 / 2 <= 0.999 f0 whenever f0 < 0; start from x0 = 0.5 * 1.
  FunctionObjective f(
      2, [](const Vector& x) { return 0.5 * x.squaredNorm() - x.sum(); },
      [](const Vector& x) { return Vector(x - Vector::Ones(2)); },
      [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); });
  SolverConfig c = base_config(Variant::TrustRegion, SketchKind::ScaledGaussian, 1);
  c.adaptive = AdaptiveOptions{0.999, 1};
  c.stopping.max_iters = 1;
  Rng rng(5);
  const RunTrace t = run_adaptive(f, Vector::Constant(2, 0.5), c, rng);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].l, 1);
}

TEST(RunAdaptive, LargeIncrementJumpsToFullSpace) {
  FunctionObjective f(
      6, [](const Vector& x) { return 0.5 * (x - Vector::Ones(6)).squaredNorm(); },
      [](const Vector& x) { return Vector(x - Vector::Ones(6)); },
      [](const Vector&) { return Matrix(Matrix::Identity(6, 6)); });
  SolverConfig c = base_config(Variant::TrustRegion, SketchKind::ScaledGaussian, 1);
  c.adaptive = AdaptiveOptions{1e-6, 100};
  c.stopping.max_iters = 1;
  Rng rng(6);
  const RunTrace t = run_adaptive(f, Vector::Zero(6), c, rng);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].l, 6);
}

TEST(RunAdaptive, RequiresAdaptiveOptions) {
  FunctionObjective f = quadratic(3);
  SolverConfig c = base_config(Variant::TrustRegion, SketchKind::ScaledGaussian, 1);
  Rng rng(0);
  EXPECT_THROW(run_adaptive(f, Vector::Zero(3), c, rng), std::invalid_argument);
}

TEST(Enums, NamesRoundTrip) {
  EXPECT_EQ(parse_variant("qr"), Variant::QuadReg);
  EXPECT_EQ(parse_variant(to_string(Variant::TrustRegion)), Variant::TrustRegion);
  EXPECT_EQ(parse_tr_step("dogleg"), TrStep::Dogleg);
  EXPECT_EQ(parse_termination("budget"), Termination::Budget);
  EXPECT_THROW(parse_variant("ls"), std::invalid_argument);
  EXPECT_THROW(parse_tr_step("exact"), std::invalid_argument);
}

}  // namespace
}  // namespace rsopt
