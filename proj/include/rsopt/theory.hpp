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
#include <vector>

#include "rsopt/rng.hpp"
#include "rsopt/types.hpp"

namespace rsopt {

/// Quantities entering the worst-case iteration bounds.
///
/// delta_s is the probability that an iteration is not true, delta_1 the
/// slack in the count of true iterations, and c, gamma1, alpha0, alpha_max
/// the step-parameter settings of the solver. L is a Lipschitz constant of
/// the gradient and B_max a bound on ||B_k||. c7 is the Cauchy-decrease
/// fraction of the trust-region step.
struct ComplexityInputs {
  double delta_s = 0.0;
  double delta_1 = 0.1;
  int c = 1;
  double gamma1 = 0.5;
  double theta = 0.5;
  double alpha0 = 50.0;
  double alpha_max = 100.0;
  double eps = 1e-2;
  double L = 1.0;
  double B_max = 1.0;
  double kappa_T = 0.01;
  double s_max = 1.0;
  double eps_s = 0.5;
  double c7 = 0.5;
  double f0_minus_fstar = 1.0;

  /// Throws std::invalid_argument naming the first violated condition,
  /// including delta_s >= c/(c+1)^2 ("bound inapplicable").
  void validate() const;
};

/// g(delta_s, delta_1) = [(1 - delta_s)(1 - delta_1) - 1 + c/(c+1)^2]^-1.
/// Throws when delta_s >= c/(c+1)^2 or when the bracket is not positive.
double g_factor(double delta_s, double delta_1, int c);

/// Smallest integer tau with alpha0 gamma1^tau <= min(alpha_low, alpha0 gamma1^c),
/// i.e. ceil(log_gamma1(min(alpha_low / alpha0, gamma1^c))).
int tau_alpha(double alpha_low, double alpha0, double gamma1, int c);

/// Decrease function h(eps, alpha0 gamma1^(c + tau)) with the step-size
/// threshold it was evaluated at.
struct DecreaseBound {
  double alpha_low = 0.0;
  int tau_alpha = 0;
  double alpha_min = 0.0;  // alpha0 gamma1^tau
  double h = 0.0;
};

/// Quadratic regularization: alpha_low = (1 - theta)/(L + B_max) and
///   h = theta (1 - eps_s) eps^2 /
///       (2 alpha_max (s_max (B_max + gamma1^(-c-tau) / alpha0) + kappa_T)^2).
DecreaseBound qr_h(const ComplexityInputs& in);

/// Trust-region step-size threshold
///   alpha_low = sqrt(1 - eps_s) eps min(c7 (1 - theta) / ((L + B_max/2) s_max^2), 1/B_max).
double tr_alpha_low(const ComplexityInputs& in);

/// Trust region, closed-form lower bound that no longer depends on tau:
///   h = theta c7 (1 - eps_s) eps^2 gamma1^(c+1)
///       min(c7 (1 - theta) / ((L + B_max/2) s_max^2), 1/B_max,
///           alpha0 / (sqrt(1 - eps_s) eps gamma2)).
/// tau_alpha and alpha_min in the result are still reported.
DecreaseBound tr_h(const ComplexityInputs& in);

/// Trust region, h evaluated at the actual alpha0 gamma1^(c + tau):
///   theta c7 min(sqrt(1 - eps_s) eps alpha0 gamma1^(c+tau), (1 - eps_s) eps^2 / B_max).
/// Always >= tr_h(in).h.
DecreaseBound tr_h_exact(const ComplexityInputs& in);

struct BoundInputs {
  double delta_s = 0.0;
  double delta_1 = 0.1;
  int c = 1;
  int tau_alpha = 1;
  double f0_minus_fstar = 1.0;
  double h = 1.0;
};

/// High-probability iteration bound and the derived constants used to
/// restate it as a rate, an expectation or a sample-size requirement.
struct IterationBound {
  double g = 0.0;
  double n_real = 0.0;             // g [(f0 - f*)/h + tau/(1 + c)]
  long long n = 0;                 // ceil(n_real)
  double failure_probability = 0;  // exp(-delta_1^2 (1 - delta_s) n / 2)
  double d1 = 0.0;                 // g (f0 - f*)
  double d2 = 0.0;                 // g tau / (1 + c)
  double d3 = 0.0;                 // delta_1^2 (1 - delta_s) / 2
  double expectation_bound = 0.0;  // n_real + exp(-d3 n_real) / d3

  /// Failure probability after n iterations, exp(-d3 n).
  double failure_after(double iterations) const;
  /// Smallest N with N >= d1/h + d2 and exp(-d3 N) <= delta.
  long long iterations_for_confidence(double delta, double h) const;
};

IterationBound iteration_bound(const BoundInputs& in);

/// Convenience: qr_h or tr_h followed by iteration_bound.
IterationBound qr_iteration_bound(const ComplexityInputs& in);
IterationBound tr_iteration_bound(const ComplexityInputs& in);

struct ChernoffResult {
  double empirical = 0.0;    // fraction of chains with N_T <= threshold
  double bound = 0.0;        // exp(-delta_1^2 (1 - delta_s) N / 2)
  double exact = 0.0;        // binomial CDF at the threshold
  double threshold = 0.0;    // (1 - delta_s)(1 - delta_1) N
  double sigma = 0.0;        // sqrt(bound (1 - bound) / trials)
  long trials = 0;

  bool within_bound(double sigmas = 3.0) const {
    return empirical <= bound + sigmas * sigma;
  }
};

/// Simulates `trials` chains of N independent Bernoulli(1 - delta_s) true
/// flags and counts how often the number of true iterations falls at or
/// below (1 - delta_s)(1 - delta_1) N. Trials are split into fixed blocks,
/// each with a generator split from rng, so the result does not depend on
/// the number of worker threads.
ChernoffResult verify_chernoff(double delta_s, double delta_1, long n, long trials,
                               const Rng& rng, unsigned workers = 0);

/// P(Binomial(n, p) <= k).
double binomial_cdf(long k, long n, double p);

/// Heuristic Lipschitz estimate max ||g_i - g_j|| / ||x_i - x_j|| over all
/// pairs of distinct points.
double estimate_lipschitz(const std::vector<Vector>& points,
                          const std::vector<Vector>& gradients);

}  // namespace rsopt
