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


#include "rsopt/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace rsopt {
namespace {

void fail(const std::string& what) { throw std::invalid_argument("bound inputs: " + what); }

void validate_step_inputs(const ComplexityInputs& in) {
  if (!(in.eps > 0.0)) fail("eps must be positive");
  if (!(in.theta > 0.0 && in.theta < 1.0)) fail("theta must lie in (0, 1)");
  if (!(in.gamma1 > 0.0 && in.gamma1 < 1.0)) fail("gamma1 must lie in (0, 1)");
  if (in.c < 1) fail("c must be a positive integer");
  if (!(in.alpha_max > 0.0)) fail("alpha_max must be positive");
  if (!(in.alpha0 > 0.0 && in.alpha0 <= in.alpha_max)) fail("alpha0 must lie in (0, alpha_max]");
  if (!(in.L >= 0.0)) fail("L must be >= 0");
  if (!(in.B_max >= 0.0)) fail("B_max must be >= 0");
  if (!(in.L + in.B_max > 0.0)) fail("L + B_max must be positive");
  if (!(in.kappa_T >= 0.0)) fail("kappa_T must be >= 0");
  if (!(in.s_max > 0.0)) fail("s_max must be positive");
  if (!(in.eps_s > 0.0 && in.eps_s < 1.0)) fail("eps_s must lie in (0, 1)");
  if (!(in.c7 > 0.0)) fail("c7 must be positive");
  if (!(in.f0_minus_fstar >= 0.0)) fail("f0 - f* must be >= 0");
}

double inverse_or_inf(double x) {
  return x > 0.0 ? 1.0 / x : std::numeric_limits<double>::infinity();
}

double tr_inner_min(const ComplexityInputs& in) {
  const double curvature = (in.L + 0.5 * in.B_max) * in.s_max * in.s_max;
  return std::min(in.c7 * (1.0 - in.theta) / curvature, inverse_or_inf(in.B_max));
}

DecreaseBound with_tau(const ComplexityInputs& in, double alpha_low) {
  DecreaseBound out;
  out.alpha_low = alpha_low;
  out.tau_alpha = tau_alpha(alpha_low, in.alpha0, in.gamma1, in.c);
  out.alpha_min = in.alpha0 * std::pow(in.gamma1, out.tau_alpha);
  return out;
}

}  // namespace

void ComplexityInputs::validate() const {
  validate_step_inputs(*this);
  g_factor(delta_s, delta_1, c);
}

double g_factor(double delta_s, double delta_1, int c) {
  if (c < 1) fail("c must be a positive integer");
  if (!(delta_s >= 0.0 && delta_s < 1.0)) fail("delta_s must lie in [0, 1)");
  if (!(delta_1 > 0.0 && delta_1 < 1.0)) fail("delta_1 must lie in (0, 1)");
  const double limit = static_cast<double>(c) / ((c + 1.0) * (c + 1.0));
  if (!(delta_s < limit)) {
    fail("bound inapplicable: delta_s = " + std::to_string(delta_s) +
         " is not below c/(c+1)^2 = " + std::to_string(limit));
  }
  const double bracket = (1.0 - delta_s) * (1.0 - delta_1) - 1.0 + limit;
  if (!(bracket > 0.0)) {
    fail("bound inapplicable: g(delta_s, delta_1) is not positive; decrease delta_1");
  }
  return 1.0 / bracket;
}

int tau_alpha(double alpha_low, double alpha0, double gamma1, int c) {
  if (!(alpha_low > 0.0)) fail("alpha_low must be positive");
  if (!(alpha0 > 0.0)) fail("alpha0 must be positive");
  if (!(gamma1 > 0.0 && gamma1 < 1.0)) fail("gamma1 must lie in (0, 1)");
  if (c < 1) fail("c must be a positive integer");
  const double ratio = alpha_low / alpha0;
  const double cap = std::pow(gamma1, c);
  if (ratio >= cap) return c;
  const double v = std::log(ratio) / std::log(gamma1);
  // Absorb rounding when v is an integer in exact arithmetic.
  const double nearest = std::round(v);
  const double t = std::abs(v - nearest) <= 1e-12 * std::max(1.0, std::abs(v)) ? nearest
                                                                                : std::ceil(v);
  return std::max(c, static_cast<int>(t));
}

DecreaseBound qr_h(const ComplexityInputs& in) {
  validate_step_inputs(in);
  DecreaseBound out = with_tau(in, (1.0 - in.theta) / (in.L + in.B_max));
  const double inv_alpha = std::pow(in.gamma1, -in.c - out.tau_alpha) / in.alpha0;
  const double denom = in.s_max * (in.B_max + inv_alpha) + in.kappa_T;
  out.h = in.theta * (1.0 - in.eps_s) * in.eps * in.eps / (2.0 * in.alpha_max * denom * denom);
  return out;
}

double tr_alpha_low(const ComplexityInputs& in) {
  validate_step_inputs(in);
  return std::sqrt(1.0 - in.eps_s) * in.eps * tr_inner_min(in);
}

DecreaseBound tr_h(const ComplexityInputs& in) {
  DecreaseBound out = with_tau(in, tr_alpha_low(in));
  const double gamma2 = std::pow(in.gamma1, -in.c);
  const double root = std::sqrt(1.0 - in.eps_s) * in.eps;
  const double third = in.alpha0 / (root * gamma2);
  out.h = in.theta * in.c7 * (1.0 - in.eps_s) * in.eps * in.eps *
          std::pow(in.gamma1, in.c + 1) * std::min(tr_inner_min(in), third);
  return out;
}

DecreaseBound tr_h_exact(const ComplexityInputs& in) {
  DecreaseBound out = with_tau(in, tr_alpha_low(in));
  const double root = std::sqrt(1.0 - in.eps_s) * in.eps;
  const double first = root * in.alpha0 * std::pow(in.gamma1, in.c + out.tau_alpha);
  const double second = (1.0 - in.eps_s) * in.eps * in.eps * inverse_or_inf(in.B_max);
  out.h = in.theta * in.c7 * std::min(first, second);
  return out;
}

double IterationBound::failure_after(double iterations) const {
  return std::exp(-d3 * iterations);
}

long long IterationBound::iterations_for_confidence(double delta, double h) const {
  if (!(delta > 0.0 && delta < 1.0)) fail("confidence delta must lie in (0, 1)");
  if (!(h > 0.0)) fail("h must be positive");
  const double need = std::max(d1 / h + d2, std::log(1.0 / delta) / d3);
  return static_cast<long long>(std::ceil(need));
}

IterationBound iteration_bound(const BoundInputs& in) {
  if (!(in.h > 0.0)) fail("h must be positive");
  if (in.tau_alpha < 0) fail("tau_alpha must be >= 0");
  if (!(in.f0_minus_fstar >= 0.0)) fail("f0 - f* must be >= 0");
  IterationBound out;
  out.g = g_factor(in.delta_s, in.delta_1, in.c);
  out.d1 = out.g * in.f0_minus_fstar;
  out.d2 = out.g * static_cast<double>(in.tau_alpha) / (1.0 + in.c);
  out.d3 = 0.5 * in.delta_1 * in.delta_1 * (1.0 - in.delta_s);
  out.n_real = out.d1 / in.h + out.d2;
  out.n = static_cast<long long>(std::ceil(out.n_real));
  out.failure_probability = out.failure_after(static_cast<double>(out.n));
  out.expectation_bound = out.n_real + std::exp(-out.d3 * out.n_real) / out.d3;
  return out;
}

IterationBound qr_iteration_bound(const ComplexityInputs& in) {
  in.validate();
  const DecreaseBound h = qr_h(in);
  return iteration_bound({in.delta_s, in.delta_1, in.c, h.tau_alpha, in.f0_minus_fstar, h.h});
}

IterationBound tr_iteration_bound(const ComplexityInputs& in) {
  in.validate();
  const DecreaseBound h = tr_h(in);
  return iteration_bound({in.delta_s, in.delta_1, in.c, h.tau_alpha, in.f0_minus_fstar, h.h});
}

double binomial_cdf(long k, long n, double p) {
  if (n < 0) throw std::invalid_argument("binomial_cdf: n must be >= 0");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double total = 0.0;
  for (long i = 0; i <= k; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                            std::lgamma(static_cast<double>(n - i) + 1.0) + i * lp +
                            static_cast<double>(n - i) * lq;
    total += std::exp(log_term);
  }
  return std::min(total, 1.0);
}

ChernoffResult verify_chernoff(double delta_s, double delta_1, long n, long trials,
                               const Rng& rng, unsigned workers) {
  if (!(delta_s >= 0.0 && delta_s < 1.0)) fail("delta_s must lie in [0, 1)");
  if (!(delta_1 >= 0.0 && delta_1 < 1.0)) fail("delta_1 must lie in [0, 1)");
  if (n < 1) fail("N must be >= 1");
  if (trials < 1) fail("trials must be >= 1");

  ChernoffResult out;
  out.trials = trials;
  out.threshold = (1.0 - delta_s) * (1.0 - delta_1) * static_cast<double>(n);
  out.bound = std::exp(-0.5 * delta_1 * delta_1 * (1.0 - delta_s) * static_cast<double>(n));
  out.sigma = std::sqrt(out.bound * (1.0 - out.bound) / static_cast<double>(trials));
  // Counts are integers; keep a threshold that lands on an integer from
  // slipping just below it.
  const auto cutoff = static_cast<long>(std::floor(out.threshold + 1e-9));
  out.exact = binomial_cdf(cutoff, n, 1.0 - delta_s);

  constexpr long kBlock = 4096;
  const long blocks = (trials + kBlock - 1) / kBlock;
  std::vector<long> hits(static_cast<std::size_t>(blocks), 0);
  std::atomic<long> next{0};
  const double p_true = 1.0 - delta_s;
  auto work = [&] {
    for (long b = next++; b < blocks; b = next++) {
      Rng block_rng = rng.split(static_cast<std::uint64_t>(b));
      const long count = std::min(kBlock, trials - b * kBlock);
      long local = 0;
      for (long t = 0; t < count; ++t) {
        long n_true = 0;
        for (long k = 0; k < n; ++k) n_true += block_rng.uniform() < p_true ? 1 : 0;
        local += n_true <= cutoff ? 1 : 0;
      }
      hits[static_cast<std::size_t>(b)] = local;
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, blocks));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  long total = 0;
  for (long h : hits) total += h;
  out.empirical = static_cast<double>(total) / static_cast<double>(trials);
  return out;
}

double estimate_lipschitz(const std::vector<Vector>& points,
                          const std::vector<Vector>& gradients) {
  if (points.size() != gradients.size()) {
    throw std::invalid_argument("estimate_lipschitz: points and gradients differ in count");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double dx = (points[i] - points[j]).norm();
      if (dx > 0.0) best = std::max(best, (gradients[i] - gradients[j]).norm() / dx);
    }
  }
  return best;
}

}  // namespace rsopt
