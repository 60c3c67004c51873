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


// Native implementations of classical least-squares test families. The
// formulations follow More, Garbow and Hillstrom, "Testing unconstrained
// optimization software" (ACM TOMS 7, 1981), and the CUTEst variants of the
// Bratu and oscillating-gradient systems.

#include "rsopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsopt {
namespace {

using std::sqrt;

void require(bool ok, std::string_view name, Index d, const char* what) {
  if (!ok) {
    throw std::invalid_argument("problem '" + std::string(name) + "' does not support d=" +
                                std::to_string(d) + ": " + what);
  }
}

// Tridiagonal Broyden system, x0 = -1.
NlsProblem broyden_tridiagonal(Index d) {
  NlsProblem p;
  p.name = "broyden_tridiagonal";
  p.d = p.n = d;
  p.residual = [d](const Vector& x) {
    Vector r(d);
    for (Index i = 0; i < d; ++i) {
      const double left = i > 0 ? x[i - 1] : 0.0;
      const double right = i + 1 < d ? x[i + 1] : 0.0;
      r[i] = (3.0 - 2.0 * x[i]) * x[i] - left - 2.0 * right + 1.0;
    }
    return r;
  };
  p.jacobian_action = [d](const Vector& x, const Vector& v) {
    Vector out(d);
    for (Index i = 0; i < d; ++i) {
      double acc = (3.0 - 4.0 * x[i]) * v[i];
      if (i > 0) acc -= v[i - 1];
      if (i + 1 < d) acc -= 2.0 * v[i + 1];
      out[i] = acc;
    }
    return out;
  };
  p.x0 = Vector::Constant(d, -1.0);
  p.zero_residual = true;
  return p;
}

// Banded Broyden system with lower bandwidth 5 and upper bandwidth 1.
NlsProblem broyden_banded(Index d) {
  NlsProblem p;
  p.name = "broyden_banded";
  p.d = p.n = d;
  p.residual = [d](const Vector& x) {
    Vector r(d);
    for (Index i = 0; i < d; ++i) {
      double acc = x[i] * (2.0 + 5.0 * x[i] * x[i]) + 1.0;
      for (Index j = std::max<Index>(0, i - 5); j <= std::min<Index>(d - 1, i + 1); ++j) {
        if (j != i) acc -= x[j] * (1.0 + x[j]);
      }
      r[i] = acc;
    }
    return r;
  };
  p.jacobian_action = [d](const Vector& x, const Vector& v) {
    Vector out(d);
    for (Index i = 0; i < d; ++i) {
      double acc = (2.0 + 15.0 * x[i] * x[i]) * v[i];
      for (Index j = std::max<Index>(0, i - 5); j <= std::min<Index>(d - 1, i + 1); ++j) {
        if (j != i) acc -= (1.0 + 2.0 * x[j]) * v[j];
      }
      out[i] = acc;
    }
    return out;
  };
  p.x0 = Vector::Constant(d, -1.0);
  p.zero_residual = true;
  return p;
}

// Extended Rosenbrock: independent 2-d Rosenbrock blocks, d even.
NlsProblem extended_rosenbrock(Index d) {
  NlsProblem p;
  p.name = "extended_rosenbrock";
  p.d = p.n = d;
  p.residual = [d](const Vector& x) {
    Vector r(d);
    for (Index i = 0; i < d; i += 2) {
      r[i] = 10.0 * (x[i + 1] - x[i] * x[i]);
      r[i + 1] = 1.0 - x[i];
    }
    return r;
  };
  p.jacobian_action = [d](const Vector& x, const Vector& v) {
    Vector out(d);
    for (Index i = 0; i < d; i += 2) {
      out[i] = 10.0 * (v[i + 1] - 2.0 * x[i] * v[i]);
      out[i + 1] = -v[i];
    }
    return out;
  };
  p.x0.resize(d);
  for (Index i = 0; i < d; i += 2) {
    p.x0[i] = -1.2;
    p.x0[i + 1] = 1.0;
  }
  p.zero_residual = true;
  p.f_star = 0.0;
  p.x_star = Vector::Ones(d);
  return p;
}

// Chained Rosenbrock equations, n = 2(d - 1).
NlsProblem chained_rosenbrock(Index d) {
  NlsProblem p;
  p.name = "chained_rosenbrock";
  p.d = d;
  p.n = 2 * (d - 1);
  p.residual = [d](const Vector& x) {
    Vector r(2 * (d - 1));
    for (Index i = 0; i + 1 < d; ++i) {
      r[2 * i] = 10.0 * (x[i] * x[i] - x[i + 1]);
      r[2 * i + 1] = x[i] - 1.0;
    }
    return r;
  };
  p.jacobian_action = [d](const Vector& x, const Vector& v) {
    Vector out(2 * (d - 1));
    for (Index i = 0; i + 1 < d; ++i) {
      out[2 * i] = 10.0 * (2.0 * x[i] * v[i] - v[i + 1]);
      out[2 * i + 1] = v[i];
    }
    return out;
  };
  p.x0 = Vector::Constant(d, -1.2);
  p.zero_residual = true;
  p.f_star = 0.0;
  p.x_star = Vector::Ones(d);
  return p;
}

// Discrete two-point boundary value problem.
NlsProblem boundary_value(Index d) {
  NlsProblem p;
  p.name = "boundary_value";
  p.d = p.n = d;
  const double h = 1.0 / static_cast<double>(d + 1);
  p.residual = [d, h](const Vector& x) {
    Vector r(d);
    for (Index i = 0; i < d; ++i) {
      const double t = static_cast<double>(i + 1) * h;
      const double left = i > 0 ? x[i - 1] : 0.0;
      const double right = i + 1 < d ? x[i + 1] : 0.0;
      r[i] = 2.0 * x[i] - left - right + 0.5 * h * h * std::pow(x[i] + t + 1.0, 3);
    }
    return r;
  };
  p.jacobian_action = [d, h](const Vector& x, const Vector& v) {
    Vector out(d);
    for (Index i = 0; i < d; ++i) {
      const double t = static_cast<double>(i + 1) * h;
      const double u = x[i] + t + 1.0;
      double acc = (2.0 + 1.5 * h * h * u * u) * v[i];
      if (i > 0) acc -= v[i - 1];
      if (i + 1 < d) acc -= v[i + 1];
      out[i] = acc;
    }
    return out;
  };
  p.x0.resize(d);
  for (Index i = 0; i < d; ++i) {
    const double t = static_cast<double>(i + 1) * h;
    p.x0[i] = t * (t - 1.0);
  }
  p.zero_residual = true;
  return p;
}

// Discrete integral equation; dense Jacobian applied in O(d) with prefix sums.
NlsProblem integral_equation(Index d) {
  NlsProblem p;
  p.name = "integral_equation";
  p.d = p.n = d;
  const double h = 1.0 / static_cast<double>(d + 1);
  auto t_at = [h](Index i) { return static_cast<double>(i + 1) * h; };
  // out_i = (1 - t_i) sum_{j<=i} t_j w_j + t_i sum_{j>i} (1 - t_j) w_j
  auto kernel = [d, t_at](const Vector& w) {
    Vector out(d);
    double tail = 0.0;
    for (Index j = 0; j < d; ++j) tail += (1.0 - t_at(j)) * w[j];
    double head = 0.0;
    for (Index i = 0; i < d; ++i) {
      const double t = t_at(i);
      head += t * w[i];
      tail -= (1.0 - t) * w[i];
      out[i] = (1.0 - t) * head + t * tail;
    }
    return out;
  };
  p.residual = [d, h, t_at, kernel](const Vector& x) {
    Vector w(d);
    for (Index j = 0; j < d; ++j) w[j] = std::pow(x[j] + t_at(j) + 1.0, 3);
    return Vector(x + 0.5 * h * kernel(w));
  };
  p.jacobian_action = [d, h, t_at, kernel](const Vector& x, const Vector& v) {
    Vector w(d);
    for (Index j = 0; j < d; ++j) {
      const double u = x[j] + t_at(j) + 1.0;
      w[j] = 3.0 * u * u * v[j];
    }
    return Vector(v + 0.5 * h * kernel(w));
  };
  p.x0.resize(d);
  for (Index i = 0; i < d; ++i) p.x0[i] = t_at(i) * (t_at(i) - 1.0);
  p.zero_residual = true;
  return p;
}

// Trigonometric system; r(0) = 0.
NlsProblem trigonometric(Index d) {
  NlsProblem p;
  p.name = "trigonometric";
  p.d = p.n = d;
  const auto dd = static_cast<double>(d);
  p.residual = [d, dd](const Vector& x) {
    const double cos_sum = x.array().cos().sum();
    Vector r(d);
    for (Index i = 0; i < d; ++i) {
      r[i] = dd - cos_sum + static_cast<double>(i + 1) * (1.0 - std::cos(x[i])) -
             std::sin(x[i]);
    }
    return r;
  };
  p.jacobian_action = [d](const Vector& x, const Vector& v) {
    const double shared = x.array().sin().matrix().dot(v);
    Vector out(d);
    for (Index i = 0; i < d; ++i) {
      out[i] = shared +
               (static_cast<double>(i + 1) * std::sin(x[i]) - std::cos(x[i])) * v[i];
    }
    return out;
  };
  p.x0 = Vector::Constant(d, 1.0 / dd);
  p.zero_residual = true;
  p.f_star = 0.0;
  return p;
}

// Bratu problem -Laplace(u) = lambda exp(u) on the unit square, 5-point
// stencil on an m x m interior grid, d = m^2, lambda = 4.
NlsProblem bratu2d(Index d) {
  const auto m = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(d))));
  NlsProblem p;
  p.name = "bratu2d";
  p.d = p.n = d;
  const double h = 1.0 / static_cast<double>(m + 1);
  const double scale = h * h * 4.0;
  auto at = [m](const Vector& u, Index i, Index j) {
    return (i < 0 || j < 0 || i >= m || j >= m) ? 0.0 : u[i * m + j];
  };
  p.residual = [d, m, scale, at](const Vector& u) {
    Vector r(d);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        const double c = u[i * m + j];
        r[i * m + j] = 4.0 * c - at(u, i - 1, j) - at(u, i + 1, j) - at(u, i, j - 1) -
                       at(u, i, j + 1) - scale * std::exp(c);
      }
    }
    return r;
  };
  p.jacobian_action = [d, m, scale, at](const Vector& u, const Vector& v) {
    Vector out(d);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        const Index k = i * m + j;
        out[k] = (4.0 - scale * std::exp(u[k])) * v[k] - at(v, i - 1, j) - at(v, i + 1, j) -
                 at(v, i, j - 1) - at(v, i, j + 1);
      }
    }
    return out;
  };
  p.x0 = Vector::Zero(d);
  p.zero_residual = true;
  return p;
}

// Gradient of the oscillating-path function
//   1/4 (x_1 - 1)^2 + rho sum_i (x_{i+1} - 2 x_i^2 + 1)^2,  rho = 500,
// as a square system. Its Jacobian is the (tridiagonal) Hessian.
NlsProblem oscillatory_gradient(Index d) {
  constexpr double rho = 500.0;
  NlsProblem p;
  p.name = "oscillatory_gradient";
  p.d = p.n = d;
  p.residual = [d](const Vector& x) {
    Vector r = Vector::Zero(d);
    r[0] = 0.5 * (x[0] - 1.0);
    for (Index i = 0; i + 1 < d; ++i) {
      const double a = x[i + 1] - 2.0 * x[i] * x[i] + 1.0;
      r[i] += -8.0 * rho * x[i] * a;
      r[i + 1] += 2.0 * rho * a;
    }
    return r;
  };
  p.jacobian_action = [d](const Vector& x, const Vector& v) {
    Vector out = Vector::Zero(d);
    out[0] = 0.5 * v[0];
    for (Index i = 0; i + 1 < d; ++i) {
      const double a = x[i + 1] - 2.0 * x[i] * x[i] + 1.0;
      // d a / d x_i = -4 x_i, d a / d x_{i+1} = 1
      const double da = -4.0 * x[i] * v[i] + v[i + 1];
      out[i] += -8.0 * rho * (v[i] * a + x[i] * da);
      out[i + 1] += 2.0 * rho * da;
    }
    return out;
  };
  p.x0 = Vector::Ones(d);
  p.x0[0] = -2.0;
  p.zero_residual = true;
  p.f_star = 0.0;
  p.x_star = Vector::Ones(d);
  return p;
}

// Brown almost-linear system.
NlsProblem brown_almost_linear(Index d) {
  NlsProblem p;
  p.name = "brown_almost_linear";
  p.d = p.n = d;
  const auto dd = static_cast<double>(d);
  p.residual = [d, dd](const Vector& x) {
    const double sum = x.sum();
    Vector r(d);
    for (Index i = 0; i + 1 < d; ++i) r[i] = x[i] + sum - (dd + 1.0);
    r[d - 1] = x.prod() - 1.0;
    return r;
  };
  p.jacobian_action = [d](const Vector& x, const Vector& v) {
    const double vsum = v.sum();
    Vector out(d);
    for (Index i = 0; i + 1 < d; ++i) out[i] = v[i] + vsum;
    // sum_j prod_{k != j} x_k v_j via prefix and suffix products.
    std::vector<double> suffix(d + 1, 1.0);
    for (Index j = d - 1; j >= 0; --j) suffix[j] = suffix[j + 1] * x[j];
    double prefix = 1.0;
    double acc = 0.0;
    for (Index j = 0; j < d; ++j) {
      acc += prefix * suffix[j + 1] * v[j];
      prefix *= x[j];
    }
    out[d - 1] = acc;
    return out;
  };
  p.x0 = Vector::Constant(d, 0.5);
  p.zero_residual = true;
  p.f_star = 0.0;
  p.x_star = Vector::Ones(d);
  return p;
}

// Penalty function I, n = d + 1, nonzero residual.
NlsProblem penalty1(Index d) {
  const double root_a = std::sqrt(1e-5);
  NlsProblem p;
  p.name = "penalty1";
  p.d = d;
  p.n = d + 1;
  p.residual = [d, root_a](const Vector& x) {
    Vector r(d + 1);
    r.head(d) = root_a * (x.array() - 1.0).matrix();
    r[d] = x.squaredNorm() - 0.25;
    return r;
  };
  p.jacobian_action = [d, root_a](const Vector& x, const Vector& v) {
    Vector out(d + 1);
    out.head(d) = root_a * v;
    out[d] = 2.0 * x.dot(v);
    return out;
  };
  p.x0.resize(d);
  for (Index i = 0; i < d; ++i) p.x0[i] = static_cast<double>(i + 1);
  p.zero_residual = false;
  return p;
}

// Linear function of full rank, n = 2d, minimum f* = d/2 at x = -1.
NlsProblem linear_full_rank(Index d) {
  const Index n = 2 * d;
  const double w = 2.0 / static_cast<double>(n);
  NlsProblem p;
  p.name = "linear_full_rank";
  p.d = d;
  p.n = n;
  p.residual = [d, n, w](const Vector& x) {
    const double shared = w * x.sum() + 1.0;
    Vector r = Vector::Constant(n, -shared);
    r.head(d) += x;
    return r;
  };
  p.jacobian_action = [d, n, w](const Vector& /*x*/, const Vector& v) {
    Vector out = Vector::Constant(n, -w * v.sum());
    out.head(d) += v;
    return out;
  };
  p.x0 = Vector::Ones(d);
  p.zero_residual = false;
  p.f_star = 0.5 * static_cast<double>(n - d);
  p.x_star = Vector::Constant(d, -1.0);
  return p;
}

struct Family {
  const char* name;
  NlsProblem (*make)(Index);
  bool zero_residual;
};

constexpr Family kFamilies[] = {
    {"broyden_tridiagonal", broyden_tridiagonal, true},
    {"broyden_banded", broyden_banded, true},
    {"extended_rosenbrock", extended_rosenbrock, true},
    {"chained_rosenbrock", chained_rosenbrock, true},
    {"boundary_value", boundary_value, true},
    {"integral_equation", integral_equation, true},
    {"trigonometric", trigonometric, true},
    {"bratu2d", bratu2d, true},
    {"oscillatory_gradient", oscillatory_gradient, true},
    {"brown_almost_linear", brown_almost_linear, true},
    {"penalty1", penalty1, false},
    {"linear_full_rank", linear_full_rank, false},
};

const Family& find_family(std::string_view name) {
  for (const auto& f : kFamilies) {
    if (name == f.name) return f;
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

bool is_square(Index d) {
  const auto m = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(d))));
  return m * m == d;
}

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : kFamilies) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

Index admissible_dimension(std::string_view name, Index d) {
  const std::string_view family = find_family(name).name;
  d = std::max<Index>(d, 2);
  if (family == "extended_rosenbrock") return d - d % 2;
  if (family == "bratu2d") {
    const auto m = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(d))));
    return std::max<Index>(m, 2) * std::max<Index>(m, 2);
  }
  return d;
}

NlsProblem make_problem(std::string_view name, Index d) {
  const Family& family = find_family(name);
  const std::string_view fname = family.name;
  require(d >= 2, name, d, "need d >= 2");
  if (fname == "extended_rosenbrock") require(d % 2 == 0, name, d, "d must be even");
  if (fname == "bratu2d") require(is_square(d), name, d, "d must be a perfect square");
  NlsProblem p = family.make(d);
  if (p.zero_residual && !p.f_star) p.f_star = 0.0;
  return p;
}

std::vector<NlsProblem> problem_suite(Index d) {
  std::vector<NlsProblem> out;
  for (const auto& f : kFamilies) out.push_back(make_problem(f.name, admissible_dimension(f.name, d)));
  return out;
}

std::vector<NlsProblem> zero_residual_suite(Index d) {
  std::vector<NlsProblem> out;
  for (const auto& f : kFamilies) {
    if (f.zero_residual) out.push_back(make_problem(f.name, admissible_dimension(f.name, d)));
  }
  return out;
}

}  // namespace rsopt
