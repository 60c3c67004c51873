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


#include "rsopt/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rsopt {
namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

std::string spec_error(const SketchSpec& spec, const std::string& what) {
  return "invalid sketch (" + std::string(to_string(spec.kind)) +
         ", l=" + std::to_string(spec.l) + ", d=" + std::to_string(spec.d) +
         "): " + what;
}

// Builds compressed columns from per-column (row, value) lists.
void pack_columns(const std::vector<std::vector<std::pair<Index, double>>>& cols,
                  std::vector<Index>& col_ptr, std::vector<Index>& row_idx,
                  std::vector<double>& values) {
  col_ptr.assign(cols.size() + 1, 0);
  row_idx.clear();
  values.clear();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    auto entries = cols[j];
    std::sort(entries.begin(), entries.end());
    for (const auto& [r, v] : entries) {
      row_idx.push_back(r);
      values.push_back(v);
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
}

}  // namespace

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::ScaledGaussian: return "gaussian";
    case SketchKind::SHashing: return "hashing";
    case SketchKind::StableOneHashing: return "stable1hashing";
    case SketchKind::ScaledSampling: return "sampling";
    case SketchKind::Identity: return "identity";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  for (auto kind : {SketchKind::ScaledGaussian, SketchKind::SHashing,
                    SketchKind::StableOneHashing, SketchKind::ScaledSampling,
                    SketchKind::Identity}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown sketch kind '" + std::string(name) + "'");
}

void SketchSpec::validate() const {
  if (d < 1) throw std::invalid_argument(spec_error(*this, "d must be >= 1"));
  if (l < 1 || l > d) {
    throw std::invalid_argument(spec_error(*this, "need 1 <= l <= d"));
  }
  if (kind == SketchKind::SHashing && (s < 1 || s > l)) {
    throw std::invalid_argument(spec_error(*this, "need 1 <= s <= l"));
  }
  if (kind == SketchKind::Identity && l != d) {
    throw std::invalid_argument(spec_error(*this, "identity requires l == d"));
  }
}

SketchMatrix SketchMatrix::identity(Index d) {
  SketchMatrix m;
  m.spec_ = SketchSpec{SketchKind::Identity, d, d, 1, 0};
  m.spec_.validate();
  return m;
}

Vector SketchMatrix::apply(const Vector& v) const {
  if (v.size() != cols()) {
    throw std::invalid_argument("apply: vector length " + std::to_string(v.size()) +
                                " != d=" + std::to_string(cols()));
  }
  switch (kind()) {
    case SketchKind::Identity: return v;
    case SketchKind::ScaledGaussian: return dense_ * v;
    default: break;
  }
  Vector out = Vector::Zero(rows());
  for (Index j = 0; j < cols(); ++j) {
    const double vj = v[j];
    if (vj == 0.0) continue;
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      out[row_idx_[p]] += values_[p] * vj;
    }
  }
  return out;
}

Vector SketchMatrix::apply_transpose(const Vector& shat) const {
  if (shat.size() != rows()) {
    throw std::invalid_argument("apply_transpose: vector length " +
                                std::to_string(shat.size()) +
                                " != l=" + std::to_string(rows()));
  }
  switch (kind()) {
    case SketchKind::Identity: return shat;
    case SketchKind::ScaledGaussian: return dense_.transpose() * shat;
    default: break;
  }
  Vector out(cols());
  for (Index j = 0; j < cols(); ++j) {
    double acc = 0.0;
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      acc += values_[p] * shat[row_idx_[p]];
    }
    out[j] = acc;
  }
  return out;
}

Vector SketchMatrix::row(Index i) const {
  if (i < 0 || i >= rows()) throw std::out_of_range("row index out of range");
  switch (kind()) {
    case SketchKind::Identity: return Vector::Unit(cols(), i);
    case SketchKind::ScaledGaussian: return dense_.row(i).transpose();
    default: break;
  }
  Vector out = Vector::Zero(cols());
  for (Index j = 0; j < cols(); ++j) {
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] == i) out[j] += values_[p];
    }
  }
  return out;
}

Matrix SketchMatrix::to_dense() const {
  switch (kind()) {
    case SketchKind::Identity: return Matrix::Identity(rows(), cols());
    case SketchKind::ScaledGaussian: return dense_;
    default: break;
  }
  Matrix out = Matrix::Zero(rows(), cols());
  for (Index j = 0; j < cols(); ++j) {
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      out(row_idx_[p], j) += values_[p];
    }
  }
  return out;
}

Matrix SketchMatrix::gram() const {
  switch (kind()) {
    case SketchKind::Identity: return Matrix::Identity(rows(), rows());
    case SketchKind::ScaledGaussian: {
      Matrix g(rows(), rows());
      g.setZero();
      g.selfadjointView<Eigen::Lower>().rankUpdate(dense_);
      g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
      return g;
    }
    default: break;
  }
  Matrix g = Matrix::Zero(rows(), rows());
  for (Index j = 0; j < cols(); ++j) {
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      for (Index q = col_ptr_[j]; q < col_ptr_[j + 1]; ++q) {
        g(row_idx_[p], row_idx_[q]) += values_[p] * values_[q];
      }
    }
  }
  return g;
}

Index SketchMatrix::nnz() const {
  switch (kind()) {
    case SketchKind::Identity: return cols();
    case SketchKind::ScaledGaussian: return dense_.size();
    default: return static_cast<Index>(values_.size());
  }
}

double SketchMatrix::spectral_norm() const {
  if (kind() == SketchKind::Identity) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram(), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

std::span<const Index> SketchMatrix::column_rows(Index j) const {
  if (col_ptr_.empty()) return {};
  return {row_idx_.data() + col_ptr_[j],
          static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
}

std::span<const double> SketchMatrix::column_values(Index j) const {
  if (col_ptr_.empty()) return {};
  return {values_.data() + col_ptr_[j],
          static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
}

SketchMatrix draw(const SketchSpec& spec, Rng& rng) {
  spec.validate();
  SketchMatrix m;
  m.spec_ = spec;
  const Index l = spec.l;
  const Index d = spec.d;

  switch (spec.kind) {
    case SketchKind::Identity:
      return m;

    case SketchKind::ScaledGaussian: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(l));
      m.dense_.resize(l, d);
      for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < l; ++i) m.dense_(i, j) = scale * rng.normal();
      }
      return m;
    }

    case SketchKind::SHashing: {
      // s distinct rows per column: partial Fisher-Yates over [0, l).
      const double value = 1.0 / std::sqrt(static_cast<double>(spec.s));
      std::vector<std::vector<std::pair<Index, double>>> cols(d);
      std::vector<Index> pool(l);
      for (Index j = 0; j < d; ++j) {
        std::iota(pool.begin(), pool.end(), Index{0});
        for (Index k = 0; k < spec.s; ++k) {
          const auto pick = k + static_cast<Index>(rng.uniform_index(l - k));
          std::swap(pool[k], pool[pick]);
          cols[j].emplace_back(pool[k], rng.coin() ? value : -value);
        }
      }
      pack_columns(cols, m.col_ptr_, m.row_idx_, m.values_);
      return m;
    }

    case SketchKind::StableOneHashing: {
      // Row labels [l] repeated ceil(d/l) times; sample d of them without
      // replacement, so no row receives more than ceil(d/l) columns.
      const Index reps = ceil_div(d, l);
      std::vector<Index> pool(l * reps);
      for (Index i = 0; i < l * reps; ++i) pool[i] = i % l;
      const Index n = static_cast<Index>(pool.size());
      std::vector<std::vector<std::pair<Index, double>>> cols(d);
      for (Index j = 0; j < d; ++j) {
        const auto pick = j + static_cast<Index>(rng.uniform_index(n - j));
        std::swap(pool[j], pool[pick]);
        cols[j].emplace_back(pool[j], rng.coin() ? 1.0 : -1.0);
      }
      pack_columns(cols, m.col_ptr_, m.row_idx_, m.values_);
      return m;
    }

    case SketchKind::ScaledSampling: {
      const double value = std::sqrt(static_cast<double>(d) / static_cast<double>(l));
      std::vector<std::vector<std::pair<Index, double>>> cols(d);
      // Rows take distinct columns (partial Fisher-Yates).
      std::vector<Index> pool(static_cast<std::size_t>(d));
      std::iota(pool.begin(), pool.end(), Index{0});
      for (Index i = 0; i < l; ++i) {
        const auto pick = i + static_cast<Index>(rng.uniform_index(d - i));
        std::swap(pool[i], pool[pick]);
        cols[pool[i]].emplace_back(i, value);
      }
      pack_columns(cols, m.col_ptr_, m.row_idx_, m.values_);
      return m;
    }
  }
  throw std::logic_error("draw: unhandled sketch kind");
}

SketchMatrix draw(const SketchSpec& spec) {
  Rng rng(spec.seed);
  return draw(spec, rng);
}

GrownSketch grow_sketch(const SketchMatrix& sketch, Index new_l, Rng& rng) {
  const Index d = sketch.cols();
  const Index old_l = sketch.rows();
  new_l = std::min(new_l, d);
  if (new_l <= old_l) return {sketch, old_l, 1.0};
  if (new_l == d) return {SketchMatrix::identity(d), 0, 1.0};

  SketchSpec spec = sketch.spec();
  spec.l = new_l;
  const double scale = std::sqrt(static_cast<double>(old_l) / static_cast<double>(new_l));

  switch (sketch.kind()) {
    case SketchKind::ScaledGaussian: {
      SketchMatrix extra = draw(SketchSpec{spec.kind, new_l - old_l, d, spec.s, spec.seed}, rng);
      SketchMatrix m;
      m.spec_ = spec;
      m.dense_.resize(new_l, d);
      // Entries must be N(0, 1/new_l): both blocks were drawn at a coarser
      // variance and are rescaled.
      m.dense_.topRows(old_l) = scale * sketch.dense_;
      const double extra_scale = std::sqrt(static_cast<double>(new_l - old_l) /
                                           static_cast<double>(new_l));
      m.dense_.bottomRows(new_l - old_l) = extra_scale * extra.dense_;
      return {std::move(m), old_l, scale};
    }
    case SketchKind::ScaledSampling: {
      const double value = std::sqrt(static_cast<double>(d) / static_cast<double>(new_l));
      std::vector<std::vector<std::pair<Index, double>>> cols(d);
      for (Index j = 0; j < d; ++j) {
        for (Index p = sketch.col_ptr_[j]; p < sketch.col_ptr_[j + 1]; ++p) {
          cols[j].emplace_back(sketch.row_idx_[p], value);
        }
      }
      std::vector<Index> unused;
      for (Index j = 0; j < d; ++j) {
        if (cols[j].empty()) unused.push_back(j);
      }
      const auto free_count = static_cast<Index>(unused.size());
      for (Index i = old_l; i < new_l; ++i) {
        const Index k = i - old_l;
        const auto pick = k + static_cast<Index>(rng.uniform_index(free_count - k));
        std::swap(unused[k], unused[pick]);
        cols[unused[k]].emplace_back(i, value);
      }
      SketchMatrix m;
      m.spec_ = spec;
      pack_columns(cols, m.col_ptr_, m.row_idx_, m.values_);
      return {std::move(m), old_l, scale};
    }
    default:
      if (spec.kind == SketchKind::SHashing) spec.s = std::min(spec.s, new_l);
      return {draw(spec, rng), 0, 1.0};
  }
}

EnsembleTheory theory_params(const SketchSpec& spec, double eps_s, double delta2,
                             double nu, HashingConstants constants) {
  spec.validate();
  const auto l = static_cast<double>(spec.l);
  const auto d = static_cast<double>(spec.d);
  EnsembleTheory t;
  t.eps_s = eps_s;
  t.nu = nu;

  const bool stable = spec.kind == SketchKind::StableOneHashing;
  const double eps_hi = stable ? 0.75 : 1.0;
  if (!(eps_s > 0.0 && eps_s < eps_hi)) {
    throw std::invalid_argument("theory_params: eps_s=" + std::to_string(eps_s) +
                                " outside (0, " + std::to_string(eps_hi) + ") for " +
                                std::string(to_string(spec.kind)));
  }

  switch (spec.kind) {
    case SketchKind::ScaledGaussian:
      if (!(delta2 > 0.0 && delta2 < 1.0)) {
        throw std::invalid_argument("theory_params: gaussian needs delta2 in (0, 1)");
      }
      t.delta1 = std::exp(-eps_s * eps_s * l / 4.0);
      t.delta2 = delta2;
      t.s_max = 1.0 + std::sqrt(d / l) + std::sqrt(2.0 * std::log(1.0 / delta2) / l);
      break;
    case SketchKind::SHashing:
      t.delta1 = std::exp(-l * eps_s * eps_s / constants.c1);
      t.s_max = std::sqrt(d / static_cast<double>(spec.s));
      break;
    case SketchKind::StableOneHashing: {
      const double shifted = eps_s - 0.25;
      t.delta1 = std::exp(-l * shifted * shifted / constants.c3);
      t.s_max = std::sqrt(static_cast<double>(ceil_div(spec.d, spec.l)));
      break;
    }
    case SketchKind::ScaledSampling:
      if (!(nu * nu * d >= 1.0 - 1e-12 && nu <= 1.0)) {
        throw std::invalid_argument("theory_params: sampling needs nu in [1/sqrt(d), 1]");
      }
      t.delta1 = std::exp(-eps_s * eps_s * l / (2.0 * d * nu * nu));
      t.s_max = std::sqrt(d / l);
      break;
    case SketchKind::Identity:
      t.delta1 = 0.0;
      t.s_max = 1.0;
      break;
  }
  return t;
}

double embedding_trial(const SketchSpec& spec, const Vector& y, double eps_s,
                       long trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("embedding_trial: trials must be >= 1");
  if (y.size() != spec.d) throw std::invalid_argument("embedding_trial: y has wrong length");
  const double y2 = y.squaredNorm();
  if (!(y2 > 0.0)) throw std::invalid_argument("embedding_trial: y must be nonzero");
  const double threshold = (1.0 - eps_s) * y2;
  long failures = 0;
  for (long t = 0; t < trials; ++t) {
    const SketchMatrix s = draw(spec, rng);
    if (s.apply(y).squaredNorm() < threshold) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

}  // namespace rsopt
