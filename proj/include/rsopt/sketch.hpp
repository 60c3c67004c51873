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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsopt/rng.hpp"
#include "rsopt/types.hpp"

namespace rsopt {

enum class SketchKind {
  ScaledGaussian,
  SHashing,
  StableOneHashing,
  ScaledSampling,
  Identity,
};

std::string_view to_string(SketchKind kind);
SketchKind parse_sketch_kind(std::string_view name);

/// Parameters of a random l x d sketching distribution.
struct SketchSpec {
  SketchKind kind = SketchKind::ScaledGaussian;
  Index l = 1;
  Index d = 1;
  Index s = 3;  // nonzeros per column, SHashing only
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless 1 <= l <= d, 1 <= s <= l for
  /// SHashing and l == d for Identity.
  void validate() const;

  bool operator==(const SketchSpec&) const = default;
};

struct GrownSketch;

/// A drawn sketching matrix S (l x d).
///
/// ScaledGaussian is stored dense. Every other random kind is stored as
/// compressed columns, since each of them is generated column by column or
/// has at most one nonzero per row. Identity carries no storage.
class SketchMatrix {
 public:
  static SketchMatrix identity(Index d);

  const SketchSpec& spec() const { return spec_; }
  SketchKind kind() const { return spec_.kind; }
  Index rows() const { return spec_.l; }
  Index cols() const { return spec_.d; }
  bool is_dense() const { return spec_.kind == SketchKind::ScaledGaussian; }

  /// S v. Costs O(nnz) for the sparse kinds.
  Vector apply(const Vector& v) const;
  /// S^T shat.
  Vector apply_transpose(const Vector& shat) const;
  /// Row i of S as a d-vector, i.e. S^T e_i.
  Vector row(Index i) const;

  Matrix to_dense() const;
  /// S S^T (l x l).
  Matrix gram() const;
  Index nnz() const;
  /// Largest singular value, from the eigenvalues of S S^T.
  double spectral_norm() const;

  // Column-compressed view; empty for the dense and identity kinds.
  std::span<const Index> column_rows(Index j) const;
  std::span<const double> column_values(Index j) const;
  const Matrix& dense() const { return dense_; }

 private:
  friend SketchMatrix draw(const SketchSpec& spec, Rng& rng);
  friend GrownSketch grow_sketch(const SketchMatrix& sketch, Index new_l,
                                 Rng& rng);

  SketchSpec spec_;
  Matrix dense_;
  std::vector<Index> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

/// Draws S from the distribution described by spec, consuming rng.
SketchMatrix draw(const SketchSpec& spec, Rng& rng);
/// Draws S with a generator seeded from spec.seed.
SketchMatrix draw(const SketchSpec& spec);

/// Result of enlarging a sketch to more rows.
///
/// For ScaledGaussian and ScaledSampling the first `reused` rows of the
/// enlarged matrix equal `scale` times the rows of the old one, so work done
/// with the old rows can be rescaled instead of repeated. Hashing kinds are
/// column structured and are redrawn (reused == 0). Reaching l == d yields
/// the identity.
struct GrownSketch {
  SketchMatrix sketch;
  Index reused = 0;
  double scale = 1.0;
};
GrownSketch grow_sketch(const SketchMatrix& sketch, Index new_l, Rng& rng);

/// Unspecified constants in the hashing embedding bounds.
struct HashingConstants {
  double c1 = 1.0;  // s-hashing
  double c3 = 1.0;  // stable 1-hashing
};

/// Closed-form quality parameters of an ensemble.
struct EnsembleTheory {
  double eps_s = 0.0;
  double delta1 = 0.0;  // P(||S y||^2 < (1 - eps_s)||y||^2) bound
  double delta2 = 0.0;  // P(||S|| > s_max) bound
  double s_max = 0.0;
  double nu = 1.0;      // gradient non-uniformity, sampling only

  double delta_s() const { return delta1 + delta2; }
};

/// Table of theoretical embedding and norm parameters.
///
/// delta2 is only used by ScaledGaussian (the other kinds have a
/// deterministic norm bound and report delta2 = 0). nu is only used by
/// ScaledSampling and must lie in [1/sqrt(d), 1].
///
/// The SHashing s_max is the customary sqrt(d/s). It is not a worst-case
/// bound when s > 1: two identical columns of a 2 x 2 matrix with s = 2
/// already give ||S|| = sqrt(2) > 1. The bound that always holds is the
/// Frobenius norm, sqrt(d).
EnsembleTheory theory_params(const SketchSpec& spec, double eps_s,
                             double delta2 = 0.0, double nu = 1.0,
                             HashingConstants constants = {});

/// Empirical rate of draws with ||S y||^2 < (1 - eps_s)||y||^2.
double embedding_trial(const SketchSpec& spec, const Vector& y, double eps_s,
                       long trials, Rng& rng);

}  // namespace rsopt
