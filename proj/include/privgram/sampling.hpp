// Copyright 2026 The privgram Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "privgram/dataset.hpp"
#include "privgram/errors.hpp"
#include "privgram/linalg.hpp"
#include "privgram/rng.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {

inline RowMatrixXd sample_gaussian_matrix(RngStream& rng, Eigen::Index rows,
                                          Eigen::Index cols, double sigma) {
  if (rows < 0 || cols < 0) {
    throw InputError("sample_gaussian_matrix: negative shape");
  }
  if (!(sigma >= 0.0)) {
    throw InputError("sample_gaussian_matrix: sigma must be >= 0");
  }
  RowMatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.gaussian(sigma);
  }
  return out;
}

inline SymMatrix sample_symmetric_gaussian(RngStream& rng, int dim,
                                           double sigma) {
  if (!(sigma >= 0.0)) {
    throw InputError("sample_symmetric_gaussian: sigma must be >= 0");
  }
  SymMatrix out(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) out.set(i, j, rng.gaussian(sigma));
  }
  return out;
}

// Scale matrix and degrees of freedom of a Wishart distribution W_d(V, m).
struct WishartSpec {
  WishartSpec(SymMatrix scale_in, long dof_in)
      : scale(std::move(scale_in)), dof(dof_in) {
    if (dof < 1) throw InputError("WishartSpec: dof must be >= 1");
    if (!is_positive_definite(scale)) {
      throw InputError("WishartSpec: scale matrix must be positive definite");
    }
  }

  SymMatrix scale;
  long dof;
};

namespace internal {

// Lower-triangular Bartlett factor T: T[i][i] = sqrt(chi2_{dof-i}), strictly
// lower entries standard normal, drawn row by row.
inline Eigen::MatrixXd bartlett_factor(RngStream& rng, int dim, double dof) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j) t(i, j) = rng.gaussian();
    t(i, i) = std::sqrt(rng.chi_square(dof - i));
  }
  return t;
}

inline Eigen::MatrixXd cholesky_factor_checked(const SymMatrix& m,
                                               const char* who) {
  CholeskyResult chol = cholesky_with_tolerance(m, 0.0);
  if (!chol.factor.has_value()) {
    throw InputError(std::string(who) + ": scale matrix must be positive definite");
  }
  return *std::move(chol.factor);
}

}  // namespace internal

// One draw from W_d(V, m).  For m >= d this is the Bartlett construction
// W = (L T)(L T)ᵀ with L = chol(V); for integer m < d the distribution is
// rank-deficient and the draw falls back to summing m outer products of
// N(0, V) vectors.
inline SymMatrix sample_wishart(RngStream& rng, const WishartSpec& spec) {
  const int d = spec.scale.dim();
  const Eigen::MatrixXd lower =
      internal::cholesky_factor_checked(spec.scale, "sample_wishart");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  if (spec.dof >= d) {
    const Eigen::MatrixXd t =
        internal::bartlett_factor(rng, d, static_cast<double>(spec.dof));
    const Eigen::MatrixXd product = lower * t;
    acc.selfadjointView<Eigen::Upper>().rankUpdate(product, 1.0);
  } else {
    Eigen::VectorXd g(d);
    for (long k = 0; k < spec.dof; ++k) {
      for (int i = 0; i < d; ++i) g(i) = rng.gaussian();
      const Eigen::VectorXd v = lower * g;
      acc.selfadjointView<Eigen::Upper>().rankUpdate(v, 1.0);
    }
  }
  return SymMatrix::from_dense(acc);
}

// One draw from the inverse-Wishart W⁻¹_d(Ψ, dof): Y ~ W_d(Ψ⁻¹, dof) via
// Bartlett, output Y⁻¹.  Everything stays in triangular factors:
// Y⁻¹ = GᵀG with G solving T G = chol(Ψ)ᵀ.
inline SymMatrix sample_inverse_wishart(RngStream& rng, const SymMatrix& psi,
                                        long dof) {
  const int d = psi.dim();
  if (dof <= d - 1) {
    throw InputError("sample_inverse_wishart: dof must exceed dim - 1");
  }
  const Eigen::MatrixXd lower =
      internal::cholesky_factor_checked(psi, "sample_inverse_wishart");
  const Eigen::MatrixXd t =
      internal::bartlett_factor(rng, d, static_cast<double>(dof));
  const Eigen::MatrixXd g = t.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd(lower.transpose()));
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  acc.selfadjointView<Eigen::Upper>().rankUpdate(g.transpose(), 1.0);
  return SymMatrix::from_dense(acc);
}

}  // namespace privgram
