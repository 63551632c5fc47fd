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
#include <limits>
#include <optional>

#include "privgram/errors.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {

// Smallest singular value of a symmetric matrix, i.e. the smallest eigenvalue
// magnitude.  With psd_hint the caller asserts the matrix is positive
// semidefinite and gets the smallest algebraic eigenvalue instead, which for
// PSD inputs is the same quantity without the absolute value.
inline double min_singular_value(const SymMatrix& m, bool psd_hint = false) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("min_singular_value: eigendecomposition failed");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  if (psd_hint) return values.minCoeff();
  return values.cwiseAbs().minCoeff();
}

// Result of an attempted Cholesky factorization M = L Lᵀ.  The factor is only
// present when every pivot stayed above the requested tolerance.
struct CholeskyResult {
  std::optional<Eigen::MatrixXd> factor;
  double min_pivot = std::numeric_limits<double>::infinity();
};

// Lower-triangular Cholesky with an explicit pivot threshold.  The pivot is
// the diagonal value remaining before each square root.
inline CholeskyResult cholesky_with_tolerance(const SymMatrix& m, double tol) {
  const int d = m.dim();
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
  double min_pivot = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    double pivot = m(j, j);
    for (int k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    min_pivot = std::min(min_pivot, pivot);
    if (!(pivot > tol)) return {std::nullopt, min_pivot};
    lower(j, j) = std::sqrt(pivot);
    for (int i = j + 1; i < d; ++i) {
      double sum = m(i, j);
      for (int k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
      lower(i, j) = sum / lower(j, j);
    }
  }
  return {lower, min_pivot};
}

inline double default_pd_tolerance(const SymMatrix& m) {
  return 1e-10 * m.max_abs_diagonal();
}

inline bool is_positive_definite(const SymMatrix& m, double tol) {
  if (tol < 0) throw InputError("is_positive_definite: tol must be >= 0");
  return cholesky_with_tolerance(m, tol).factor.has_value();
}

inline bool is_positive_definite(const SymMatrix& m) {
  return is_positive_definite(m, default_pd_tolerance(m));
}

// Solves M x = rhs through Cholesky with a relative pivot floor.  Refuses
// near-singular systems instead of falling back to a pseudo-inverse so that
// callers see the failure explicitly.
inline Eigen::VectorXd solve_spd(const SymMatrix& m, const Eigen::VectorXd& rhs,
                                 double pivot_floor_scale = 1e-12) {
  if (rhs.size() != m.dim()) throw InputError("solve_spd: size mismatch");
  const double floor = pivot_floor_scale * m.max_abs_diagonal();
  CholeskyResult chol = cholesky_with_tolerance(m, floor);
  if (!chol.factor.has_value()) {
    throw SingularSystemError("solve_spd: matrix not positive definite",
                              chol.min_pivot);
  }
  const Eigen::MatrixXd& lower = *chol.factor;
  Eigen::VectorXd y =
      lower.triangularView<Eigen::Lower>().solve(rhs);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

}  // namespace privgram
