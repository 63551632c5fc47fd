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

#include "privgram/errors.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A dataset of n rows in R^d together with the public bound B on each row's
// l2 norm.  Construction validates the bound, so any Dataset in flight
// satisfies it.
class Dataset {
 public:
  Dataset(RowMatrixXd rows, double row_bound)
      : rows_(std::move(rows)), row_bound_(row_bound) {
    if (!(std::isfinite(row_bound_) && row_bound_ > 0.0)) {
      throw InputError("Dataset: row bound must be positive and finite");
    }
    if (rows_.cols() < 2) throw InputError("Dataset: need dimension >= 2");
    if (rows_.rows() < 1) throw InputError("Dataset: need at least one row");
    if (!rows_.allFinite()) throw InputError("Dataset: non-finite entry");
    // Tiny slack over B so rows clipped to norm exactly B survive the
    // rounding of the rescale.
    const double limit = row_bound_ * (1.0 + 1e-12);
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
      if (rows_.row(i).norm() > limit) {
        throw InputError("Dataset: row norm exceeds the declared bound");
      }
    }
  }

  const RowMatrixXd& rows() const { return rows_; }
  double row_bound() const { return row_bound_; }
  Eigen::Index n() const { return rows_.rows(); }
  int dim() const { return static_cast<int>(rows_.cols()); }

 private:
  RowMatrixXd rows_;
  double row_bound_;
};

// Shrinks every row longer than the bound back onto the radius-B sphere and
// wraps the result in a Dataset.
inline Dataset clip_rows(RowMatrixXd raw, double bound) {
  if (!(std::isfinite(bound) && bound > 0.0)) {
    throw InputError("clip_rows: bound must be positive and finite");
  }
  if (!raw.allFinite()) throw InputError("clip_rows: non-finite entry");
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double norm = raw.row(i).norm();
    if (norm > bound) raw.row(i) *= bound / norm;
  }
  return Dataset(std::move(raw), bound);
}

// Second-moment matrix AᵀA, accumulated over fixed-size row chunks in a
// single left-to-right pass.
inline SymMatrix gram(const Dataset& data) {
  constexpr Eigen::Index kChunk = 4096;
  const Eigen::Index n = data.n();
  const int d = data.dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index count = std::min(kChunk, n - start);
    acc.selfadjointView<Eigen::Upper>().rankUpdate(
        data.rows().middleRows(start, count).transpose(), 1.0);
  }
  return SymMatrix::from_dense(acc);
}

}  // namespace privgram
