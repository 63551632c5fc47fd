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
#include <cstddef>
#include <vector>

#include "privgram/errors.hpp"

namespace privgram {

// Dense symmetric matrix that stores only the upper triangle, so symmetry is
// exact by construction.  Entry (i, j) and entry (j, i) alias the same slot.
class SymMatrix {
 public:
  SymMatrix() : dim_(0) {}

  explicit SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw InputError("SymMatrix: dimension must be positive");
    cells_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
  }

  static SymMatrix identity(int dim, double scale = 1.0) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, scale);
    return m;
  }

  // Builds a SymMatrix from the upper triangle of a square dense matrix; the
  // strict lower triangle of the input is ignored.
  static SymMatrix from_dense(const Eigen::MatrixXd& dense) {
    if (dense.rows() != dense.cols()) {
      throw InputError("SymMatrix: dense input must be square");
    }
    SymMatrix m(static_cast<int>(dense.rows()));
    for (int i = 0; i < m.dim_; ++i) {
      for (int j = i; j < m.dim_; ++j) m.set(i, j, dense(i, j));
    }
    return m;
  }

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return cells_[slot(i, j)]; }

  void set(int i, int j, double value) { cells_[slot(i, j)] = value; }

  void add(int i, int j, double value) { cells_[slot(i, j)] += value; }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd out(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = i; j < dim_; ++j) {
        out(i, j) = (*this)(i, j);
        out(j, i) = (*this)(i, j);
      }
    }
    return out;
  }

  void add_scaled_identity(double scale) {
    for (int i = 0; i < dim_; ++i) add(i, i, scale);
  }

  SymMatrix& operator+=(const SymMatrix& other) {
    require_same_dim(other);
    for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] += other.cells_[k];
    return *this;
  }

  friend SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs) {
    lhs += rhs;
    return lhs;
  }

  SymMatrix& operator*=(double scale) {
    for (double& c : cells_) c *= scale;
    return *this;
  }

  friend SymMatrix operator*(SymMatrix lhs, double scale) {
    lhs *= scale;
    return lhs;
  }

  double max_abs_diagonal() const {
    double best = 0.0;
    for (int i = 0; i < dim_; ++i) best = std::max(best, std::abs((*this)(i, i)));
    return best;
  }

 private:
  std::size_t slot(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= dim_) throw InputError("SymMatrix: index out of range");
    const std::size_t row = static_cast<std::size_t>(i);
    return row * dim_ - row * (row - 1) / 2 + (j - i);
  }

  void require_same_dim(const SymMatrix& other) const {
    if (other.dim_ != dim_) throw InputError("SymMatrix: dimension mismatch");
  }

  int dim_;
  std::vector<double> cells_;
};

inline double frobenius_norm(const SymMatrix& m) {
  double sum = 0.0;
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) {
      const double v = m(i, j);
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

inline double frobenius_distance(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InputError("frobenius_distance: dimension mismatch");
  double sum = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) {
      const double v = a(i, j) - b(i, j);
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

}  // namespace privgram
