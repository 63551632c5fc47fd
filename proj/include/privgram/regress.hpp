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
#include <algorithm>
#include <set>
#include <vector>

#include "privgram/errors.hpp"
#include "privgram/linalg.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {

// Which column of a Gram matrix is the label and which columns are the
// features.  The intercept, when used, is an all-ones column added during
// data generation, so here it is just another feature index.
struct RegressionTask {
  RegressionTask(int label_in, std::vector<int> features_in,
                 bool include_intercept_in = true)
      : label(label_in),
        features(std::move(features_in)),
        include_intercept(include_intercept_in) {
    if (label < 0) throw InputError("RegressionTask: negative label index");
    if (features.empty()) {
      throw InputError("RegressionTask: no feature columns");
    }
    std::set<int> seen;
    for (const int f : features) {
      if (f < 0) throw InputError("RegressionTask: negative feature index");
      if (f == label) {
        throw InputError("RegressionTask: label cannot also be a feature");
      }
      if (!seen.insert(f).second) {
        throw InputError("RegressionTask: duplicate feature index");
      }
    }
  }

  int label;
  std::vector<int> features;
  bool include_intercept;
};

struct Coefficients {
  Eigen::VectorXd values;
};

inline double l2_error(const Coefficients& estimate,
                       const Coefficients& truth) {
  if (estimate.values.size() != truth.values.size()) {
    throw InputError("l2_error: coefficient vectors differ in length");
  }
  return (estimate.values - truth.values).norm();
}

// The minimizer of beta' M beta over vectors with the label coordinate fixed
// at -1: beta_F = M[F,F]^{-1} M[F,label].
inline Coefficients solve_from_gram(const SymMatrix& m,
                                    const RegressionTask& task) {
  const int d = m.dim();
  if (task.label >= d) throw InputError("solve_from_gram: label out of range");
  const int f = static_cast<int>(task.features.size());
  if (f == 0) throw InputError("solve_from_gram: no feature columns");
  SymMatrix block(f);
  Eigen::VectorXd rhs(f);
  for (int i = 0; i < f; ++i) {
    const int fi = task.features[i];
    if (fi >= d) throw InputError("solve_from_gram: feature out of range");
    for (int j = i; j < f; ++j) block.set(i, j, m(fi, task.features[j]));
    rhs(i) = m(fi, task.label);
  }
  return {solve_spd(block, rhs)};
}

// Ordinary least squares through the normal equations.
inline Coefficients ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw InputError("ols: row count mismatch");
  const int p = static_cast<int>(x.cols());
  Eigen::MatrixXd gram_x = Eigen::MatrixXd::Zero(p, p);
  gram_x.selfadjointView<Eigen::Upper>().rankUpdate(x.transpose(), 1.0);
  return {solve_spd(SymMatrix::from_dense(gram_x), x.transpose() * y)};
}

// Ridge regression (XᵀX + w^2 I)^{-1} Xᵀ y.
inline Coefficients ridge_closed_form(const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& y, double w) {
  if (!(w >= 0.0)) throw InputError("ridge_closed_form: w must be >= 0");
  if (x.rows() != y.size()) {
    throw InputError("ridge_closed_form: row count mismatch");
  }
  const int p = static_cast<int>(x.cols());
  Eigen::MatrixXd gram_x = Eigen::MatrixXd::Zero(p, p);
  gram_x.selfadjointView<Eigen::Upper>().rankUpdate(x.transpose(), 1.0);
  gram_x.diagonal().array() += w * w;
  return {solve_spd(SymMatrix::from_dense(gram_x), x.transpose() * y)};
}

}  // namespace privgram
