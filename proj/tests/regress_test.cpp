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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "privgram/dataset.hpp"
#include "privgram/errors.hpp"
#include "privgram/regress.hpp"
#include "privgram/rng.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {
namespace {

Eigen::MatrixXd random_matrix(RngStream& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  }
  return m;
}

SymMatrix random_pd(RngStream& rng, int dim) {
  const Eigen::MatrixXd g = random_matrix(rng, dim, dim);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g)
                                .householderQ();
  Eigen::VectorXd eigs(dim);
  for (int i = 0; i < dim; ++i) eigs(i) = 0.5 + 2.0 * rng.uniform();
  return SymMatrix::from_dense(q * eigs.asDiagonal() * q.transpose());
}

// Normal-equation solve carried out entirely in long double, the
// independent oracle for the double-precision path.
Eigen::VectorXd extended_precision_ols(const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  std::vector<std::vector<long double>> a(p,
                                          std::vector<long double>(p + 1, 0));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      long double acc = 0;
      for (int k = 0; k < n; ++k) {
        acc += static_cast<long double>(x(k, i)) * x(k, j);
      }
      a[i][j] = acc;
    }
    long double rhs = 0;
    for (int k = 0; k < n; ++k) {
      rhs += static_cast<long double>(x(k, i)) * y(k);
    }
    a[i][p] = rhs;
  }
  for (int col = 0; col < p; ++col) {
    int pivot = col;
    for (int row = col + 1; row < p; ++row) {
      if (std::abs(static_cast<double>(a[row][col])) >
          std::abs(static_cast<double>(a[pivot][col]))) {
        pivot = row;
      }
    }
    std::swap(a[col], a[pivot]);
    for (int row = col + 1; row < p; ++row) {
      const long double factor = a[row][col] / a[col][col];
      for (int j = col; j <= p; ++j) a[row][j] -= factor * a[col][j];
    }
  }
  Eigen::VectorXd beta(p);
  for (int row = p - 1; row >= 0; --row) {
    long double acc = a[row][p];
    for (int j = row + 1; j < p; ++j) acc -= a[row][j] * beta(j);
    beta(row) = static_cast<double>(acc / a[row][row]);
  }
  return beta;
}

TEST(RegressionTaskTest, ValidatesIndices) {
  EXPECT_NO_THROW(RegressionTask(3, {0, 1, 2}));
  EXPECT_THROW(RegressionTask(-1, {0}), InputError);
  EXPECT_THROW(RegressionTask(2, {0, 0}), InputError);
  EXPECT_THROW(RegressionTask(1, {0, 1}), InputError);
  EXPECT_THROW(RegressionTask(1, {}), InputError);
  EXPECT_THROW(RegressionTask(1, {0, -2}), InputError);
}

TEST(SolveFromGramTest, IdentityGramHasNoCrossTerms) {
  const SymMatrix m = SymMatrix::identity(3);
  const Coefficients beta = solve_from_gram(m, RegressionTask(2, {0, 1}));
  EXPECT_EQ(beta.values.size(), 2);
  EXPECT_DOUBLE_EQ(beta.values(0), 0.0);
  EXPECT_DOUBLE_EQ(beta.values(1), 0.0);
}

TEST(SolveFromGramTest, HandMinimizedQuadratic) {
  // Minimizing 2b^2 - 2b + 3 gives b = 1/2.
  SymMatrix m(2);
  m.set(0, 0, 2.0);
  m.set(0, 1, 1.0);
  m.set(1, 1, 3.0);
  const Coefficients beta = solve_from_gram(m, RegressionTask(1, {0}));
  EXPECT_NEAR(beta.values(0), 0.5, 1e-15);
}

TEST(SolveFromGramTest, NoiselessGramReproducesOls) {
  RngStream rng(50, 0);
  const Eigen::MatrixXd x = random_matrix(rng, 100, 4);
  Eigen::VectorXd y(100);
  for (int i = 0; i < 100; ++i) y(i) = rng.gaussian();

  Eigen::MatrixXd stacked(100, 5);
  stacked.leftCols(4) = x;
  stacked.col(4) = y;
  const double bound = stacked.rowwise().norm().maxCoeff();
  const Dataset data(stacked, bound);

  const Coefficients from_gram =
      solve_from_gram(gram(data), RegressionTask(4, {0, 1, 2, 3}));
  const Coefficients direct = ols(x, y);
  EXPECT_LE((from_gram.values - direct.values).norm(), 1e-9);
}

TEST(SolveFromGramTest, SingularFeatureBlockRaises) {
  SymMatrix m(3);
  m.set(0, 0, 1.0);
  m.set(0, 1, 1.0);
  m.set(1, 1, 1.0);
  m.set(2, 2, 1.0);
  try {
    solve_from_gram(m, RegressionTask(2, {0, 1}));
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& err) {
    EXPECT_LE(err.min_pivot(), 1e-12);
  }
}

TEST(SolveFromGramTest, RangeChecks) {
  const SymMatrix m = SymMatrix::identity(3);
  EXPECT_THROW(solve_from_gram(m, RegressionTask(5, {0})), InputError);
  EXPECT_THROW(solve_from_gram(m, RegressionTask(1, {0, 4})), InputError);
}

TEST(OlsTest, IdentityDesignReturnsLabels) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd y(4);
  y << 3.0, -1.0, 0.5, 2.0;
  EXPECT_LE((ols(x, y).values - y).norm(), 1e-14);
}

TEST(OlsTest, RecoversExactLinearModel) {
  RngStream rng(51, 0);
  const Eigen::MatrixXd x = random_matrix(rng, 60, 5);
  Eigen::VectorXd beta0(5);
  beta0 << 1.0, -2.0, 0.0, 3.5, 0.25;
  const Eigen::VectorXd y = x * beta0;
  EXPECT_LE((ols(x, y).values - beta0).norm(), 1e-10);
}

TEST(OlsTest, MatchesExtendedPrecisionOracle) {
  RngStream rng(52, 0);
  const Eigen::MatrixXd x = random_matrix(rng, 200, 4);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) y(i) = rng.gaussian();
  const Eigen::VectorXd oracle = extended_precision_ols(x, y);
  EXPECT_LE((ols(x, y).values - oracle).norm(), 1e-9);
}

TEST(OlsTest, RankDeficientDesignRaises) {
  Eigen::MatrixXd x(4, 2);
  x << 1.0, 2.0, 2.0, 4.0, 3.0, 6.0, -1.0, -2.0;
  Eigen::VectorXd y(4);
  y << 1.0, 2.0, 3.0, 4.0;
  EXPECT_THROW(ols(x, y), SingularSystemError);
  EXPECT_THROW(ols(x, y.head(3)), InputError);
}

TEST(RidgeClosedFormTest, ZeroPenaltyReducesToOls) {
  RngStream rng(53, 0);
  const Eigen::MatrixXd x = random_matrix(rng, 80, 3);
  Eigen::VectorXd y(80);
  for (int i = 0; i < 80; ++i) y(i) = rng.gaussian();
  EXPECT_LE(
      (ridge_closed_form(x, y, 0.0).values - ols(x, y).values).norm(), 1e-12);
}

TEST(RidgeClosedFormTest, HandExampleOnIdentityDesign) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd y(2);
  y << 2.0, 4.0;
  const Coefficients beta = ridge_closed_form(x, y, 1.0);
  EXPECT_NEAR(beta.values(0), 1.0, 1e-14);
  EXPECT_NEAR(beta.values(1), 2.0, 1e-14);
}

TEST(RidgeClosedFormTest, LargePenaltyShrinksTowardZero) {
  RngStream rng(54, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd x = random_matrix(rng, 50, 4);
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) y(i) = rng.gaussian();
    const double scale = (x.transpose() * x).operatorNorm();
    const Coefficients shrunk =
        ridge_closed_form(x, y, std::sqrt(1e6 * scale));
    EXPECT_LE(shrunk.values.norm(), 1e-4 * ols(x, y).values.norm());
  }
  EXPECT_THROW(ridge_closed_form(Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::VectorXd::Zero(2), -1.0),
               InputError);
}

TEST(L2ErrorTest, HandValuesAndRecomputation) {
  Coefficients a{Eigen::VectorXd(2)};
  Coefficients b{Eigen::VectorXd(2)};
  a.values << 1.0, 0.0;
  b.values << 1.0, 0.0;
  EXPECT_DOUBLE_EQ(l2_error(a, b), 0.0);
  b.values << 0.0, 1.0;
  EXPECT_DOUBLE_EQ(l2_error(a, b), std::sqrt(2.0));

  RngStream rng(55, 0);
  Coefficients u{Eigen::VectorXd(6)};
  Coefficients v{Eigen::VectorXd(6)};
  double acc = 0.0;
  for (int i = 0; i < 6; ++i) {
    u.values(i) = rng.gaussian();
    v.values(i) = rng.gaussian();
    acc += (u.values(i) - v.values(i)) * (u.values(i) - v.values(i));
  }
  EXPECT_DOUBLE_EQ(l2_error(u, v), std::sqrt(acc));

  Coefficients shorter{Eigen::VectorXd::Zero(3)};
  EXPECT_THROW(l2_error(u, shorter), InputError);
}

TEST(RegressionPropertyTest, ArgminCertificate) {
  RngStream rng(56, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix m = random_pd(rng, 6);
    const RegressionTask task(5, {0, 1, 2, 3, 4});
    const Coefficients beta = solve_from_gram(m, task);
    const Eigen::MatrixXd dense = m.dense();
    const auto quadratic = [&](const Eigen::VectorXd& coeffs) {
      Eigen::VectorXd full(6);
      full.head(5) = coeffs;
      full(5) = -1.0;
      return full.dot(dense * full);
    };
    const double at_solution = quadratic(beta.values);
    for (int i = 0; i < 5; ++i) {
      for (const double step : {1e-3, -1e-3}) {
        Eigen::VectorXd perturbed = beta.values;
        perturbed(i) += step;
        EXPECT_GT(quadratic(perturbed), at_solution);
      }
    }
  }
}

TEST(RegressionPropertyTest, AugmentedGramMatchesRidge) {
  RngStream rng(57, 0);
  const int n = 40, p = 3;
  const Eigen::MatrixXd x = random_matrix(rng, n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.gaussian();
  const double w = 1.7;

  // Stack [X y] with p extra rows [w e_i | 0]: the Gram matrix of the stack
  // is the ridge-augmented normal system.
  Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(n + p, p + 1);
  stacked.topLeftCorner(n, p) = x;
  stacked.topRightCorner(n, 1) = y;
  for (int i = 0; i < p; ++i) stacked(n + i, i) = w;
  const double bound = stacked.rowwise().norm().maxCoeff();
  const Dataset data(stacked, bound);

  std::vector<int> features(p);
  std::iota(features.begin(), features.end(), 0);
  const Coefficients from_gram =
      solve_from_gram(gram(data), RegressionTask(p, features));
  const Coefficients direct = ridge_closed_form(x, y, w);
  EXPECT_LE((from_gram.values - direct.values).norm(), 1e-9);
}

TEST(RegressionPropertyTest, PermutationEquivariance) {
  RngStream rng(58, 0);
  const SymMatrix m = random_pd(rng, 5);
  const Coefficients forward =
      solve_from_gram(m, RegressionTask(4, {0, 1, 2, 3}));
  const Coefficients swapped =
      solve_from_gram(m, RegressionTask(4, {2, 0, 3, 1}));
  EXPECT_NEAR(swapped.values(0), forward.values(2), 1e-12);
  EXPECT_NEAR(swapped.values(1), forward.values(0), 1e-12);
  EXPECT_NEAR(swapped.values(2), forward.values(3), 1e-12);
  EXPECT_NEAR(swapped.values(3), forward.values(1), 1e-12);
}

}  // namespace
}  // namespace privgram
