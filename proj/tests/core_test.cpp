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
#include <cstdio>
#include <filesystem>
#include <limits>

#include "privgram/budget.hpp"
#include "privgram/dataset.hpp"
#include "privgram/errors.hpp"
#include "privgram/io.hpp"
#include "privgram/linalg.hpp"
#include "privgram/rng.hpp"
#include "privgram/sampling.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {
namespace {

TEST(SymMatrixTest, StoresSymmetricallyBitExact) {
  SymMatrix m(3);
  m.set(0, 2, 1.25);
  m.set(2, 1, -0.5);
  EXPECT_EQ(m(0, 2), m(2, 0));
  EXPECT_EQ(m(1, 2), -0.5);
  EXPECT_EQ(m(2, 1), -0.5);
  EXPECT_EQ(m(0, 0), 0.0);
}

TEST(SymMatrixTest, FromDenseUsesUpperTriangle) {
  Eigen::MatrixXd dense(2, 2);
  dense << 1.0, 2.0, 99.0, 3.0;
  const SymMatrix m = SymMatrix::from_dense(dense);
  EXPECT_EQ(m(1, 0), 2.0);
  EXPECT_EQ(m(0, 1), 2.0);
  EXPECT_EQ(m(1, 1), 3.0);
}

TEST(SymMatrixTest, ArithmeticAndIdentity) {
  SymMatrix m = SymMatrix::identity(2, 3.0);
  m.add_scaled_identity(-1.0);
  EXPECT_EQ(m(0, 0), 2.0);
  const SymMatrix sum = m + SymMatrix::identity(2, 1.0);
  EXPECT_EQ(sum(1, 1), 3.0);
  EXPECT_THROW(m(2, 0), InputError);
  EXPECT_THROW(SymMatrix(0), InputError);
}

TEST(PrivacyBudgetTest, ValidatesRanges) {
  EXPECT_NO_THROW(PrivacyBudget(0.1, std::exp(-9.0)));
  EXPECT_THROW(PrivacyBudget(0.0, 0.01), InputError);
  EXPECT_THROW(PrivacyBudget(-1.0, 0.01), InputError);
  EXPECT_THROW(PrivacyBudget(1.0, 0.0), InputError);
  EXPECT_THROW(PrivacyBudget(1.0, std::exp(-1.0)), InputError);
  EXPECT_THROW(PrivacyBudget(1.0, 0.5), InputError);
}

TEST(ClipRowsTest, LeavesShortRowsUntouched) {
  RowMatrixXd raw(1, 2);
  raw << 3.0, 4.0;
  const Dataset data = clip_rows(raw, 10.0);
  EXPECT_EQ(data.rows()(0, 0), 3.0);
  EXPECT_EQ(data.rows()(0, 1), 4.0);
}

TEST(ClipRowsTest, ShrinksLongRowsToTheBound) {
  RowMatrixXd raw(1, 2);
  raw << 3.0, 4.0;
  const Dataset data = clip_rows(raw, 1.0);
  EXPECT_NEAR(data.rows()(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(data.rows()(0, 1), 0.8, 1e-15);
  EXPECT_NEAR(data.rows().row(0).norm(), 1.0, 1e-15);
}

TEST(ClipRowsTest, ZeroRowIsFixedPoint) {
  RowMatrixXd raw = RowMatrixXd::Zero(1, 3);
  const Dataset data = clip_rows(raw, 0.5);
  EXPECT_TRUE(data.rows().isZero(0.0));
}

TEST(ClipRowsTest, Idempotent) {
  RngStream rng(41, 0);
  RowMatrixXd raw = sample_gaussian_matrix(rng, 40, 5, 2.0);
  const Dataset once = clip_rows(raw, 1.5);
  const Dataset twice = clip_rows(once.rows(), 1.5);
  double max_diff = 0.0;
  for (Eigen::Index i = 0; i < once.n(); ++i) {
    max_diff = std::max(
        max_diff, (once.rows().row(i) - twice.rows().row(i)).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(max_diff, 1e-15);
}

TEST(ClipRowsTest, RejectsNonFinite) {
  RowMatrixXd raw(1, 2);
  raw << 1.0, std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(clip_rows(raw, 1.0), InputError);
}

TEST(DatasetTest, ValidatesShapeAndBound) {
  RowMatrixXd ok(1, 2);
  ok << 0.3, 0.4;
  EXPECT_NO_THROW(Dataset(ok, 1.0));
  EXPECT_THROW(Dataset(ok, 0.4), InputError);
  EXPECT_THROW(Dataset(ok, -1.0), InputError);
  RowMatrixXd narrow(3, 1);
  narrow.setZero();
  EXPECT_THROW(Dataset(narrow, 1.0), InputError);
  RowMatrixXd empty(0, 2);
  EXPECT_THROW(Dataset(empty, 1.0), InputError);
}

TEST(GramTest, HandComputedExamples) {
  RowMatrixXd eye(2, 2);
  eye << 1.0, 0.0, 0.0, 1.0;
  const SymMatrix id_gram = gram(Dataset(eye, 2.0));
  EXPECT_EQ(id_gram(0, 0), 1.0);
  EXPECT_EQ(id_gram(0, 1), 0.0);
  EXPECT_EQ(id_gram(1, 1), 1.0);

  RowMatrixXd single(1, 2);
  single << 1.0, 2.0;
  const SymMatrix outer = gram(Dataset(single, 3.0));
  EXPECT_EQ(outer(0, 0), 1.0);
  EXPECT_EQ(outer(0, 1), 2.0);
  EXPECT_EQ(outer(1, 1), 4.0);
}

TEST(GramTest, MatchesNaiveAccumulation) {
  RngStream rng(7, 3);
  RowMatrixXd raw = sample_gaussian_matrix(rng, 50, 8, 1.0);
  const Dataset data = clip_rows(raw, 10.0);
  const SymMatrix fast = gram(data);
  Eigen::MatrixXd naive = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 50; ++i) {
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        naive(a, b) += data.rows()(i, a) * data.rows()(i, b);
      }
    }
  }
  EXPECT_LE((fast.dense() - naive).norm() / naive.norm(), 1e-12);
}

TEST(GramTest, ChunkingCoversLargeRowCounts) {
  RowMatrixXd raw(8200, 2);
  raw.setOnes();
  const SymMatrix g = gram(Dataset(raw, 2.0));
  EXPECT_NEAR(g(0, 0), 8200.0, 1e-9);
  EXPECT_NEAR(g(0, 1), 8200.0, 1e-9);
}

TEST(MinSingularValueTest, DiagonalExamples) {
  EXPECT_NEAR(min_singular_value(SymMatrix::identity(3)), 1.0, 1e-12);
  SymMatrix diag(2);
  diag.set(0, 0, 4.0);
  diag.set(1, 1, 9.0);
  EXPECT_NEAR(min_singular_value(diag), 4.0, 1e-12);
  SymMatrix pair(2);
  pair.set(0, 0, 2.0);
  pair.set(0, 1, 1.0);
  pair.set(1, 1, 2.0);
  EXPECT_NEAR(min_singular_value(pair), 1.0, 1e-12);
}

TEST(MinSingularValueTest, UsesMagnitudeUnlessPsdHint) {
  SymMatrix indefinite(2);
  indefinite.set(0, 0, -0.5);
  indefinite.set(1, 1, 3.0);
  EXPECT_NEAR(min_singular_value(indefinite), 0.5, 1e-12);
  EXPECT_NEAR(min_singular_value(indefinite, /*psd_hint=*/true), -0.5, 1e-12);
}

TEST(MinSingularValueTest, RecoversPlantedSpectrum) {
  RngStream rng(11, 0);
  const int d = 6;
  const RowMatrixXd seed_mat = sample_gaussian_matrix(rng, d, d, 1.0);
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(seed_mat).householderQ();
  Eigen::VectorXd planted(d);
  planted << 0.37, 2.0, 5.5, 1.1, 9.0, 0.9;
  const Eigen::MatrixXd m = q.transpose() * planted.asDiagonal() * q;
  EXPECT_NEAR(min_singular_value(SymMatrix::from_dense(m)), 0.37, 1e-9);
}

TEST(IsPositiveDefiniteTest, GateExamples) {
  EXPECT_TRUE(is_positive_definite(SymMatrix::identity(2), 0.0));
  SymMatrix indefinite(2);
  indefinite.set(0, 0, 1.0);
  indefinite.set(1, 1, -1.0);
  EXPECT_FALSE(is_positive_definite(indefinite, 0.0));
  SymMatrix singular(2);
  singular.set(0, 0, 1.0);
  singular.set(0, 1, 1.0);
  singular.set(1, 1, 1.0);
  EXPECT_FALSE(is_positive_definite(singular, 1e-12));
  EXPECT_THROW(is_positive_definite(singular, -1.0), InputError);
}

TEST(IsPositiveDefiniteTest, DefaultToleranceScalesWithDiagonal) {
  SymMatrix nearly_singular(2);
  nearly_singular.set(0, 0, 1e9);
  nearly_singular.set(1, 1, 1e-3);
  EXPECT_FALSE(is_positive_definite(nearly_singular));
  nearly_singular.set(1, 1, 10.0);
  EXPECT_TRUE(is_positive_definite(nearly_singular));
}

TEST(SolveSpdTest, SolvesAndReportsPivotOnFailure) {
  SymMatrix m(2);
  m.set(0, 0, 4.0);
  m.set(0, 1, 1.0);
  m.set(1, 1, 3.0);
  Eigen::VectorXd rhs(2);
  rhs << 9.0, 8.0;
  const Eigen::VectorXd x = solve_spd(m, rhs);
  EXPECT_NEAR((m.dense() * x - rhs).norm(), 0.0, 1e-12);

  SymMatrix singular(2);
  singular.set(0, 0, 1.0);
  singular.set(0, 1, 1.0);
  singular.set(1, 1, 1.0);
  try {
    solve_spd(singular, rhs);
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& err) {
    EXPECT_LE(err.min_pivot(), 1e-12);
  }
}

TEST(DatasetIoTest, RoundTripsThroughCsv) {
  RngStream rng(3, 9);
  RowMatrixXd raw = sample_gaussian_matrix(rng, 12, 4, 1.0);
  const Dataset data = clip_rows(raw, 1.75);
  const std::string path =
      (std::filesystem::temp_directory_path() / "privgram_dataset_io.csv")
          .string();
  write_dataset(path, data);
  const Dataset loaded = read_dataset(path);
  EXPECT_EQ(loaded.n(), data.n());
  EXPECT_EQ(loaded.dim(), data.dim());
  EXPECT_EQ(loaded.row_bound(), data.row_bound());
  EXPECT_TRUE(loaded.rows().isApprox(data.rows(), 0.0));
  std::remove(path.c_str());
}

TEST(DatasetIoTest, RejectsMissingHeader) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "privgram_bad_dataset.csv")
          .string();
  {
    std::ofstream out(path);
    out << "1.0,2.0\n";
  }
  EXPECT_THROW(read_dataset(path), InputError);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace privgram
