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
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "privgram/budget.hpp"
#include "privgram/calibration.hpp"
#include "privgram/dataset.hpp"
#include "privgram/errors.hpp"
#include "privgram/estimate.hpp"
#include "privgram/linalg.hpp"
#include "privgram/rng.hpp"
#include "privgram/sampling.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {

enum class AgScaleConstantMode { kAnalytic2SigmaSqrtD, kMonteCarlo };

struct MechanismConfig {
  explicit MechanismConfig(PrivacyBudget budget_in) : budget(budget_in) {}

  PrivacyBudget budget;
  std::optional<long> r0_or_k0;
  AgVarianceConvention ag_variance_convention =
      AgVarianceConvention::kEpsSquared;
  AgScaleConstantMode ag_scale_constant_mode =
      AgScaleConstantMode::kAnalytic2SigmaSqrtD;
};

namespace internal {

// P = R [A; w I] where R is (rows x (n + d)) standard Gaussian, computed by
// streaming over the data so R is never materialized.  Entries of R are drawn
// row-of-A major, then ridge-block major; the chunk size only groups the
// matrix products.  With w = 0 the identity block is skipped entirely (the
// adaptive mechanism's pure-projection branch).
inline Eigen::MatrixXd gaussian_sketch(RngStream& rng, const RowMatrixXd& data,
                                       double ridge_w, long rows) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  Eigen::MatrixXd sketch = Eigen::MatrixXd::Zero(rows, d);
  const Eigen::Index chunk_rows =
      std::max<Eigen::Index>(64, (1 << 21) / std::max<long>(rows, 1));
  RowMatrixXd gauss(chunk_rows, rows);
  for (Eigen::Index start = 0; start < n; start += chunk_rows) {
    const Eigen::Index count = std::min(chunk_rows, n - start);
    for (Eigen::Index i = 0; i < count; ++i) {
      for (Eigen::Index j = 0; j < rows; ++j) gauss(i, j) = rng.gaussian();
    }
    sketch.noalias() += gauss.topRows(count).transpose() *
                        data.middleRows(start, count);
  }
  if (ridge_w > 0.0) {
    Eigen::VectorXd column(rows);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) column(i) = rng.gaussian();
      sketch.col(j) += ridge_w * column;
    }
  }
  return sketch;
}

inline SymMatrix normalized_gram(const Eigen::MatrixXd& sketch, long rows) {
  Eigen::MatrixXd acc =
      Eigen::MatrixXd::Zero(sketch.cols(), sketch.cols());
  acc.selfadjointView<Eigen::Upper>().rankUpdate(sketch.transpose(), 1.0);
  return SymMatrix::from_dense(acc / static_cast<double>(rows));
}

inline GramEstimate finish_estimate(SymMatrix matrix, std::string mechanism,
                                    std::map<std::string, double> calibration,
                                    std::string branch, std::uint64_t seed) {
  GramEstimate est;
  est.is_pd = is_positive_definite(matrix);
  est.matrix = std::move(matrix);
  est.mechanism = std::move(mechanism);
  est.calibration = std::move(calibration);
  est.branch = std::move(branch);
  est.seed = seed;
  return est;
}

}  // namespace internal

// The exact (non-private) Gram matrix dressed up as an estimate, the
// baseline the experiment harness labels "none".
inline GramEstimate exact_gram(const Dataset& data) {
  return internal::finish_estimate(gram(data), "none", {}, "", 0);
}

// Ridge sketch mechanism: project the ridge-augmented data with an r-row
// Gaussian matrix and release the normalized Gram of the projection,
//   M = (1/r) (R A')ᵀ (R A'),  A' = [A; w I].
inline GramEstimate ridge_jl(const Dataset& data, const PrivacyBudget& budget,
                             long r, RngStream& rng) {
  const int d = data.dim();
  if (r <= d) throw InputError("ridge_jl: need r > data dimension");
  const double w = jl_width(data.row_bound(), budget, r);
  const Eigen::MatrixXd sketch =
      internal::gaussian_sketch(rng, data.rows(), w, r);
  return internal::finish_estimate(
      internal::normalized_gram(sketch, r), "ridge-jl",
      {{"w", w}, {"r", static_cast<double>(r)}}, "", rng.seed());
}

// Differentially private underestimate of the least singular value of AᵀA:
//   s = max{0, sigma_min(AᵀA) - 2B^2 ln(2/d)/eps + Lap(2B^2/eps)}.
// laplace_override pins the Laplace draw in tests; production callers leave
// it unset.
inline double private_sv_estimate(
    const Dataset& data, const PrivacyBudget& budget, RngStream& rng,
    std::optional<double> laplace_override = std::nullopt) {
  const double noise = laplace_override.has_value()
                           ? *laplace_override
                           : rng.laplace(sv_noise_scale(data.row_bound(), budget));
  const double sv = min_singular_value(gram(data), /*psd_hint=*/true);
  return std::max(0.0, sv - sv_shift(data.row_bound(), budget) + noise);
}

// Adaptive ridge sketch: release a private singular-value credit s, spend it
// on lowering the ridge width; if the credit covers the whole width, project
// the raw data with as many rows as the credit affords instead.
inline GramEstimate ridge_jl_adaptive(
    const Dataset& data, const PrivacyBudget& budget, long r0, RngStream& rng,
    std::optional<double> laplace_override = std::nullopt) {
  const int d = data.dim();
  if (r0 <= d) throw InputError("ridge_jl_adaptive: need r0 > data dimension");
  const double base_w = jl_width_adaptive(data.row_bound(), budget, r0);
  const double s = private_sv_estimate(data, budget, rng, laplace_override);
  const double w_sq = std::max(0.0, base_w * base_w - s);
  if (w_sq > 0.0) {
    const double w = std::sqrt(w_sq);
    const Eigen::MatrixXd sketch =
        internal::gaussian_sketch(rng, data.rows(), w, r0);
    return internal::finish_estimate(
        internal::normalized_gram(sketch, r0), "ridge-jl-adaptive",
        {{"w", w}, {"r", static_cast<double>(r0)}, {"s", s}}, "additive",
        rng.seed());
  }
  const long r_star = max_sketch_rows(data.row_bound(), budget, s);
  if (r_star < d) {
    throw CalibrationError(
        "ridge_jl_adaptive: saturated row count fell below the dimension");
  }
  const Eigen::MatrixXd sketch =
      internal::gaussian_sketch(rng, data.rows(), 0.0, r_star);
  return internal::finish_estimate(
      internal::normalized_gram(sketch, r_star), "ridge-jl-adaptive",
      {{"w", 0.0}, {"r", static_cast<double>(r_star)}, {"s", s}},
      "closed_form", rng.seed());
}

// Additive Wishart mechanism: M = AᵀA + W, W ~ W_d(B^2 I, k).
inline GramEstimate additive_wishart(const Dataset& data,
                                     const PrivacyBudget& budget,
                                     RngStream& rng) {
  const int d = data.dim();
  const double b = data.row_bound();
  const long k = wishart_dof(d, budget);
  const SymMatrix noise =
      sample_wishart(rng, WishartSpec(SymMatrix::identity(d, b * b), k));
  return internal::finish_estimate(
      gram(data) + noise, "wishart",
      {{"k", static_cast<double>(k)}, {"row_bound", b}}, "", rng.seed());
}

// Recenters an additive-Wishart release by subtracting the largest of two
// candidate multiples of the identity that keeps the matrix positive
// definite: the noise mean kB^2, else the concentration lower edge
// B^2 (sqrt(k) - (sqrt(d) + sqrt(2 ln(4/d))))^2, else nothing.
inline GramEstimate wishart_bias_correct(const GramEstimate& est,
                                         const PrivacyBudget& budget) {
  const auto k_it = est.calibration.find("k");
  const auto b_it = est.calibration.find("row_bound");
  if (k_it == est.calibration.end() || b_it == est.calibration.end()) {
    throw InputError(
        "wishart_bias_correct: estimate lacks additive-Wishart calibration");
  }
  const double k = k_it->second;
  const double b2 = b_it->second * b_it->second;
  const int d = est.matrix.dim();
  const double edge =
      std::sqrt(k) - (std::sqrt(static_cast<double>(d)) +
                      std::sqrt(2.0 * std::log(4.0 / budget.delta)));
  const double candidates[2] = {k * b2, b2 * edge * edge};
  GramEstimate out = est;
  out.mechanism = "wishart-corrected";
  for (const double shift : candidates) {
    SymMatrix shifted = est.matrix;
    shifted.add_scaled_identity(-shift);
    if (is_positive_definite(shifted)) {
      out.matrix = std::move(shifted);
      out.calibration["shift"] = shift;
      out.is_pd = true;
      return out;
    }
  }
  out.calibration["shift"] = 0.0;
  return out;
}

// Inverse-Wishart posterior mechanism: M ~ W^{-1}_d(AᵀA + psi I, n + d).
inline GramEstimate inv_wishart(const Dataset& data,
                                const PrivacyBudget& budget, RngStream& rng) {
  const long dof = static_cast<long>(data.n()) + data.dim();
  const double psi = inv_wishart_psi(data.row_bound(), budget, dof);
  SymMatrix scale = gram(data);
  scale.add_scaled_identity(psi);
  return internal::finish_estimate(
      sample_inverse_wishart(rng, scale, dof), "inv-wishart",
      {{"psi", psi}, {"dof", static_cast<double>(dof)}}, "", rng.seed());
}

// Adaptive inverse-Wishart: spend the private singular-value credit on the
// regularizer; if the credit covers it entirely, sample at the largest
// affordable degrees of freedom from the unregularized Gram instead.
inline GramEstimate inv_wishart_adaptive(
    const Dataset& data, const PrivacyBudget& budget, long k0, RngStream& rng,
    std::optional<double> laplace_override = std::nullopt) {
  const int d = data.dim();
  if (k0 <= d - 1) {
    throw InputError("inv_wishart_adaptive: need k0 > dimension - 1");
  }
  const double base_psi =
      inv_wishart_psi_adaptive(data.row_bound(), budget, k0);
  const double s = private_sv_estimate(data, budget, rng, laplace_override);
  const double psi = std::max(0.0, base_psi - s);
  if (psi > 0.0) {
    SymMatrix scale = gram(data);
    scale.add_scaled_identity(psi);
    return internal::finish_estimate(
        sample_inverse_wishart(rng, scale, k0), "inv-wishart-adaptive",
        {{"psi", psi}, {"k", static_cast<double>(k0)}, {"s", s}}, "additive",
        rng.seed());
  }
  const long k_star = max_wishart_dof(data.row_bound(), budget, s);
  if (k_star <= d - 1) {
    throw CalibrationError(
        "inv_wishart_adaptive: saturated dof fell below the dimension");
  }
  const SymMatrix base = gram(data);
  if (!is_positive_definite(base)) {
    throw CalibrationError(
        "inv_wishart_adaptive: unregularized Gram matrix is not positive "
        "definite");
  }
  return internal::finish_estimate(
      sample_inverse_wishart(rng, base, k_star), "inv-wishart-adaptive",
      {{"psi", 0.0}, {"k", static_cast<double>(k_star)}, {"s", s}},
      "closed_form", rng.seed());
}

// Entrywise symmetric Gaussian noise on the Gram matrix.
inline GramEstimate analyze_gauss(const Dataset& data,
                                  const PrivacyBudget& budget, RngStream& rng,
                                  const MechanismConfig& config) {
  const double sigma = analyze_gauss_sigma(data.row_bound(), budget,
                                           config.ag_variance_convention);
  const SymMatrix noise = sample_symmetric_gaussian(rng, data.dim(), sigma);
  const double eps_power =
      config.ag_variance_convention == AgVarianceConvention::kEpsSquared ? 2.0
                                                                         : 1.0;
  return internal::finish_estimate(gram(data) + noise, "analyze-gauss",
                                   {{"sigma", sigma}, {"eps_power", eps_power}},
                                   "", rng.seed());
}

// Projects an estimate onto the PSD cone by zeroing negative eigenvalues
// (the Frobenius-nearest PSD matrix).
inline GramEstimate ag_psd_project(const GramEstimate& est) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(est.matrix.dense());
  if (solver.info() != Eigen::Success) {
    throw NumericError("ag_psd_project: eigendecomposition failed");
  }
  const Eigen::VectorXd clamped = solver.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd projected = solver.eigenvectors() *
                                    clamped.asDiagonal() *
                                    solver.eigenvectors().transpose();
  GramEstimate out = est;
  out.matrix = SymMatrix::from_dense(projected);
  out.mechanism = "ag-psd";
  out.is_pd = is_positive_definite(out.matrix);
  return out;
}

namespace internal {

constexpr std::uint64_t kAgScaleMonteCarloStream = 0x61672d7363616c65ULL;

inline double mean_spectral_norm(std::uint64_t seed, int dim, double sigma,
                                 int draws) {
  RngStream rng(seed, kAgScaleMonteCarloStream);
  double total = 0.0;
  for (int i = 0; i < draws; ++i) {
    const SymMatrix noise = sample_symmetric_gaussian(rng, dim, sigma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        noise.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericError("mean_spectral_norm: eigendecomposition failed");
    }
    total += solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  return total / draws;
}

}  // namespace internal

// If the estimate is not PD, add c I with c an estimate of the expected
// spectral norm of its noise matrix: the semicircle edge 2 sigma sqrt(d), or
// a 100-draw Monte Carlo average in kMonteCarlo mode.
inline GramEstimate ag_scaled(const GramEstimate& est,
                              const MechanismConfig& config) {
  const auto sigma_it = est.calibration.find("sigma");
  if (sigma_it == est.calibration.end()) {
    throw InputError("ag_scaled: estimate lacks a sigma calibration entry");
  }
  GramEstimate out = est;
  out.mechanism = "ag-scaled";
  if (est.is_pd) {
    out.calibration["c"] = 0.0;
    return out;
  }
  const double sigma = sigma_it->second;
  const int d = est.matrix.dim();
  const double c =
      config.ag_scale_constant_mode == AgScaleConstantMode::kMonteCarlo
          ? internal::mean_spectral_norm(est.seed, d, sigma, 100)
          : 2.0 * sigma * std::sqrt(static_cast<double>(d));
  out.matrix.add_scaled_identity(c);
  out.calibration["c"] = c;
  out.is_pd = is_positive_definite(out.matrix);
  return out;
}

// Gaussian noise on the inverse Gram matrix, valid only when the least
// singular value of AᵀA is publicly known to be at least (1 + rho) B^2.
inline GramEstimate gauss_inverse_noise(const Dataset& data,
                                        const PrivacyBudget& budget,
                                        double rho, RngStream& rng) {
  if (!(rho > 0.0)) throw InputError("gauss_inverse_noise: rho must be > 0");
  const SymMatrix g = gram(data);
  const double b2 = data.row_bound() * data.row_bound();
  if (min_singular_value(g, /*psd_hint=*/true) / b2 < 1.0 + rho) {
    throw InputError(
        "gauss_inverse_noise: least singular value below (1 + rho) B^2");
  }
  CholeskyResult chol = cholesky_with_tolerance(g, 0.0);
  if (!chol.factor.has_value()) {
    throw NumericError("gauss_inverse_noise: Cholesky failed on AᵀA");
  }
  const int d = data.dim();
  const Eigen::MatrixXd k_mat = chol.factor->triangularView<Eigen::Lower>()
                                    .solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(d, d);
  inv.selfadjointView<Eigen::Upper>().rankUpdate(k_mat.transpose(), 1.0);
  const double sigma = gauss_inverse_sigma(budget, rho);
  const SymMatrix noise = sample_symmetric_gaussian(rng, d, sigma);
  return internal::finish_estimate(
      SymMatrix::from_dense(inv) + noise, "gauss-inverse",
      {{"sigma", sigma}, {"rho", rho}, {"inverse_gram", 1.0}}, "", rng.seed());
}

}  // namespace privgram
